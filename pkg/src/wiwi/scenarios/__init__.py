"""Shipped scenario files."""

from importlib import resources
from pathlib import Path


def scenario_path(name: str) -> Path:
    """Filesystem path of a shipped scenario, e.g. scenario_path("fig3")."""
    ref = resources.files(__name__) / f"{name}.yaml"
    if not ref.is_file():
        raise FileNotFoundError(f"no shipped scenario named {name!r}")
    return Path(str(ref))
