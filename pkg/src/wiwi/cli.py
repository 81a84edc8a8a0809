"""Command-line entry point: simulate scenarios and analyze TWCP series.

Subcommands:
  run      simulate a scenario file, write TWCP CSV + truth CSV
  analyze  step estimates (and optional stationary sigma) over a TWCP CSV
  sweep    re-run a scenario over a swept parameter, one CSV per value
  fig4     two-column plot data: clock-difference panel and magnified
           propagation-time panel

WIWI_OUT_DIR, when set, prefixes every relative output path. --seed
overrides the scenario seed.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

import click
import yaml

from wiwi import analysis, sim, twcp
from wiwi.analysis import WindowError
from wiwi.sim import ScenarioError


def _out_path(path: str) -> Path:
    base = os.environ.get("WIWI_OUT_DIR")
    p = Path(path)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _load(scenario_path: str, seed: int | None) -> sim.ScenarioConfig:
    cfg = sim.load_scenario(scenario_path)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    return cfg


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _write_truth(out: sim.SimOutput, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch_s", "true_t_c_s", "true_t_d_s"])
        for e, tc, td in zip(out.truth_epochs, out.truth_t_c, out.truth_t_d):
            writer.writerow([_fmt(e), _fmt(tc), _fmt(td)])


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Wi-Wi range-variation monitoring simulator."""


@main.command("run")
@click.argument("scenario", type=str)
@click.option("--out", required=True, help="TWCP CSV output path.")
@click.option("--truth-out", default=None, help="Truth CSV path (default: <out>.truth.csv).")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
def run_cmd(scenario: str, out: str, truth_out: str | None, seed: int | None) -> None:
    """Simulate SCENARIO and write the TWCP series."""
    try:
        cfg = _load(scenario, seed)
        result = sim.run(cfg)
        out_path = _out_path(out)
        twcp.write_csv(result.twcp, out_path)
        truth_path = _out_path(truth_out) if truth_out else out_path.with_suffix(
            out_path.suffix + ".truth.csv"
        )
        _write_truth(result, truth_path)
    except (ScenarioError, ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(
        f"wrote {len(result.twcp)} samples to {out_path} "
        f"(dropped {result.twcp.dropped_count}, truth in {truth_path})"
    )


@main.command("analyze")
@click.argument("csv_path", type=str)
@click.option("--steps", default="", help="Comma-separated step epochs (seconds).")
@click.option("--guard", type=float, default=2.0, show_default=True)
@click.option("--window", type=float, default=15.0, show_default=True)
@click.option("--sigma-window", default=None, help="t0:t1 stationary window for a sigma report.")
@click.option("--out", default=None, help="Write JSON lines here instead of stdout.")
def analyze_cmd(csv_path, steps, guard, window, sigma_window, out) -> None:
    """Emit step reports (JSON lines) for a TWCP CSV."""
    try:
        series = twcp.read_csv(csv_path)
        lines = []
        if sigma_window:
            t0, t1 = (float(v) for v in sigma_window.split(":"))
            sigma = analysis.stationary_sigma(series, (t0, t1))
            lines.append({"report": "stationary_sigma", "window": [t0, t1], "sigma_t_d_s": sigma})
        for tok in filter(None, (s.strip() for s in steps.split(","))):
            report = analysis.step_estimate(series, float(tok), guard=guard, window=window)
            lines.append({"report": "step", **report.to_dict()})
        slope, intercept = analysis.drift_fit(series)
        lines.append({"report": "drift_fit", "slope_s_per_s": slope, "intercept_s": intercept})
    except (WindowError, ValueError, OSError) as exc:
        _fail(str(exc))
    text = "\n".join(json.dumps(line) for line in lines)
    if out:
        _out_path(out).write_text(text + "\n")
    else:
        click.echo(text)


def _set_dotted(data: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"cannot descend into non-mapping key {k!r} of {dotted!r}")
    node[keys[-1]] = value


def _parse_value(token: str):
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            continue
    if token.lower() in ("null", "none"):
        return None
    return token


@main.command("sweep")
@click.argument("scenario", type=str)
@click.option("--param", required=True, help="Swept parameter, e.g. channel.snr_db=20,25,30.")
@click.option("--out-dir", required=True, help="One TWCP CSV per value is written here.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
def sweep_cmd(scenario, param, out_dir, seed) -> None:
    """Run SCENARIO once per value of a swept parameter."""
    try:
        key, _, values = param.partition("=")
        if not values:
            raise ScenarioError(f"--param must look like key=v1,v2,..., got {param!r}")
        with open(scenario) as fh:
            base = yaml.safe_load(fh)
        if not isinstance(base, dict):
            raise ScenarioError(f"scenario file {scenario} must hold a mapping")
        if seed is not None:
            base["seed"] = seed
        written = []
        for tok in values.split(","):
            data = json.loads(json.dumps(base))  # deep copy
            _set_dotted(data, key, _parse_value(tok))
            cfg = sim.scenario_from_dict(data)
            result = sim.run(cfg)
            safe = tok.replace("/", "_")
            path = _out_path(str(Path(out_dir) / f"{key}={safe}.csv"))
            twcp.write_csv(result.twcp, path)
            written.append(str(path))
    except (ScenarioError, ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo("\n".join(written))


@main.command("fig4")
@click.argument("scenario", type=str)
@click.option("--out-prefix", required=True, help="Writes <prefix>_tc.csv and <prefix>_td.csv.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
def fig4_cmd(scenario, out_prefix, seed) -> None:
    """Plot data for the clock-difference and magnified propagation panels."""
    try:
        cfg = _load(scenario, seed)
        result = sim.run(cfg)
        series = result.twcp
        if not series.samples:
            raise ScenarioError("scenario produced an empty series")
        epochs = series.epochs
        t_c = series.column("t_c")
        t_d = series.column("t_d")
        tc_path = _out_path(f"{out_prefix}_tc.csv")
        td_path = _out_path(f"{out_prefix}_td.csv")
        with open(tc_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch_s", "t_c_var_s"])
            for e, v in zip(epochs, t_c - t_c[0]):
                writer.writerow([_fmt(e), _fmt(v)])
        with open(td_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch_s", "t_d_var_s"])
            for e, v in zip(epochs, t_d - t_d[0]):
                writer.writerow([_fmt(e), _fmt(v)])
    except (ScenarioError, ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {tc_path} and {td_path}")


if __name__ == "__main__":
    main()
