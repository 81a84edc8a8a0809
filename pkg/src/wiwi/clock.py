"""Free-running oscillator model: rate offset + white-FM + random-walk-FM noise.

A clock is a value object. ``advance`` returns a new state; nothing is
mutated, so states can be shared freely across threads and runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ClockNoiseConfig:
    """Noise intensities, scaled per sqrt(update interval).

    white_fm_sigma: std of the time-offset increment over 1 s (white FM).
    rw_fm_sigma: std of the fractional-frequency random-walk step over 1 s.
    """

    white_fm_sigma: float = 0.0
    rw_fm_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.white_fm_sigma < 0 or self.rw_fm_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


def _fresh_rng_state(seed: int) -> dict[str, Any]:
    return np.random.default_rng(seed).bit_generator.state


@dataclass(frozen=True)
class ClockState:
    """Snapshot of one oscillator.

    offset: current time error vs true time, seconds.
    rate: deterministic fractional frequency offset (dimensionless).
    rw_state: accumulated random-walk fractional-frequency component.
    phase0: initial local-oscillator phase, radians.
    """

    offset: float = 0.0
    rate: float = 0.0
    rw_state: float = 0.0
    phase0: float = 0.0
    noise_cfg: ClockNoiseConfig = field(default_factory=ClockNoiseConfig)
    rng_state: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.offset) and math.isfinite(self.rate)):
            raise ValueError("offset and rate must be finite")
        if self.rng_state is None:
            object.__setattr__(self, "rng_state", _fresh_rng_state(self.noise_cfg.seed))


def advance(state: ClockState, dt: float) -> ClockState:
    """Propagate the clock forward by dt seconds of true time."""
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    cfg = state.noise_cfg
    if cfg.white_fm_sigma == 0.0 and cfg.rw_fm_sigma == 0.0:
        return replace(state, offset=state.offset + (state.rate + state.rw_state) * dt)
    rng = np.random.Generator(np.random.PCG64())
    rng.bit_generator.state = state.rng_state
    sqrt_dt = math.sqrt(dt)
    rw_state = state.rw_state + rng.normal(0.0, cfg.rw_fm_sigma) * sqrt_dt
    offset = (
        state.offset
        + (state.rate + rw_state) * dt
        + rng.normal(0.0, cfg.white_fm_sigma) * sqrt_dt
    )
    return replace(state, offset=offset, rw_state=rw_state, rng_state=rng.bit_generator.state)


def read_time(state: ClockState, true_time: float) -> float:
    """Time shown by this clock at the given true time."""
    return true_time + state.offset


def lo_phase(state: ClockState, true_time: float, f_c: float) -> float:
    """Unwrapped local-oscillator phase at carrier frequency f_c."""
    if f_c <= 0:
        raise ValueError("f_c must be > 0")
    return TWO_PI * f_c * read_time(state, true_time) + state.phase0


def lo_phase_excess(state: ClockState, f_c: float) -> float:
    """LO phase minus the 2*pi*f_c*t term common to all clocks.

    Only phase differences between clocks are observable; dropping the
    common term keeps the arithmetic well-conditioned at large run times
    (2*pi*f_c*t exceeds 1e12 rad within minutes at 2.4 GHz).
    """
    return TWO_PI * f_c * state.offset + state.phase0
