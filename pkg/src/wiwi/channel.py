"""Propagation model: distance -> delay -> carrier rotation, AWGN, multipath.

Baseband-equivalent convention: a path delay tau rotates the frame by
exp(-j*2*pi*f_c*tau) (phase shifts negatively as distance grows) and
shifts the envelope. At 4 Msps the sub-sample part of the shift for
mm-scale geometry is < 1e-4 samples, so by default it is applied as the
carrier rotation only; set exact_delay=True to also apply exact
fractional-delay filtering of the envelope (validation mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wiwi.phy import IqFrame, PhyConfig


@dataclass(frozen=True)
class MotionProfile:
    """Piecewise trajectory of site B's antenna displacement.

    segments: ordered (start_epoch_s, target_displacement_m) steps; the
    position ramps from its previous level to each target at ramp_mps
    (None means instantaneous steps). Each ramp must complete before the
    next segment starts.
    """

    segments: tuple[tuple[float, float], ...] = ()
    ramp_mps: float | None = 0.005

    def __post_init__(self) -> None:
        segs = tuple((float(t), float(d)) for t, d in self.segments)
        object.__setattr__(self, "segments", segs)
        level = 0.0
        prev_t = -math.inf
        for t0, target in segs:
            if not (math.isfinite(t0) and math.isfinite(target)):
                raise ValueError("motion segments must be finite")
            if t0 <= prev_t:
                raise ValueError("motion segment epochs must be strictly increasing")
            if self.ramp_mps is not None:
                if self.ramp_mps <= 0:
                    raise ValueError("ramp_mps must be positive or None")
                ramp_time = abs(target - level) / self.ramp_mps
                prev_t = t0 + ramp_time
            else:
                prev_t = t0
            level = target


def motion_position(profile: MotionProfile, t: float) -> float:
    """Displacement from the initial position at true time t (>= 0)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    level = 0.0
    for t0, target in profile.segments:
        if t < t0:
            break
        if profile.ramp_mps is None:
            level = target
            continue
        ramp_time = abs(target - level) / profile.ramp_mps
        if t >= t0 + ramp_time:
            level = target
        else:
            level = level + math.copysign(profile.ramp_mps, target - level) * (t - t0)
            break
    return level


@dataclass(frozen=True)
class ChannelConfig:
    base_distance: float = 0.40
    snr_db: float | None = 25.0
    multipath_taps: tuple[tuple[float, complex], ...] = ()
    seed: int = 0
    exact_delay: bool = False
    motion: MotionProfile = field(default_factory=MotionProfile)

    def __post_init__(self) -> None:
        if self.base_distance <= 0:
            raise ValueError("base_distance must be > 0")
        taps = tuple((float(dt), complex(g)) for dt, g in self.multipath_taps)
        object.__setattr__(self, "multipath_taps", taps)


def propagation_delay(distance: float, cfg: PhyConfig) -> float:
    """One-way propagation time of a geometric distance."""
    if distance < 0:
        raise ValueError("distance must be >= 0")
    return distance / cfg.c


def envelope_shift_samples(delay: float, sample_rate: float) -> int:
    """Whole-sample part of the envelope shift a delay produces."""
    return int(math.floor(delay * sample_rate))


def _delayed_envelope(samples: np.ndarray, delay: float, sample_rate: float, exact: bool) -> np.ndarray:
    n_int = envelope_shift_samples(delay, sample_rate)
    out = np.concatenate([np.zeros(n_int, dtype=np.complex128), samples])
    if exact:
        frac = delay * sample_rate - n_int
        if frac > 0.0:
            n = out.size
            freqs = np.fft.fftfreq(n)
            out = np.fft.ifft(np.fft.fft(out) * np.exp(-2j * np.pi * freqs * frac))
    return out


def apply_channel(
    frame: IqFrame,
    delay: float,
    cfg: ChannelConfig,
    phy: PhyConfig,
    rng: np.random.Generator | None = None,
) -> IqFrame:
    """Delay + carrier rotation + optional multipath, then AWGN at snr_db."""
    if delay < 0:
        raise ValueError("delay must be >= 0")
    paths = [(delay, 1.0 + 0.0j)]
    paths += [(delay + dt, g) for dt, g in cfg.multipath_taps]
    max_shift = max(envelope_shift_samples(d, frame.sample_rate) for d, _ in paths)
    n_out = frame.samples.size + max_shift
    out = np.zeros(n_out, dtype=np.complex128)
    for tau, gain in paths:
        env = _delayed_envelope(frame.samples, tau, frame.sample_rate, cfg.exact_delay)
        rotation = np.exp(-2j * np.pi * phy.f_c * tau)
        out[: env.size] += gain * rotation * env
    if cfg.snr_db is not None:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        sig_pow = float(np.mean(np.abs(out) ** 2))
        sigma = math.sqrt(sig_pow * 10.0 ** (-cfg.snr_db / 10.0) / 2.0)
        out = out + sigma * (rng.standard_normal(n_out) + 1j * rng.standard_normal(n_out))
    return IqFrame(samples=out, sample_rate=frame.sample_rate, start_epoch=frame.start_epoch + delay)
