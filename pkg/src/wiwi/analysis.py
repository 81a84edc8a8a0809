"""Statistics over TWCP series: stationary deviation, step estimation, drift fit."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from wiwi.phy import SPEED_OF_LIGHT
from wiwi.twcp import TwcpSeries


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class StepReport:
    step_epoch: float
    delta_t_d: float
    delta_l: float
    pre_window: tuple[float, float]
    post_window: tuple[float, float]
    pre_mean: float
    post_mean: float
    pre_std: float
    post_std: float
    pre_n: int
    post_n: int

    def to_dict(self) -> dict:
        return asdict(self)


def _select(series: TwcpSeries, t0: float, t1: float, name: str) -> np.ndarray:
    epochs = series.epochs
    mask = (epochs >= t0) & (epochs <= t1)
    if not np.any(mask):
        raise WindowError(f"{name} window [{t0}, {t1}] contains no samples")
    return series.column("t_d")[mask]


def stationary_sigma(series: TwcpSeries, window: tuple[float, float]) -> float:
    """Sample standard deviation of t_d within a window (mean removed)."""
    t0, t1 = window
    t_d = _select(series, t0, t1, "stationary")
    if t_d.size < 30:
        raise WindowError(
            f"stationary window [{t0}, {t1}] holds {t_d.size} samples, need >= 30"
        )
    return float(np.std(t_d - np.mean(t_d), ddof=1))


def step_estimate(
    series: TwcpSeries,
    step_epoch: float,
    guard: float = 2.0,
    window: float = 15.0,
) -> StepReport:
    """Mean-difference step estimate around step_epoch.

    The guard interval on each side keeps the motion ramp out of both
    windows; delta_l = c * delta_t_d.
    """
    pre = (step_epoch - guard - window, step_epoch - guard)
    post = (step_epoch + guard, step_epoch + guard + window)
    epochs = series.epochs
    if pre[0] < epochs[0] or post[1] > epochs[-1]:
        raise WindowError(
            f"step windows {pre} / {post} fall outside the series "
            f"[{epochs[0]}, {epochs[-1]}]"
        )
    t_d_pre = _select(series, *pre, "pre")
    t_d_post = _select(series, *post, "post")
    delta = float(np.mean(t_d_post) - np.mean(t_d_pre))
    return StepReport(
        step_epoch=step_epoch,
        delta_t_d=delta,
        delta_l=SPEED_OF_LIGHT * delta,
        pre_window=pre,
        post_window=post,
        pre_mean=float(np.mean(t_d_pre)),
        post_mean=float(np.mean(t_d_post)),
        pre_std=float(np.std(t_d_pre, ddof=1)) if t_d_pre.size > 1 else 0.0,
        post_std=float(np.std(t_d_post, ddof=1)) if t_d_post.size > 1 else 0.0,
        pre_n=int(t_d_pre.size),
        post_n=int(t_d_post.size),
    )


def drift_fit(series: TwcpSeries) -> tuple[float, float]:
    """Least-squares linear fit of t_c: returns (slope s/s, intercept s)."""
    if len(series) < 2:
        raise WindowError("drift fit needs at least 2 samples")
    slope, intercept = np.polyfit(series.epochs, series.column("t_c"), 1)
    return float(slope), float(intercept)
