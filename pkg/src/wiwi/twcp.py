"""Two-way carrier-phase core: phase differencing, unwrapping, combination.

Per transmission event the local and remote packet phases are differenced
into one wrapped value (phi_B for transmitter X events, phi_A for Y
events). Each difference series is unwrapped independently, the opposite
series is linearly interpolated to each event's epoch, and the pair is
combined into propagation time t_d and clock difference t_c.

Interpolating the opposite series to a common epoch (rather than pairing
at a midpoint epoch) makes linear clock drift cancel out of t_d and
linear motion cancel out of t_c exactly, sample by sample; a midpoint
pairing leaks an alternating-sign term of order rate*interval/2 into
both outputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from wiwi.phy import PacketMeasurement, PhyConfig, unwrap_intra_packet

TWO_PI = 2.0 * math.pi

CSV_COLUMNS = (
    "epoch_s",
    "phi_A_rad",
    "phi_B_rad",
    "t_A_s",
    "t_B_s",
    "t_c_s",
    "t_d_s",
    "l_d_var_m",
    "flags",
)


def wrap_phase(x):
    """Wrap to (-pi, pi]."""
    return x - TWO_PI * np.ceil((x - np.pi) / TWO_PI)


def unwrap_series(phases) -> np.ndarray:
    """Unwrap a measurement series: adjacent deltas forced into (-pi, pi].

    A true step beyond pi is inherently misread as its 2*pi complement;
    callers must guarantee inter-measurement phase steps below pi
    (displacement below half a carrier wavelength per series step).
    """
    phases = np.asarray(phases, dtype=np.float64)
    if phases.size == 0:
        raise ValueError("phases must be non-empty")
    return unwrap_intra_packet(phases)


@dataclass(frozen=True)
class TwcpSample:
    epoch: float
    phi_A: float
    phi_B: float
    t_A: float
    t_B: float
    t_c: float
    t_d: float
    l_d_var: float
    K: int = 0
    flags: str = ""


@dataclass
class TwcpSeries:
    samples: list[TwcpSample] = field(default_factory=list)
    dropped_count: int = 0

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=np.float64)

    @property
    def epochs(self) -> np.ndarray:
        return self.column("epoch")


@dataclass(frozen=True)
class AlignedEvent:
    """One event with its opposite-type neighbors for interpolation."""

    kind: str  # "X" or "Y"
    epoch: float
    own_index: int
    left_index: int
    right_index: int
    right_weight: float


def _event_epochs(records) -> np.ndarray:
    return np.array([local.rx_epoch for local, _ in records], dtype=np.float64)


def pair_measurements(
    x_records,
    y_records,
    window: float = 0.15,
) -> tuple[list[AlignedEvent], int]:
    """Align each event with its nearest opposite-type neighbors.

    x_records / y_records: sequences of (local, remote) PacketMeasurement
    pairs from the same transmission, time-ordered. An event is usable
    when an opposite-type event exists within `window` seconds on each
    side; everything else (invalid packets, edge and isolated events)
    counts into the returned drop total.
    """
    dropped = 0

    def usable(records):
        nonlocal dropped
        out = []
        for i, (local, remote) in enumerate(records):
            if local.valid and remote.valid:
                out.append((local.rx_epoch, i))
            else:
                dropped += 1
        return out

    x_ev = usable(x_records)
    y_ev = usable(y_records)
    merged = sorted(
        [(t, "X", i) for t, i in x_ev] + [(t, "Y", i) for t, i in y_ev]
    )
    epochs = [t for t, _, _ in merged]
    if any(b <= a for a, b in zip(epochs, epochs[1:])):
        raise ValueError("event epochs must be strictly increasing")

    aligned: list[AlignedEvent] = []
    for pos, (t, kind, own_i) in enumerate(merged):
        left = next(
            ((tt, ii) for tt, kk, ii in reversed(merged[:pos]) if kk != kind), None
        )
        right = next(((tt, ii) for tt, kk, ii in merged[pos + 1 :] if kk != kind), None)
        if (
            left is None
            or right is None
            or t - left[0] > window
            or right[0] - t > window
        ):
            dropped += 1
            continue
        w = (t - left[0]) / (right[0] - left[0])
        aligned.append(
            AlignedEvent(
                kind=kind,
                epoch=t,
                own_index=own_i,
                left_index=left[1],
                right_index=right[1],
                right_weight=w,
            )
        )
    return aligned, dropped


def combine(phi_A: float, phi_B: float, cfg: PhyConfig, K: int = 0) -> tuple[float, float]:
    """Unwrapped two-way phases -> (t_d, t_c_var).

    l_d = -((phi_A + phi_B) / (2*pi) + K) * lambda / 2, t_d = l_d / c;
    t_c_var = -(phi_B - phi_A) / (4*pi*f_c), tracked up to a constant
    that absorbs the transmitters' initial phase offsets.
    """
    if not (math.isfinite(phi_A) and math.isfinite(phi_B)):
        raise ValueError("phases must be finite")
    l_d = -((phi_A + phi_B) / TWO_PI + K) * (cfg.wavelength / 2.0)
    t_d = l_d / cfg.c
    t_c_var = -(phi_B - phi_A) / (2.0 * TWO_PI * cfg.f_c)
    return t_d, t_c_var


def default_continuity_threshold(cfg: PhyConfig) -> float:
    # pi radians of carrier phase between consecutive measurements
    return 1.0 / (2.0 * cfg.f_c)


def process_stream(
    x_records,
    y_records,
    cfg: PhyConfig,
    window: float = 0.15,
    K: int = 0,
    continuity_threshold: float | None = None,
) -> TwcpSeries:
    """Full reduction: difference, unwrap, align, combine, reference to start."""
    if continuity_threshold is None:
        continuity_threshold = default_continuity_threshold(cfg)

    def phase_series(records):
        return np.array(
            [
                wrap_phase(remote.packet_phase - local.packet_phase)
                if (local.valid and remote.valid)
                else np.nan
                for local, remote in records
            ]
        )

    phi_b_raw = phase_series(x_records)  # one per X event
    phi_a_raw = phase_series(y_records)  # one per Y event
    aligned, dropped = pair_measurements(x_records, y_records, window=window)
    if not aligned:
        return TwcpSeries(samples=[], dropped_count=dropped)

    # unwrap over valid entries only (invalid ones were dropped by pairing)
    def unwrap_valid(raw):
        out = np.full_like(raw, np.nan)
        idx = np.flatnonzero(np.isfinite(raw))
        if idx.size:
            out[idx] = unwrap_series(raw[idx])
        return out

    phi_b = unwrap_valid(phi_b_raw)
    phi_a = unwrap_valid(phi_a_raw)

    samples: list[TwcpSample] = []
    t_d_first = None
    prev_t_c = None
    for ev in aligned:
        own_series, opp_series = (phi_b, phi_a) if ev.kind == "X" else (phi_a, phi_b)
        own = own_series[ev.own_index]
        opp = (1.0 - ev.right_weight) * opp_series[ev.left_index] + ev.right_weight * opp_series[
            ev.right_index
        ]
        cur_phi_b, cur_phi_a = (own, opp) if ev.kind == "X" else (opp, own)
        t_d, t_c = combine(cur_phi_a, cur_phi_b, cfg, K=K)
        if t_d_first is None:
            t_d_first = t_d
        flags = ""
        if prev_t_c is not None and abs(t_c - prev_t_c) > continuity_threshold:
            flags += "C"
        prev_t_c = t_c
        samples.append(
            TwcpSample(
                epoch=ev.epoch,
                phi_A=cur_phi_a,
                phi_B=cur_phi_b,
                t_A=t_d - t_c,
                t_B=t_d + t_c,
                t_c=t_c,
                t_d=t_d,
                l_d_var=cfg.c * (t_d - t_d_first),
                K=K,
                flags=flags,
            )
        )
    return TwcpSeries(samples=samples, dropped_count=dropped)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_csv(series: TwcpSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for s in series.samples:
            writer.writerow(
                [
                    _fmt(s.epoch),
                    _fmt(s.phi_A),
                    _fmt(s.phi_B),
                    _fmt(s.t_A),
                    _fmt(s.t_B),
                    _fmt(s.t_c),
                    _fmt(s.t_d),
                    _fmt(s.l_d_var),
                    s.flags,
                ]
            )


def read_csv(path) -> TwcpSeries:
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected TWCP CSV header in {path}: {header}")
        for row in reader:
            vals = [float(v) for v in row[:8]]
            samples.append(
                TwcpSample(
                    epoch=vals[0],
                    phi_A=vals[1],
                    phi_B=vals[2],
                    t_A=vals[3],
                    t_B=vals[4],
                    t_c=vals[5],
                    t_d=vals[6],
                    l_d_var=vals[7],
                    flags=row[8],
                )
            )
    return TwcpSeries(samples=samples)
