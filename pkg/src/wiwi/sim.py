"""Scenario orchestration: two sites, four clocks, alternating transmissions.

Two run modes produce the same TWCP mathematics:

* phase_domain: packet phases come straight from the closed-form model
  (transmitter LO phase - receiver LO phase - 2*pi*f_c*delay for the
  remote copy, no delay term for the local copy) plus an SNR-equivalent
  phase noise. Milliseconds per 6-minute scenario.
* waveform: every packet is modulated, passed through the channel,
  derotated by the receiver LO and demodulated symbol by symbol.

All LO phases enter as "excess" phase (2*pi*f_c*offset + phase0); the
2*pi*f_c*t term common to all clocks cancels from every measured
difference and would destroy double precision at minute timescales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from wiwi import twcp
from wiwi.channel import (
    ChannelConfig,
    MotionProfile,
    apply_channel,
    envelope_shift_samples,
    motion_position,
    propagation_delay,
)
from wiwi.clock import ClockNoiseConfig, ClockState, advance, lo_phase_excess
from wiwi.phy import IqFrame, PacketMeasurement, PhyConfig, demodulate_packet, modulate, reference_energy
from wiwi.twcp import TwcpSeries, wrap_phase

SCHEMA_VERSION = 1

SITES = ("A", "B")
TRANSMITTERS = ("X", "Y")
CLOCK_NAMES = ("A", "B", "X", "Y")


@dataclass(frozen=True)
class ClockSpec:
    """Per-device clock configuration; None fields are drawn per run."""

    rate: float | None = 0.0
    rate_draw_sigma: float = 0.0
    white_fm_sigma: float = 0.0
    rw_fm_sigma: float = 0.0
    offset: float = 0.0
    phase0: float | None = 0.0
    seed: int | None = None


def rubidium_spec() -> ClockSpec:
    # calibrated so a 6-minute run wanders by ~1 ns in t_c and the
    # stationary t_d deviation lands near 2.2 ps
    return ClockSpec(
        rate=None,
        rate_draw_sigma=3e-12,
        white_fm_sigma=1.4e-11,
        rw_fm_sigma=1e-13,
        phase0=None,
    )


def coarse_spec() -> ClockSpec:
    # transmitter crystals: uncorrelated with the site clocks, large wander
    return ClockSpec(
        rate=None,
        rate_draw_sigma=1e-8,
        white_fm_sigma=1e-6,
        rw_fm_sigma=0.0,
        phase0=None,
    )


CLOCK_PRESETS = {"ideal": ClockSpec, "rubidium": rubidium_spec, "coarse": coarse_spec}


def _default_clocks() -> dict[str, ClockSpec]:
    return {
        "A": rubidium_spec(),
        "B": rubidium_spec(),
        "X": coarse_spec(),
        "Y": coarse_spec(),
    }


@dataclass(frozen=True)
class ScenarioConfig:
    duration: float = 360.0
    tx_interval: float = 0.1
    tx_jitter_frac: float = 0.0
    mode: str = "phase_domain"
    protocol_mode: str = "oracle"
    seed: int = 0
    phy: PhyConfig = field(default_factory=PhyConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    clocks: dict[str, ClockSpec] = field(default_factory=_default_clocks)
    rerandomize_tx: bool = False
    pair_window: float = 0.15
    continuity_threshold: float | None = None
    K: int = 0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.tx_interval <= 0:
            raise ValueError("tx_interval must be > 0")
        if not 0.0 <= self.tx_jitter_frac < 0.5:
            raise ValueError("tx_jitter_frac must lie in [0, 0.5)")
        if self.mode not in ("phase_domain", "waveform"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.protocol_mode not in ("oracle", "delayed_report"):
            raise ValueError(f"unknown protocol_mode {self.protocol_mode!r}")
        if set(self.clocks) != set(CLOCK_NAMES):
            raise ValueError(f"clocks must define exactly {CLOCK_NAMES}")


@dataclass
class SimOutput:
    twcp: TwcpSeries
    truth_epochs: np.ndarray
    truth_t_c: np.ndarray
    truth_t_d: np.ndarray
    diagnostics: dict


def schedule(cfg: ScenarioConfig) -> list[tuple[float, str]]:
    """Ordered (epoch, transmitter) events: X, Y, X, Y at tx_interval spacing."""
    n = int(math.floor(cfg.duration / cfg.tx_interval))
    base = np.arange(n) * cfg.tx_interval
    if cfg.tx_jitter_frac > 0.0:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x5C4ED]))
        base = base + rng.uniform(-cfg.tx_jitter_frac, cfg.tx_jitter_frac, n) * cfg.tx_interval
        base[0] = max(base[0], 0.0)
    return [(float(t), TRANSMITTERS[i % 2]) for i, t in enumerate(base)]


def _build_clock(name: str, spec: ClockSpec, draw_rng: np.random.Generator, seed_root: int) -> ClockState:
    rate = spec.rate if spec.rate is not None else float(draw_rng.normal(0.0, spec.rate_draw_sigma))
    phase0 = spec.phase0 if spec.phase0 is not None else float(draw_rng.uniform(0.0, 2.0 * math.pi))
    seed = spec.seed if spec.seed is not None else seed_root + CLOCK_NAMES.index(name)
    return ClockState(
        offset=spec.offset,
        rate=rate,
        phase0=phase0,
        noise_cfg=ClockNoiseConfig(
            white_fm_sigma=spec.white_fm_sigma,
            rw_fm_sigma=spec.rw_fm_sigma,
            seed=seed,
        ),
    )


def _phase_noise_sigma(cfg: ScenarioConfig) -> float:
    """Per-packet phase noise matching waveform-mode AWGN at channel.snr_db."""
    if cfg.channel.snr_db is None:
        return 0.0
    noise_amp = 10.0 ** (-cfg.channel.snr_db / 20.0)
    energy = reference_energy(cfg.phy)
    return noise_amp / math.sqrt(2.0 * energy * cfg.phy.symbols_per_packet)


def _measurement(packet_id, tx, rx, phase, epoch, snr_db) -> PacketMeasurement:
    return PacketMeasurement(
        packet_id=packet_id,
        tx_site=tx,
        rx_site=rx,
        symbols=np.empty(0, dtype=np.int64),
        symbol_phases=np.empty(0, dtype=np.float64),
        packet_phase=float(phase),
        rx_epoch=float(epoch),
        snr_estimate=snr_db if snr_db is not None else math.inf,
    )


def run(cfg: ScenarioConfig) -> SimOutput:
    """Simulate a full scenario and reduce it to a TWCP series with truth."""
    root = np.random.SeedSequence([cfg.seed, 0x5157])
    draw_rng = np.random.default_rng(root.spawn(1)[0])
    awgn_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, cfg.channel.seed, 1]))
    sym_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
    rerand_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 3]))
    seed_root = cfg.seed * 1000 + 17

    clocks = {
        name: _build_clock(name, cfg.clocks[name], draw_rng, seed_root) for name in CLOCK_NAMES
    }
    events = schedule(cfg)
    sigma_phase = _phase_noise_sigma(cfg)
    f_c = cfg.phy.f_c

    x_records: list[tuple[PacketMeasurement, PacketMeasurement]] = []
    y_records: list[tuple[PacketMeasurement, PacketMeasurement]] = []
    truth: dict[float, tuple[float, float]] = {}
    symbol_errors = 0

    t_prev = 0.0
    for packet_id, (t, tx_name) in enumerate(events):
        dt = t - t_prev
        if dt > 0:
            clocks = {name: advance(state, dt) for name, state in clocks.items()}
        t_prev = t
        if cfg.rerandomize_tx:
            for name in TRANSMITTERS:
                clocks[name] = replace(
                    clocks[name],
                    phase0=float(rerand_rng.uniform(0.0, 2.0 * math.pi)),
                    offset=float(rerand_rng.uniform(0.0, 1e-4)),
                )

        distance = cfg.channel.base_distance + motion_position(cfg.channel.motion, t)
        delay = propagation_delay(distance, cfg.phy)
        local_site = "A" if tx_name == "X" else "B"
        remote_site = "B" if tx_name == "X" else "A"
        e_tx = wrap_phase(lo_phase_excess(clocks[tx_name], f_c))
        e_loc = wrap_phase(lo_phase_excess(clocks[local_site], f_c))
        e_rem = wrap_phase(lo_phase_excess(clocks[remote_site], f_c))

        if cfg.mode == "phase_domain":
            phi_loc = wrap_phase(e_tx - e_loc)
            phi_rem = wrap_phase(e_tx - 2.0 * math.pi * f_c * delay - e_rem)
            if sigma_phase > 0.0:
                phi_loc += awgn_rng.normal(0.0, sigma_phase)
                phi_rem += awgn_rng.normal(0.0, sigma_phase)
            pm_loc = _measurement(packet_id, tx_name, local_site, phi_loc, t, cfg.channel.snr_db)
            pm_rem = _measurement(
                packet_id, tx_name, remote_site, phi_rem, t + delay, cfg.channel.snr_db
            )
        else:
            symbols = sym_rng.integers(0, 16, cfg.phy.symbols_per_packet)
            frame = modulate(symbols, cfg.phy, carrier_phase=e_tx, start_epoch=t)
            local_channel = replace(cfg.channel, multipath_taps=())
            rx_loc = apply_channel(frame, 0.0, local_channel, cfg.phy, rng=awgn_rng)
            rx_rem = apply_channel(frame, delay, cfg.channel, cfg.phy, rng=awgn_rng)
            pm_loc = _demod(rx_loc, e_loc, cfg, packet_id, tx_name, local_site, 0)
            pm_rem = _demod(
                rx_rem,
                e_rem,
                cfg,
                packet_id,
                tx_name,
                remote_site,
                envelope_shift_samples(delay, cfg.phy.sample_rate),
            )
            symbol_errors += int(np.sum(pm_loc.symbols != symbols))
            symbol_errors += int(np.sum(pm_rem.symbols != symbols))

        (x_records if tx_name == "X" else y_records).append((pm_loc, pm_rem))
        truth[t] = (clocks["B"].offset - clocks["A"].offset, delay)

    if cfg.protocol_mode == "delayed_report":
        x_records, y_records = _apply_report_latency(x_records, y_records)

    series = twcp.process_stream(
        x_records,
        y_records,
        cfg.phy,
        window=cfg.pair_window,
        K=cfg.K,
        continuity_threshold=cfg.continuity_threshold,
    )
    epochs = series.epochs
    t_c_true = np.array([truth[e][0] for e in epochs])
    t_d_true = np.array([truth[e][1] for e in epochs])
    diagnostics = {
        "n_events": len(events),
        "dropped_count": series.dropped_count,
        "symbol_errors": symbol_errors,
        "mode": cfg.mode,
    }
    return SimOutput(
        twcp=series,
        truth_epochs=epochs,
        truth_t_c=t_c_true,
        truth_t_d=t_d_true,
        diagnostics=diagnostics,
    )


def _demod(rx: IqFrame, e_rx: float, cfg: ScenarioConfig, packet_id, tx, site, start_index):
    referenced = IqFrame(
        samples=rx.samples * np.exp(-1j * e_rx),
        sample_rate=rx.sample_rate,
        start_epoch=rx.start_epoch,
    )
    return demodulate_packet(
        referenced, cfg.phy, packet_id=packet_id, tx_site=tx, rx_site=site, start_index=start_index
    )


def _apply_report_latency(x_records, y_records):
    """Remote phases travel in the measuring site's next packet.

    A remote measurement with no subsequent transmission from its site is
    never reported; mark it invalid so the combiner drops that event.
    """

    def last_usable(records, opposite_last_epoch):
        out = []
        for local, remote in records:
            if local.rx_epoch >= opposite_last_epoch:
                remote = replace(remote, valid=False)
            out.append((local, remote))
        return out

    last_x = x_records[-1][0].rx_epoch if x_records else -math.inf
    last_y = y_records[-1][0].rx_epoch if y_records else -math.inf
    # X packets are measured at site B and reported in B's (Y) packets
    return last_usable(x_records, last_y), last_usable(y_records, last_x)


# ---------------------------------------------------------------------------
# scenario files


class ScenarioError(ValueError):
    pass


def _take(d: dict, known: dict, where: str) -> dict:
    unknown = set(d) - set(known)
    if unknown:
        raise ScenarioError(f"unknown key(s) {sorted(unknown)} in {where}")
    merged = dict(known)
    merged.update(d)
    return merged


def _clock_spec_from_dict(d: dict, where: str) -> ClockSpec:
    d = dict(d)
    preset = d.pop("preset", "ideal")
    if preset not in CLOCK_PRESETS:
        raise ScenarioError(f"unknown clock preset {preset!r} in {where}")
    base = CLOCK_PRESETS[preset]()
    fields_ = {
        "rate": base.rate,
        "rate_draw_sigma": base.rate_draw_sigma,
        "white_fm_sigma": base.white_fm_sigma,
        "rw_fm_sigma": base.rw_fm_sigma,
        "offset": base.offset,
        "phase0": base.phase0,
        "seed": base.seed,
    }
    merged = _take(d, fields_, where)
    return ClockSpec(**merged)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    data = dict(data)
    version = data.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")

    top = _take(
        data,
        {
            "seed": 0,
            "duration_s": 360.0,
            "tx_interval_s": 0.1,
            "tx_jitter_frac": 0.0,
            "mode": "phase_domain",
            "protocol_mode": "oracle",
            "phy": {},
            "channel": {},
            "clocks": {},
            "rerandomize_tx": False,
            "pair_window_s": 0.15,
            "continuity_threshold_s": None,
            "K": 0,
        },
        "scenario",
    )

    phy_d = _take(
        top["phy"] or {},
        {
            "f_c_hz": 2.4e9,
            "sample_rate_hz": 4e6,
            "chip_rate_hz": 2e6,
            "symbols_per_packet": 64,
        },
        "phy",
    )
    phy = PhyConfig(
        f_c=float(phy_d["f_c_hz"]),
        sample_rate=float(phy_d["sample_rate_hz"]),
        chip_rate=float(phy_d["chip_rate_hz"]),
        symbols_per_packet=int(phy_d["symbols_per_packet"]),
    )

    ch_d = _take(
        top["channel"] or {},
        {
            "base_distance_m": 0.40,
            "snr_db": 25.0,
            "multipath": [],
            "exact_delay": False,
            "seed": 0,
            "motion": {},
        },
        "channel",
    )
    motion_d = _take(ch_d["motion"] or {}, {"steps": [], "ramp_mps": 0.005}, "channel.motion")
    motion = MotionProfile(
        segments=tuple((float(t), float(dx)) for t, dx in motion_d["steps"]),
        ramp_mps=None if motion_d["ramp_mps"] is None else float(motion_d["ramp_mps"]),
    )
    channel = ChannelConfig(
        base_distance=float(ch_d["base_distance_m"]),
        snr_db=None if ch_d["snr_db"] is None else float(ch_d["snr_db"]),
        multipath_taps=tuple((float(dt), complex(re, im)) for dt, re, im in ch_d["multipath"]),
        seed=int(ch_d["seed"]),
        exact_delay=bool(ch_d["exact_delay"]),
        motion=motion,
    )

    clocks_d = top["clocks"] or {}
    unknown = set(clocks_d) - set(CLOCK_NAMES)
    if unknown:
        raise ScenarioError(f"unknown clock name(s) {sorted(unknown)} in clocks")
    defaults = _default_clocks()
    clocks = {
        name: _clock_spec_from_dict(clocks_d[name], f"clocks.{name}")
        if name in clocks_d
        else defaults[name]
        for name in CLOCK_NAMES
    }

    return ScenarioConfig(
        duration=float(top["duration_s"]),
        tx_interval=float(top["tx_interval_s"]),
        tx_jitter_frac=float(top["tx_jitter_frac"]),
        mode=str(top["mode"]),
        protocol_mode=str(top["protocol_mode"]),
        seed=int(top["seed"]),
        phy=phy,
        channel=channel,
        clocks=clocks,
        rerandomize_tx=bool(top["rerandomize_tx"]),
        pair_window=float(top["pair_window_s"]),
        continuity_threshold=(
            None if top["continuity_threshold_s"] is None else float(top["continuity_threshold_s"])
        ),
        K=int(top["K"]),
    )


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario file {path} must hold a mapping")
    return scenario_from_dict(data)
