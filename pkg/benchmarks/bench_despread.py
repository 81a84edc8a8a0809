"""Benchmark the compiled despreading kernel against the numpy fallback.

Run from the repo root:  python benchmarks/bench_despread.py
"""

import time

import numpy as np

from wiwi import _kernels
from wiwi.phy import PhyConfig, _gated_references, modulate


def _make_stream(n_sym, seed=0):
    cfg = PhyConfig()
    rng = np.random.default_rng(seed)
    frame = modulate(rng.integers(0, 16, n_sym), cfg, carrier_phase=0.4)
    noise = 0.05 * (
        rng.standard_normal(frame.samples.size)
        + 1j * rng.standard_normal(frame.samples.size)
    )
    return frame.samples + noise, cfg


def _time(fn, stream, refs, period, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(stream, refs, period)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    cfg = PhyConfig()
    refs = _gated_references(cfg.samples_per_chip)[0]
    print(f"compiled kernel available: {_kernels.HAVE_COMPILED}")
    print(f"{'symbols':>8} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for n_sym in (64, 512, 4096):
        stream, _ = _make_stream(n_sym)
        t_np = _time(_kernels.despread_numpy, stream, refs, cfg.samples_per_symbol, 5)
        if _kernels.HAVE_COMPILED:
            t_cy = _time(_kernels.despread, stream, refs, cfg.samples_per_symbol, 5)
            print(
                f"{n_sym:>8} {t_np * 1e3:>12.3f} {t_cy * 1e3:>14.3f} "
                f"{t_np / t_cy:>8.2f}x"
            )
        else:
            print(f"{n_sym:>8} {t_np * 1e3:>12.3f} {'-':>14} {'-':>8}")


if __name__ == "__main__":
    main()
