"""Pure-numpy despreading kernel (fallback when the Cython build is absent)."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def despread(samples: np.ndarray, refs: np.ndarray, period: int) -> tuple[np.ndarray, np.ndarray]:
    """Correlate consecutive symbol windows against all candidate references.

    samples: complex baseband stream, one packet.
    refs: (16, W) candidate reference waveforms; windows advance by
    `period` samples and W may exceed `period` (the O-QPSK Q-branch tail).

    Returns (symbols, corrs): per-window argmax |corr| index and its
    complex correlation value.
    """
    width = refs.shape[1]
    n_sym = (samples.shape[0] - (width - period)) // period
    if n_sym < 1:
        raise ValueError("frame shorter than one symbol window")
    windows = sliding_window_view(samples, width)[::period][:n_sym]
    corr_all = windows @ refs.conj().T
    symbols = np.argmax(np.abs(corr_all), axis=1)
    corrs = corr_all[np.arange(n_sym), symbols]
    return symbols.astype(np.int64), np.ascontiguousarray(corrs)
