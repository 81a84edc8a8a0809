"""IEEE 802.15.4 2450 MHz O-QPSK symbol-to-chip mapping.

The 16 rows below are the normative 32-chip pseudo-noise sequences of the
2450 MHz DSSS PHY (IEEE Std 802.15.4, "Symbol-to-chip mapping" table for
the O-QPSK PHY), listed chip c0 first. Rows 1-7 are cyclic right-shifts
of row 0 by 4 chips each; rows 8-15 repeat rows 0-7 with the odd-indexed
(Q-branch) chips inverted. Both structural facts are asserted by tests.
"""

from __future__ import annotations

import numpy as np

_CHIP_STRINGS = (
    "11011001110000110101001000101110",
    "11101101100111000011010100100010",
    "00101110110110011100001101010010",
    "00100010111011011001110000110101",
    "01010010001011101101100111000011",
    "00110101001000101110110110011100",
    "11000011010100100010111011011001",
    "10011100001101010010001011101101",
    "10001100100101100000011101111011",
    "10111000110010010110000001110111",
    "01111011100011001001011000000111",
    "01110111101110001100100101100000",
    "00000111011110111000110010010110",
    "01100000011101111011100011001001",
    "10010110000001110111101110001100",
    "11001001011000000111011110111000",
)

CHIP_TABLE = np.array([[int(c) for c in row] for row in _CHIP_STRINGS], dtype=np.uint8)
CHIP_TABLE.setflags(write=False)

N_SYMBOLS = 16
CHIPS_PER_SYMBOL = 32


def chip_sequence(symbol: int) -> np.ndarray:
    """32-chip sequence (0/1 entries) for a data symbol in [0, 15]."""
    if not 0 <= int(symbol) <= 15 or int(symbol) != symbol:
        raise ValueError(f"symbol must be an integer in [0, 15], got {symbol!r}")
    return CHIP_TABLE[int(symbol)]
