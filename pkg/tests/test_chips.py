import numpy as np
import pytest

from wiwi.chips import CHIP_TABLE, CHIPS_PER_SYMBOL, N_SYMBOLS, chip_sequence


def test_shape_and_binary():
    assert CHIP_TABLE.shape == (N_SYMBOLS, CHIPS_PER_SYMBOL) == (16, 32)
    assert set(np.unique(CHIP_TABLE)) <= {0, 1}


def test_symbol_zero_sequence():
    expected = [int(c) for c in "11011001110000110101001000101110"]
    assert chip_sequence(0).tolist() == expected


def test_rows_1_to_7_are_cyclic_shifts():
    # each successive row is the previous one cyclically right-shifted by 4
    for s in range(1, 8):
        assert np.array_equal(CHIP_TABLE[s], np.roll(CHIP_TABLE[s - 1], 4))


def test_rows_8_to_15_invert_odd_chips():
    flip = np.zeros(32, dtype=np.uint8)
    flip[1::2] = 1
    for s in range(8):
        assert np.array_equal(CHIP_TABLE[s + 8], CHIP_TABLE[s] ^ flip)


def test_rows_distinct_and_balanced_correlation():
    # all 16 sequences are distinct
    assert len({row.tobytes() for row in CHIP_TABLE}) == 16
    # +-1 cross-correlations are low relative to the autocorrelation (32)
    bipolar = CHIP_TABLE.astype(np.int64) * 2 - 1
    gram = bipolar @ bipolar.T
    off_diag = gram[~np.eye(16, dtype=bool)]
    assert np.all(np.diag(gram) == 32)
    assert np.max(np.abs(off_diag)) <= 8


def test_table_immutable():
    with pytest.raises(ValueError):
        CHIP_TABLE[0, 0] = 1


@pytest.mark.parametrize("bad", [-1, 16, 3.5, "7"])
def test_invalid_symbol_rejected(bad):
    with pytest.raises((ValueError, TypeError)):
        chip_sequence(bad)
