from itertools import combinations

import numpy as np
import pytest

from winnow.hamming import (
    BlockLengthError,
    HammingParams,
    apply_privacy_maintenance,
    correction_position,
    parity_check_matrix,
    syndrome,
)


def pattern_block(n_h, positions):
    block = np.zeros(n_h, dtype=np.uint8)
    for p in positions:
        block[p - 1] = 1
    return block


def test_params_derived_fields():
    p = HammingParams(3)
    assert (p.n_h, p.n, p.k) == (7, 8, 4)
    assert p.pm_positions == (1, 2, 4)
    p = HammingParams(7)
    assert (p.n_h, p.n, p.k) == (127, 128, 120)
    assert len(p.pm_positions) == 7
    assert all(x & (x - 1) == 0 for x in p.pm_positions)


def test_params_rejects_small_m():
    with pytest.raises(ValueError):
        HammingParams(2)


def test_matrix_m3_literal():
    expected = np.array([
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ])
    assert np.array_equal(parity_check_matrix(HammingParams(3)), expected)


@pytest.mark.parametrize("m,col,bits", [
    (3, 5, (1, 0, 1)),
    (4, 9, (1, 0, 0, 1)),
])
def test_matrix_column_is_binary_column_number(m, col, bits):
    matrix = parity_check_matrix(HammingParams(m))
    assert tuple(matrix[:, col - 1]) == bits


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_matrix_columns_enumerate_all_positions(m):
    params = HammingParams(m)
    matrix = parity_check_matrix(params)
    weights = 1 << np.arange(m)
    values = (matrix * weights[:, None]).sum(axis=0)
    assert np.array_equal(values, np.arange(1, params.n_h + 1))


def test_syndrome_zero_block():
    assert syndrome(np.zeros(7, dtype=np.uint8), HammingParams(3)) == 0


def test_syndrome_single_position():
    assert syndrome(pattern_block(7, [5]), HammingParams(3)) == 5


def test_syndrome_two_positions():
    # direct contraction of positions 3 and 5: columns XOR to 6
    assert syndrome(pattern_block(7, [3, 5]), HammingParams(3)) == 6


@pytest.mark.parametrize("m", [3, 4, 5])
def test_syndrome_matches_matrix_contraction(m):
    params = HammingParams(m)
    matrix = parity_check_matrix(params)
    rng = np.random.default_rng(2024)
    weights = 1 << np.arange(m)
    for _ in range(50):
        block = rng.integers(0, 2, params.n_h, dtype=np.uint8)
        contraction = (matrix @ block) % 2
        assert syndrome(block, params) == int((contraction * weights).sum())


def test_syndrome_rejects_bad_length():
    with pytest.raises(BlockLengthError):
        syndrome(np.zeros(8, dtype=np.uint8), HammingParams(3))
    with pytest.raises(BlockLengthError):
        apply_privacy_maintenance(np.zeros(6, dtype=np.uint8), HammingParams(3))


def test_correction_position():
    assert correction_position(0) is None
    assert correction_position(5) == 5


@pytest.mark.parametrize("m", [3])
def test_correction_zeroes_syndrome_difference(m):
    params = HammingParams(m)
    rng = np.random.default_rng(99)
    for _ in range(200):
        a = rng.integers(0, 2, params.n_h, dtype=np.uint8)
        b = rng.integers(0, 2, params.n_h, dtype=np.uint8)
        s_d = syndrome(a, params) ^ syndrome(b, params)
        pos = correction_position(s_d)
        if pos is None:
            continue
        b = b.copy()
        b[pos - 1] ^= 1
        assert syndrome(a, params) ^ syndrome(b, params) == 0


def test_privacy_maintenance_m3():
    params = HammingParams(3)
    assert np.array_equal(
        apply_privacy_maintenance(np.ones(7, dtype=np.uint8), params),
        np.ones(4, dtype=np.uint8))
    assert np.array_equal(
        apply_privacy_maintenance(pattern_block(7, [1, 2, 4]), params),
        np.zeros(4, dtype=np.uint8))


def test_privacy_maintenance_m4_keeps_order():
    params = HammingParams(4)
    block = np.arange(15) % 2
    kept = apply_privacy_maintenance(block.astype(np.uint8), params)
    expected = [block[i] for i in range(15) if i + 1 not in (1, 2, 4, 8)]
    assert kept.tolist() == expected
    assert len(kept) == 11


@pytest.mark.parametrize("m", [3, 4, 5])
def test_single_error_correction_exhaustive(m):
    params = HammingParams(m)
    rng = np.random.default_rng(m)
    base = rng.integers(0, 2, params.n_h, dtype=np.uint8)
    for pos in range(1, params.n_h + 1):
        other = base.copy()
        other[pos - 1] ^= 1
        s_d = syndrome(base, params) ^ syndrome(other, params)
        assert s_d == pos
        other[s_d - 1] ^= 1
        assert np.array_equal(base, other)


@pytest.mark.parametrize("m", [3, 4])
def test_two_errors_always_detected(m):
    params = HammingParams(m)
    for p1, p2 in combinations(range(1, params.n_h + 1), 2):
        assert syndrome(pattern_block(params.n_h, [p1, p2]), params) != 0


@pytest.mark.parametrize("m", [3, 4])
def test_two_errors_become_three(m):
    params = HammingParams(m)
    for p1, p2 in combinations(range(1, params.n_h + 1), 2):
        block = pattern_block(params.n_h, [p1, p2])
        pos = correction_position(syndrome(block, params))
        block[pos - 1] ^= 1
        assert block.sum() == 3
        assert syndrome(block, params) == 0


def test_zero_syndrome_weight_census_m3():
    params = HammingParams(3)
    census = [0] * 8
    for weight in range(8):
        for pat in combinations(range(1, 8), weight):
            if syndrome(pattern_block(7, pat), params) == 0:
                census[weight] += 1
    assert census == [1, 0, 0, 7, 7, 0, 0, 1]
