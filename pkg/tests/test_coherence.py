import math

import numpy as np
import pytest

from olscert.coherence import (MeasurementMatrix, block_coherence, coherence, profile,
                               sub_coherence, welch_bound)
from olscert.errors import DimensionMismatch

from oracles import block_coherence_pairs, coherence_pairs, sub_coherence_pairs


def gaussian(M, N, seed, d=1):
    return MeasurementMatrix.from_array(np.random.default_rng(seed).normal(size=(M, N)), d)


def test_from_array_normalizes():
    D = MeasurementMatrix.from_array(np.array([[3.0, 0.0], [4.0, 2.0]]))
    np.testing.assert_allclose(np.linalg.norm(D.mat, axis=0), 1.0, atol=1e-15)
    np.testing.assert_allclose(D.mat[:, 0], [0.6, 0.8])


def test_constructor_rejects_unnormalized():
    with pytest.raises(ValueError):
        MeasurementMatrix(np.array([[2.0, 0.0], [0.0, 1.0]]))


def test_zero_column_rejected():
    with pytest.raises(ValueError):
        MeasurementMatrix.from_array(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_block_len_must_divide():
    with pytest.raises(DimensionMismatch):
        gaussian(4, 6, 0, d=4)


def test_matrix_is_read_only():
    D = gaussian(3, 5, 0)
    with pytest.raises(ValueError):
        D.mat[0, 0] = 1.0


def test_coherence_orthonormal_is_zero():
    assert coherence(MeasurementMatrix(np.eye(4))) == 0.0


def test_coherence_duplicate_columns():
    a = np.array([1.0, 2.0, 2.0]) / 3
    D = MeasurementMatrix.from_array(np.column_stack([a, np.eye(3)[:, 1], a]))
    assert coherence(D) == pytest.approx(1.0)


def test_coherence_three_vectors_in_plane():
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    assert coherence(MeasurementMatrix.from_array(A)) == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize("seed", range(3))
def test_coherence_matches_pairwise_oracle(seed):
    D = gaussian(8, 12, seed)
    assert coherence(D) == pytest.approx(coherence_pairs(D.mat), rel=1e-14)


def test_block_coherence_d1_equals_coherence():
    D = gaussian(8, 12, 3)
    assert block_coherence(D) == pytest.approx(coherence(D), rel=1e-14)


def test_block_coherence_orthogonal_blocks():
    assert block_coherence(MeasurementMatrix(np.eye(6), 2)) == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_block_coherence_matches_oracle(seed):
    D = gaussian(8, 12, seed, d=2)
    assert block_coherence(D) == pytest.approx(block_coherence_pairs(D.mat, 2), rel=1e-9)


def test_sub_coherence_cases():
    assert sub_coherence(gaussian(8, 12, 0)) == 0.0
    assert sub_coherence(MeasurementMatrix(np.eye(6), 3)) == 0.0
    D = gaussian(8, 12, 5, d=3)
    assert sub_coherence(D) == pytest.approx(sub_coherence_pairs(D.mat, 3), rel=1e-14)


def test_welch_bound_values():
    assert welch_bound(16, 16) == 0.0
    assert welch_bound(128, 256) == pytest.approx(math.sqrt(128 / 32640), rel=1e-14)
    assert welch_bound(128, 256) == pytest.approx(0.062622, abs=1e-6)
    assert welch_bound(1, 2) == 1.0
    with pytest.raises(ValueError):
        welch_bound(5, 4)


def test_profile_conventions():
    D = gaussian(10, 20, 1)
    p = profile(D)
    assert p.mu_block == p.mu and p.nu == 0.0
    assert set(p.as_dict()) == {"mu", "mu_block", "nu", "welch"}


@pytest.mark.parametrize("seed", range(10))
def test_invariants_random(seed):
    D = gaussian(12, 24, seed, d=3)
    p = profile(D)
    assert 0 <= p.mu <= 1
    assert p.mu >= p.welch
    assert p.mu_block >= p.mu / 3 - 1e-15
    # permuting blocks and columns inside blocks leaves everything unchanged
    r = np.random.default_rng(seed + 100)
    order = np.concatenate([b * 3 + r.permutation(3) for b in r.permutation(8)])
    q = profile(MeasurementMatrix(D.mat[:, order], 3))
    assert q.mu == pytest.approx(p.mu, rel=1e-12)
    assert q.mu_block == pytest.approx(p.mu_block, rel=1e-12)
    assert q.nu == pytest.approx(p.nu, rel=1e-12)
