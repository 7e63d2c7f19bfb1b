import numpy as np
import pytest

from madkit.core import MadkitError
from madkit.metrics import classical_mds


def pairwise(coords):
    n = len(coords)
    return np.array([np.linalg.norm(coords[i] - coords[j])
                     for i in range(n) for j in range(i + 1, n)])


def test_equilateral_triangle_reconstruction():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    result = classical_mds(pts, dims=2)
    assert np.max(np.abs(pairwise(result.coords) - 1.0)) <= 1e-9
    assert not result.rank_deficient


def test_full_rank_2d_isometry(rng):
    X = rng.normal(0, 3, (25, 2))
    result = classical_mds(X, dims=2)
    assert np.max(np.abs(pairwise(result.coords) - pairwise(X))) <= 1e-9


def test_duplicated_point_coincides(rng):
    X = rng.normal(0, 1, (8, 4))
    X[5] = X[2]
    result = classical_mds(X, dims=2)
    assert np.linalg.norm(result.coords[5] - result.coords[2]) <= 1e-9


def test_output_centered(rng):
    X = rng.normal(10, 2, (30, 6)) + 40.0
    result = classical_mds(X, dims=2)
    assert np.max(np.abs(result.coords.mean(axis=0))) <= 1e-9


def test_rank_deficient_padded_and_flagged():
    X = np.array([[0.0], [1.0], [2.0], [5.0]])  # 1-D data, rank 1
    result = classical_mds(X, dims=2)
    assert result.rank_deficient
    assert np.all(result.coords[:, 1] == 0.0)
    assert np.max(np.abs(pairwise(result.coords) - pairwise(X))) <= 1e-9


def test_deterministic_sign_convention(rng):
    X = rng.normal(0, 1, (12, 5))
    a = classical_mds(X, dims=2).coords
    b = classical_mds(X, dims=2).coords
    assert np.array_equal(a, b)
    for k in range(2):
        nz = np.flatnonzero(np.abs(a[:, k]) > 1e-12)
        assert a[nz[0], k] > 0


def test_too_few_vectors():
    with pytest.raises(MadkitError, match="at least 3"):
        classical_mds(np.zeros((2, 4)), dims=2)
