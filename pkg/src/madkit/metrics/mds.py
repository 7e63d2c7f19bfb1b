"""Classical (Torgerson) multidimensional scaling.

Squared Euclidean distances are double-centered and the top eigenpairs
give the coordinates. The sign of each output axis is fixed so its first
nonzero coordinate is positive, making the embedding deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError

SIGN_TOL = 1e-12


@dataclass(frozen=True)
class MdsResult:
    coords: np.ndarray
    eigenvalues: np.ndarray
    rank_deficient: bool


def classical_mds(vectors, dims: int = 2) -> MdsResult:
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2:
        raise MadkitError(f"expected (n, d) feature matrix, got shape {X.shape}")
    n = len(X)
    if n < dims + 1:
        raise MadkitError(f"need at least {dims + 1} vectors for {dims}-D MDS, got {n}")

    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)

    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ d2 @ j
    b = (b + b.T) / 2.0
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1][:dims]
    top = evals[order]

    pos_tol = max(abs(evals).max(), 1.0) * 1e-12
    coords = np.zeros((n, dims))
    usable = 0
    for k, (lam, col) in enumerate(zip(top, evecs[:, order].T)):
        if lam > pos_tol:
            coords[:, k] = col * np.sqrt(lam)
            usable += 1
    rank_deficient = usable < dims

    for k in range(dims):
        nz = np.flatnonzero(np.abs(coords[:, k]) > SIGN_TOL)
        if len(nz) and coords[nz[0], k] < 0:
            coords[:, k] = -coords[:, k]
    return MdsResult(coords=coords, eigenvalues=top, rank_deficient=rank_deficient)
