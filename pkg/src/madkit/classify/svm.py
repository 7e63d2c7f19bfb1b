"""RBF-kernel soft-margin SVM trained with sequential minimal optimization.

Working pairs are chosen by the maximal-violator / second-order heuristic;
exact ties are broken by a seeded random permutation of the sample
indices, which makes training deterministic for a given seed. The dual
problem solved is

    max  sum(a) - 0.5 * a' Q a,   Q_ij = y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0

with K(x, z) = exp(-gamma * ||x - z||^2).
"""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError
from .calibration import fit_sigmoid
from .model import MadModel

log = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class SvmParams:
    C: float = 1.0
    gamma: float | str = "auto"  # "auto" = 1 / (dim * variance of X)
    tol: float = 1e-3
    max_iter: int = 200_000
    cache_rows: int = 1024
    calibration_holdout: float = 0.0  # fraction held out for sigmoid fitting

    def __post_init__(self):
        if self.C <= 0:
            raise MadkitError("C must be positive")
        if isinstance(self.gamma, str):
            if self.gamma != "auto":
                raise MadkitError(f"gamma must be positive or 'auto', got {self.gamma!r}")
        elif self.gamma <= 0:
            raise MadkitError("gamma must be positive")
        if self.tol <= 0:
            raise MadkitError("tolerance must be positive")
        if not 0.0 <= self.calibration_holdout < 0.9:
            raise MadkitError("calibration_holdout must be in [0, 0.9)")


def resolve_gamma(gamma, X: np.ndarray) -> float:
    if gamma == "auto":
        var = float(X.var())
        if var <= 0:
            return 1.0 / X.shape[1]
        return 1.0 / (X.shape[1] * var)
    return float(gamma)


def rbf_kernel(X: np.ndarray, Z: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.sum(X * X, axis=1)[:, None] + np.sum(Z * Z, axis=1)[None, :]
          - 2.0 * X @ Z.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


class KernelCache:
    """Fixed-size LRU over kernel rows; recomputation is deterministic."""

    def __init__(self, X: np.ndarray, gamma: float, max_rows: int = 1024):
        self.X = X
        self.gamma = gamma
        self.sq = np.sum(X * X, axis=1)
        self.max_rows = max(1, max_rows)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        row = self._rows.get(i)
        if row is not None:
            self._rows.move_to_end(i)
            return row
        d = self.sq[i] + self.sq - 2.0 * (self.X @ self.X[i])
        np.maximum(d, 0.0, out=d)
        row = np.exp(-self.gamma * d)
        self._rows[i] = row
        if len(self._rows) > self.max_rows:
            self._rows.popitem(last=False)
        return row


def _pick(values: np.ndarray, mask: np.ndarray, rank: np.ndarray, largest: bool):
    """Arg-best under a mask; exact ties go to the lowest seeded rank."""
    idx = np.flatnonzero(mask)
    sub = values[idx]
    best = sub.max() if largest else sub.min()
    ties = idx[sub == best]
    return int(ties[np.argmin(rank[ties])]), float(best)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    gamma: float
    iterations: int
    converged: bool
    gap: float
    objective: float


def smo_solve(X: np.ndarray, y: np.ndarray, params: SvmParams, seed: int = 0) -> SmoResult:
    n = len(X)
    C = params.C
    gamma = resolve_gamma(params.gamma, X)
    cache = KernelCache(X, gamma, params.cache_rows)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - sum(a)
    rank = np.empty(n, dtype=np.int64)
    rank[np.random.default_rng(seed).permutation(n)] = np.arange(n)

    pos = y > 0
    iterations = 0
    m = M = 0.0
    stalls = 0
    for iterations in range(1, params.max_iter + 1):
        yg = -y * grad
        up = (pos & (alpha < C - TAU)) | (~pos & (alpha > TAU))
        low = (pos & (alpha > TAU)) | (~pos & (alpha < C - TAU))
        if not up.any() or not low.any():
            m, M = 0.0, 0.0
            break
        i, m = _pick(yg, up, rank, largest=True)
        _, M = _pick(yg, low, rank, largest=False)
        if m - M <= params.tol:
            break

        Ki = cache.row(i)
        cand = low & (yg < m)
        quad = np.maximum(2.0 - 2.0 * Ki, TAU)  # K_ii = K_tt = 1 for RBF
        gain = -((m - yg) ** 2) / quad
        j, _ = _pick(gain, cand, rank, largest=False)
        Kj = cache.row(j)

        yi, yj = y[i], y[j]
        ai_old, aj_old = alpha[i], alpha[j]
        eta = max(2.0 - 2.0 * Ki[j], TAU)
        u_i = yi * (grad[i] + 1.0)
        u_j = yj * (grad[j] + 1.0)
        e_diff = (u_i - yi) - (u_j - yj)
        aj_new = aj_old + yj * e_diff / eta
        if yi != yj:
            L = max(0.0, aj_old - ai_old)
            H = min(C, C + aj_old - ai_old)
        else:
            L = max(0.0, ai_old + aj_old - C)
            H = min(C, ai_old + aj_old)
        aj_new = min(max(aj_new, L), H)
        ai_new = ai_old + yi * yj * (aj_old - aj_new)

        d_i = ai_new - ai_old
        d_j = aj_new - aj_old
        if abs(d_j) < 1e-15 and abs(d_i) < 1e-15:
            stalls += 1
            if stalls > 64:
                break
            continue
        stalls = 0
        alpha[i] = ai_new
        alpha[j] = aj_new
        grad += y * (yi * d_i * Ki + yj * d_j * Kj)
    else:
        log.warning("SMO hit max_iter=%d with gap %.3g", params.max_iter, m - M)

    converged = (m - M) <= params.tol
    bias = (m + M) / 2.0
    objective = 0.5 * (alpha.sum() - float(alpha @ grad))
    return SmoResult(alpha=alpha, bias=bias, gamma=gamma, iterations=iterations,
                     converged=converged, gap=m - M, objective=objective)


def dual_objective(X: np.ndarray, y: np.ndarray, alpha: np.ndarray,
                   gamma: float) -> float:
    """sum(a) - 0.5 a'Qa, computed directly (for small problems / checks)."""
    Q = rbf_kernel(X, X, gamma) * np.outer(y, y)
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def kkt_violations(X: np.ndarray, y: np.ndarray, alpha: np.ndarray, bias: float,
                   gamma: float, C: float) -> np.ndarray:
    """Per-sample KKT violation magnitudes for a converged solution.

    alpha=0    requires y*f >= 1, violation max(0, 1 - y*f)
    0<alpha<C  requires y*f == 1, violation |y*f - 1|
    alpha=C    requires y*f <= 1, violation max(0, y*f - 1)
    """
    K = rbf_kernel(X, X, gamma)
    f = K @ (alpha * y) + bias
    yf = y * f
    out = np.empty(len(X))
    at_zero = alpha <= TAU
    at_c = alpha >= C - TAU
    free = ~(at_zero | at_c)
    out[at_zero] = np.maximum(0.0, 1.0 - yf[at_zero])
    out[free] = np.abs(yf[free] - 1.0)
    out[at_c] = np.maximum(0.0, yf[at_c] - 1.0)
    return out


def train(X, y, params: SvmParams = SvmParams(), seed: int = 0,
          extractor: str = "unknown", standardize: bool = False) -> MadModel:
    """Train the MAD classifier: SMO-optimized RBF-SVM plus Platt sigmoid.

    ``y`` holds -1 for bona fide and +1 for attack samples. With
    ``params.calibration_holdout`` > 0, that seeded stratified fraction
    is excluded from SVM training and used only to fit the sigmoid.
    ``standardize`` fits an elementwise (x - mean) / std transform on the
    training features and stores it in the model; the default is raw
    difference features.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise MadkitError("X must be (n, d) with matching labels")
    if not np.all(np.isfinite(X)):
        raise MadkitError("non-finite feature value in training data")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise MadkitError("labels must be -1 (bona fide) or +1 (attack)")
    if len(np.unique(y)) < 2:
        raise MadkitError("training data contains a single class")

    feat_mean = feat_std = None
    if standardize:
        feat_mean = X.mean(axis=0)
        feat_std = X.std(axis=0)
        feat_std = np.where(feat_std > 0, feat_std, 1.0)
        X = (X - feat_mean) / feat_std

    if params.calibration_holdout > 0:
        rng = np.random.default_rng(seed + 1)
        hold = np.zeros(len(y), dtype=bool)
        for cls in (-1.0, 1.0):
            idx = np.flatnonzero(y == cls)
            k = max(1, int(round(params.calibration_holdout * len(idx))))
            if k >= len(idx):
                raise MadkitError("calibration holdout leaves no training data")
            hold[rng.choice(idx, size=k, replace=False)] = True
        X_fit, y_fit = X[~hold], y[~hold]
        X_cal, y_cal = X[hold], y[hold]
        if len(np.unique(y_fit)) < 2:
            raise MadkitError("calibration holdout removed a whole class")
    else:
        X_fit, y_fit = X, y
        X_cal, y_cal = X, y

    result = smo_solve(X_fit, y_fit, params, seed=seed)
    sv_mask = result.alpha > TAU
    if not sv_mask.any():
        raise MadkitError("training produced no support vectors")
    support = X_fit[sv_mask]
    dual_coef = (result.alpha * y_fit)[sv_mask]

    K_cal = rbf_kernel(X_cal, support, result.gamma)
    decisions = K_cal @ dual_coef + result.bias
    sigmoid_a, sigmoid_b, degenerate = fit_sigmoid(decisions, y_cal > 0)

    metadata = {
        "feature_dim": int(X.shape[1]),
        "extractor": extractor,
        "seed": int(seed),
        "C": params.C,
        "gamma_setting": params.gamma if isinstance(params.gamma, str) else float(params.gamma),
        "tol": params.tol,
        "n_train": int(len(X_fit)),
        "n_calibration": int(len(X_cal)),
        "calibration_holdout": params.calibration_holdout,
        "calibration_degenerate": bool(degenerate),
        "standardized": bool(standardize),
        "smo_iterations": int(result.iterations),
        "smo_converged": bool(result.converged),
        "smo_gap": float(result.gap),
        "dual_objective": float(result.objective),
    }
    return MadModel(support_vectors=support, dual_coef=dual_coef,
                    bias=result.bias, gamma=result.gamma,
                    sigmoid_a=sigmoid_a, sigmoid_b=sigmoid_b,
                    feature_mean=feat_mean, feature_std=feat_std,
                    metadata=metadata)
