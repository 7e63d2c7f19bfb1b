"""Platt sigmoid calibration of SVM decision values.

Fits P(attack | f) = 1 / (1 + exp(A*f + B)) by regularized maximum
likelihood with the usual prior-count targets t+ = (N+ + 1)/(N+ + 2) and
t- = 1/(N- + 2), solved by a damped Newton iteration. The probability is
increasing in f exactly when A < 0, which is the orientation the fit
produces whenever attacks score higher than bona fide samples.
"""

from __future__ import annotations

import numpy as np

from ..core.errors import MadkitError

MAX_ITER = 200
MIN_STEP = 1e-10
SIGMA = 1e-12  # Hessian ridge
EPS = 1e-12


def fit_sigmoid(decision_values, is_attack, max_iter: int = MAX_ITER
                ) -> tuple[float, float, bool]:
    """Returns (A, B, degenerate).

    ``degenerate`` is set when the decision values carry no signal (all
    equal); the fallback sigmoid then maps the common value to 0.5 with
    unit slope so downstream scoring still works.
    """
    f = np.asarray(decision_values, dtype=np.float64)
    pos = np.asarray(is_attack, dtype=bool)
    if f.ndim != 1 or f.shape != pos.shape:
        raise MadkitError("decision values and labels must be 1-D and aligned")
    n_pos = int(pos.sum())
    n_neg = int(len(pos) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise MadkitError("calibration requires both classes")

    if np.ptp(f) == 0.0:
        return -1.0, float(f[0]), True

    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(pos, hi, lo)

    a = 0.0
    b = float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = _objective(f, t, a, b)
    for _ in range(max_iter):
        z = a * f + b
        p = _stable_sigmoid(-z)  # P(attack | f)
        d1 = t - p
        d2 = p * (1.0 - p)
        g_a = float(np.dot(d1, f))
        g_b = float(d1.sum())
        if max(abs(g_a), abs(g_b)) < 1e-10:
            break
        h_aa = float(np.dot(d2, f * f)) + SIGMA
        h_bb = float(d2.sum()) + SIGMA
        h_ab = float(np.dot(d2, f))
        det = h_aa * h_bb - h_ab * h_ab
        da = -(h_bb * g_a - h_ab * g_b) / det
        db = -(h_aa * g_b - h_ab * g_a) / det
        gd = g_a * da + g_b * db
        step = 1.0
        while step >= MIN_STEP:
            a_new = a + step * da
            b_new = b + step * db
            f_new = _objective(f, t, a_new, b_new)
            if f_new < fval + 1e-4 * step * gd:
                a, b, fval = a_new, b_new, f_new
                break
            step /= 2.0
        else:
            break
    return a, b, False


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    nonneg = z >= 0
    out[nonneg] = 1.0 / (1.0 + np.exp(-z[nonneg]))
    ez = np.exp(z[~nonneg])
    out[~nonneg] = ez / (1.0 + ez)
    return out


def _objective(f, t, a, b):
    # cross-entropy written in the numerically-stable log1p(exp) form
    z = a * f + b
    pos_z = np.maximum(z, 0.0)
    return float(np.sum(t * z + pos_z - z + np.log1p(np.exp(-np.abs(z)))))


def apply_sigmoid(decision_values, a: float, b: float) -> np.ndarray:
    z = a * np.asarray(decision_values, dtype=np.float64) + b
    return _stable_sigmoid(-z)
