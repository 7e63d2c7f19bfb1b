import numpy as np
import pytest

from madkit.classify import (
    SvmParams,
    dual_objective,
    kkt_violations,
    rbf_kernel,
    resolve_gamma,
    smo_solve,
    train,
)
from madkit.core import MadkitError
from oracles import dual_active_set


def random_problem(rng, n_max=5, d_max=3):
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    X = rng.normal(0, 1, (n, d))
    y = np.ones(n)
    k = int(rng.integers(1, n))
    y[rng.choice(n, size=k, replace=False)] = -1.0
    return X, y


def test_two_point_problem_symmetry():
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    y = np.array([1.0, -1.0])
    res = smo_solve(X, y, SvmParams(C=1.0, gamma=1.0), seed=0)
    assert np.all(res.alpha > 0)  # both are support vectors
    K = rbf_kernel(X, X, 1.0)
    f = K @ (res.alpha * y) + res.bias
    assert np.sign(f[0]) == 1.0 and np.sign(f[1]) == -1.0


def test_xor_layout_separates_with_rbf():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    res = smo_solve(X, y, SvmParams(C=10.0, gamma=1.0), seed=0)
    f = rbf_kernel(X, X, 1.0) @ (res.alpha * y) + res.bias
    assert np.all(np.sign(f) == y)


def test_small_problems_match_active_set_oracle(rng):
    worst = 0.0
    for trial in range(60):
        X, y = random_problem(rng)
        C = float(rng.choice([0.5, 1.0, 10.0]))
        gamma = float(rng.uniform(0.2, 2.0))
        res = smo_solve(X, y, SvmParams(C=C, gamma=gamma, tol=1e-6), seed=trial)
        got = dual_objective(X, y, res.alpha, gamma)
        want = dual_active_set(X, y, C, gamma)
        worst = max(worst, want - got)
    assert worst < 1e-6


def test_kkt_conditions_and_equality_constraint(rng):
    for trial in range(10):
        n = int(rng.integers(10, 60))
        X = rng.normal(0, 1, (n, 3))
        y = np.where(X[:, 0] + 0.3 * rng.normal(0, 1, n) > 0, 1.0, -1.0)
        if len(np.unique(y)) < 2:
            continue
        C = float(rng.choice([0.5, 1.0, 10.0]))
        res = smo_solve(X, y, SvmParams(C=C, gamma=0.7), seed=trial)
        assert res.converged
        assert abs(float(res.alpha @ y)) <= 1e-9
        viol = kkt_violations(X, y, res.alpha, res.bias, 0.7, C)
        assert viol.max() <= 1e-3


def test_deterministic_given_seed(rng):
    X = rng.normal(0, 1, (40, 4))
    y = np.where(rng.uniform(0, 1, 40) > 0.5, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    a = smo_solve(X, y, SvmParams(), seed=3)
    b = smo_solve(X, y, SvmParams(), seed=3)
    assert np.array_equal(a.alpha, b.alpha) and a.bias == b.bias


def test_train_input_validation(rng):
    X = rng.normal(0, 1, (10, 2))
    with pytest.raises(MadkitError, match="single class"):
        train(X, np.ones(10))
    with pytest.raises(MadkitError, match="non-finite"):
        bad = X.copy()
        bad[0, 0] = np.nan
        train(bad, np.concatenate([np.ones(5), -np.ones(5)]))
    with pytest.raises(MadkitError, match="labels"):
        train(X, np.concatenate([np.ones(5), np.zeros(5)]))


def test_gamma_auto_matches_definition(rng):
    X = rng.normal(0, 2, (30, 6))
    assert resolve_gamma("auto", X) == 1.0 / (6 * X.var())
    assert resolve_gamma(0.25, X) == 0.25


def test_relabel_flip_maps_scores(rng):
    X = rng.normal(0, 1, (30, 3))
    y = np.where(X[:, 0] > 0, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    params = SvmParams(tol=1e-8)
    model_a = train(X, y, params, seed=0)
    model_b = train(X, -y, params, seed=0)
    s_a = model_a.score_batch(X)
    s_b = model_b.score_batch(X)
    assert np.max(np.abs(s_b - (1.0 - s_a))) <= 1e-6


def test_scoring_training_attack_point_above_half(rng):
    X = np.vstack([rng.normal(-2, 0.3, (20, 2)), rng.normal(2, 0.3, (20, 2))])
    y = np.concatenate([-np.ones(20), np.ones(20)])
    model = train(X, y, SvmParams(), seed=0)
    assert model.score(X[-1]) > 0.5
    assert model.score(X[0]) < 0.5


def test_calibration_holdout_flag(rng):
    X = np.vstack([rng.normal(-1, 0.5, (30, 2)), rng.normal(1, 0.5, (30, 2))])
    y = np.concatenate([-np.ones(30), np.ones(30)])
    model = train(X, y, SvmParams(calibration_holdout=0.25), seed=1)
    assert model.metadata["n_calibration"] < len(X)
    assert model.metadata["n_train"] + model.metadata["n_calibration"] == len(X)


def test_standardize_flag_persists_transform(rng, tmp_path):
    from madkit.classify import load_model, save_model
    X = np.vstack([rng.normal(-1, 0.5, (20, 2)), rng.normal(1, 0.5, (20, 2))])
    X[:, 1] *= 100.0
    y = np.concatenate([-np.ones(20), np.ones(20)])
    model = train(X, y, SvmParams(), seed=0, standardize=True)
    assert model.feature_mean is not None
    path = tmp_path / "m.json"
    save_model(model, path)
    again = load_model(path)
    probe = rng.normal(0, 1, 2)
    assert again.score(probe) == model.score(probe)
