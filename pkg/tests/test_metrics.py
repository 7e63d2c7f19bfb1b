import numpy as np
import pytest

from madkit.core import EmptyClassError, MadkitError, ScoreSet
from madkit.metrics import (
    attack_acceptance_rate,
    bpcer_at_apcer,
    deer,
    det_curve,
    detection_report,
    error_rates,
    fnmr_at,
    mmpmr,
    rmmr,
    threshold_at_fmr,
    vulnerability_report,
)
from oracles import (
    oracle_bpcer_at_apcer,
    oracle_deer,
    oracle_error_rates,
    oracle_mmpmr,
    oracle_threshold_at_fmr,
    trapezoid_auc,
)


def test_error_rates_examples():
    s = ScoreSet.from_classes([0.1, 0.2], [0.8, 0.9])
    assert error_rates(s, 0.5) == (0.0, 0.0)
    assert error_rates(s, -1e9) == (0.0, 1.0)
    assert error_rates(s, 1e9) == (1.0, 0.0)


def test_error_rates_ties_count_as_attack_classified():
    s = ScoreSet.from_classes([0.5], [0.5])
    apcer, bpcer = error_rates(s, 0.5)
    assert apcer == 0.0  # attack at threshold classified as attack
    assert bpcer == 1.0  # bona fide at threshold classified as attack


def test_error_rates_random_vs_oracle(rng):
    bona = rng.normal(0.4, 0.15, 100)
    attack = rng.normal(0.6, 0.15, 100)
    s = ScoreSet.from_classes(bona, attack)
    got = error_rates(s, 0.5)
    want = oracle_error_rates(bona, attack, 0.5)
    assert got == want


def test_deer_examples():
    assert deer(ScoreSet.from_classes([0.1, 0.2, 0.3], [0.7, 0.8, 0.9]))[0] == 0.0
    vals = [0.2, 0.4, 0.6, 0.8]
    assert deer(ScoreSet.from_classes(vals, list(vals)))[0] == 0.5


def test_deer_random_vs_oracle(rng):
    for _ in range(20):
        nb = int(rng.integers(3, 500))
        na = int(rng.integers(3, 500))
        bona = np.round(rng.normal(0.45, 0.2, nb), 3)
        attack = np.round(rng.normal(0.55, 0.2, na), 3)
        got_e, got_t = deer(ScoreSet.from_classes(bona, attack))
        want_e, want_t = oracle_deer(bona, attack)
        assert abs(got_e - want_e) <= 1e-9
        assert abs(got_t - want_t) <= 1e-9


def test_deer_crossing_property(rng):
    bona = rng.normal(0.4, 0.2, 250)
    attack = rng.normal(0.6, 0.2, 250)
    s = ScoreSet.from_classes(bona, attack)
    e, tau = deer(s)
    apcer, bpcer = error_rates(s, tau)
    step = 1.0 / min(len(bona), len(attack))
    assert abs(apcer - bpcer) <= step + 1e-12


def test_bpcer_at_apcer_examples(rng):
    disjoint = ScoreSet.from_classes([0.1, 0.2, 0.3], [0.7, 0.8, 0.9])
    assert bpcer_at_apcer(disjoint, 0.10)[0] == 0.0
    v = rng.uniform(0, 1, 400)
    same = ScoreSet.from_classes(v, v.copy())
    b, _ = bpcer_at_apcer(same, 0.10)
    assert abs(b - 0.90) <= 1.0 / 400 + 1e-12


def test_bpcer_at_apcer_random_vs_oracle(rng):
    for _ in range(15):
        bona = rng.normal(0.4, 0.2, int(rng.integers(5, 300)))
        attack = rng.normal(0.6, 0.2, int(rng.integers(5, 300)))
        got = bpcer_at_apcer(ScoreSet.from_classes(bona, attack), 0.10)
        want = oracle_bpcer_at_apcer(bona, attack, 0.10)
        assert abs(got[0] - want[0]) <= 1e-9
        assert abs(got[1] - want[1]) <= 1e-9


def test_bpcer_target_validation():
    s = ScoreSet.from_classes([0.1], [0.9])
    with pytest.raises(MadkitError):
        bpcer_at_apcer(s, 0.0)


def test_threshold_at_fmr_uniform_and_edges(rng):
    imp = rng.uniform(0, 1, 1000)
    tau = threshold_at_fmr(imp, 0.001)
    assert tau == oracle_threshold_at_fmr(imp, 0.001)
    top2 = np.sort(imp)[-2:]
    assert top2[0] < tau <= top2[1]
    assert threshold_at_fmr(imp, 1.0) == -np.inf
    same = np.full(64, 0.25)
    tau = threshold_at_fmr(same, 0.001)
    assert tau > 0.25 and np.mean(same >= tau) == 0.0


def test_threshold_at_fmr_random_vs_oracle(rng):
    for _ in range(15):
        imp = np.round(rng.normal(0, 1, int(rng.integers(5, 500))), 2)
        for target in (0.001, 0.01, 0.1, 0.5):
            assert threshold_at_fmr(imp, target) == \
                oracle_threshold_at_fmr(imp, target)


def test_mmpmr_examples_and_oracle(rng):
    groups = {"m1": {"a": [0.9], "b": [0.8]}, "m2": {"a": [0.9], "b": [0.7]}}
    assert mmpmr(groups, 0.5) == 1.0
    low = {k: {**v, "blocked": [0.1]} for k, v in groups.items()}
    assert mmpmr(low, 0.5) == 0.0
    for _ in range(10):
        rnd = {f"m{i}": {f"s{j}": rng.uniform(0, 1, int(rng.integers(1, 4))).tolist()
                         for j in range(int(rng.integers(1, 3)) + 1)}
               for i in range(20)}
        tau = float(rng.uniform(0.2, 0.8))
        assert mmpmr(rnd, tau) == oracle_mmpmr(rnd, tau)


def test_mmpmr_monotone_in_threshold(rng):
    groups = {f"m{i}": {"a": rng.uniform(0, 1, 3).tolist(),
                        "b": rng.uniform(0, 1, 2).tolist()} for i in range(30)}
    values = [mmpmr(groups, t) for t in np.linspace(0, 1, 21)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_mmpmr_empty_errors():
    with pytest.raises(EmptyClassError):
        mmpmr({}, 0.5)
    with pytest.raises(EmptyClassError):
        mmpmr({"m": {}}, 0.5)
    with pytest.raises(EmptyClassError):
        mmpmr({"m": {"a": []}}, 0.5)


def test_rmmr_identity_and_range():
    assert rmmr(0.93, 0.0) == 0.93
    assert rmmr(0.0, 0.05) == 0.05
    assert rmmr(0.4, 0.25) == 0.65
    with pytest.raises(MadkitError):
        rmmr(1.2, 0.0)
    with pytest.raises(MadkitError):
        rmmr(0.5, -0.1)


def test_det_curve_endpoints_monotone_and_auc(rng):
    bona = rng.normal(0.4, 0.2, 150)
    attack = rng.normal(0.6, 0.2, 150)
    s = ScoreSet.from_classes(bona, attack)
    curve = det_curve(s)
    assert curve[0].tolist() == [0.0, 1.0]
    assert curve[-1].tolist() == [1.0, 0.0]
    assert np.all(np.diff(curve[:, 0]) >= 0)
    assert np.all(np.diff(curve[:, 1]) <= 0)
    # AUC against an independent trapezoid over a dense resample
    auc = trapezoid_auc(curve[:, 0], curve[:, 1])
    xs = np.linspace(0, 1, 4001)
    ys = np.interp(xs, curve[:, 0], curve[:, 1])
    dense = trapezoid_auc(xs, ys)
    assert abs(auc - dense) < 5e-3


def test_disjoint_curve_touches_origin():
    s = ScoreSet.from_classes([0.1, 0.2], [0.8, 0.9])
    curve = det_curve(s)
    assert any(np.all(row == 0.0) for row in curve)


def test_metric_invariance_under_monotone_transform(rng):
    bona = rng.normal(0.4, 0.2, 200)
    attack = rng.normal(0.7, 0.2, 180)
    s = ScoreSet.from_classes(bona, attack)

    def warp(v):
        return np.exp(3.0 * v) + 0.1 * v

    s2 = ScoreSet.from_classes(warp(bona), warp(attack))
    assert abs(deer(s)[0] - deer(s2)[0]) < 1e-9
    assert abs(bpcer_at_apcer(s, 0.1)[0] - bpcer_at_apcer(s2, 0.1)[0]) < 1e-9


def test_empty_class_errors():
    with pytest.raises(EmptyClassError):
        deer(ScoreSet.from_classes([], [0.5]))
    with pytest.raises(EmptyClassError):
        error_rates(ScoreSet.from_classes([0.5], []), 0.5)
    with pytest.raises(EmptyClassError):
        threshold_at_fmr([], 0.001)


def test_vulnerability_report_identity(rng):
    genuine = rng.uniform(0.6, 1.0, 200)
    impostor = rng.uniform(0.0, 0.45, 2000)
    groups = {f"m{i}": {"a": [float(rng.uniform(0.5, 1.0))],
                        "b": [float(rng.uniform(0.5, 1.0))]} for i in range(25)}
    report = vulnerability_report(genuine, impostor, groups, fmr_target=0.001)
    assert report.rmmr == report.mmpmr + report.fnmr
    assert report.fnmr == fnmr_at(genuine, report.threshold)
    assert 0.0 <= report.per_comparison_rate <= 1.0
    flat = [v for g in groups.values() for vals in g.values() for v in vals]
    assert report.per_comparison_rate == attack_acceptance_rate(flat, report.threshold)


def test_detection_report_consistency(rng):
    bona = rng.normal(0.3, 0.15, 120)
    attack = rng.normal(0.7, 0.15, 120)
    s = ScoreSet.from_classes(bona, attack)
    report = detection_report(s)
    assert report.deer == deer(s)[0]
    assert report.bpcer10 == bpcer_at_apcer(s, 0.10)[0]
    assert np.all(np.diff(report.thresholds) > 0)
