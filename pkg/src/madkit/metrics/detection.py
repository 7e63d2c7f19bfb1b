"""Detection error metrics over higher-is-attack score sets.

Tie convention, used consistently everywhere: a score exactly at the
threshold counts as attack-classified (>= threshold). APCER is the
fraction of attack scores below the threshold, BPCER the fraction of
bona fide scores at or above it. Candidate thresholds for the sweeps are
all distinct scores, the midpoints between consecutive distinct scores,
and sentinels below the minimum / above the maximum score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import EmptyClassError, MadkitError
from ..core.types import Orientation, ScoreSet


def _classes(scores: ScoreSet) -> tuple[np.ndarray, np.ndarray]:
    if scores.orientation != Orientation.HIGHER_IS_ATTACK:
        raise MadkitError("detection metrics need higher-is-attack orientation")
    bona = np.sort(scores.bona_fide)
    attack = np.sort(scores.attack)
    if len(bona) == 0:
        raise EmptyClassError("no bona fide scores")
    if len(attack) == 0:
        raise EmptyClassError("no attack scores")
    return bona, attack


def error_rates(scores: ScoreSet, threshold: float) -> tuple[float, float]:
    """(APCER, BPCER) at a fixed decision threshold."""
    bona, attack = _classes(scores)
    apcer = float(np.searchsorted(attack, threshold, side="left")) / len(attack)
    below = int(np.searchsorted(bona, threshold, side="left"))
    bpcer = float(len(bona) - below) / len(bona)
    return apcer, bpcer


def candidate_thresholds(values: np.ndarray) -> np.ndarray:
    """Distinct values, their midpoints and below/above sentinels."""
    v = np.unique(values)
    mids = (v[:-1] + v[1:]) / 2.0
    lo = v[0] - 1.0
    hi = v[-1] + 1.0
    return np.unique(np.concatenate([[lo], v, mids, [hi]]))


def _sweep(scores: ScoreSet):
    bona, attack = _classes(scores)
    taus = candidate_thresholds(np.concatenate([bona, attack]))
    apcer = np.searchsorted(attack, taus, side="left") / len(attack)
    bpcer = (len(bona) - np.searchsorted(bona, taus, side="left")) / len(bona)
    return taus, apcer, bpcer


def deer(scores: ScoreSet) -> tuple[float, float]:
    """Detection equal error rate and its threshold.

    The sweep finds where APCER - BPCER changes sign; at an exact zero
    the common rate is returned, otherwise the two bracketing operating
    points are linearly interpolated (the interpolated APCER and BPCER
    are equal by construction).
    """
    taus, apcer, bpcer = _sweep(scores)
    diff = apcer - bpcer  # non-decreasing in the threshold
    idx = int(np.searchsorted(diff >= 0.0, True))
    if diff[idx] == 0.0:
        return float(apcer[idx]), float(taus[idx])
    d_lo = diff[idx - 1]
    d_hi = diff[idx]
    t = d_lo / (d_lo - d_hi)
    eer = float(apcer[idx - 1] + t * (apcer[idx] - apcer[idx - 1]))
    tau = float(taus[idx - 1] + t * (taus[idx] - taus[idx - 1]))
    return eer, tau


def bpcer_at_apcer(scores: ScoreSet, target: float = 0.10) -> tuple[float, float]:
    """BPCER at the APCER budget: the highest threshold keeping APCER <= target.

    Stated examples pin this operating point (identical score
    distributions give BPCER close to 1 - target); sweeping from the
    other end would always return the degenerate BPCER = 1.
    """
    if not 0.0 < target < 1.0:
        raise MadkitError(f"target must be in (0, 1), got {target}")
    taus, apcer, bpcer = _sweep(scores)
    ok = np.flatnonzero(apcer <= target)
    idx = int(ok[-1])  # apcer is non-decreasing, index 0 always qualifies
    return float(bpcer[idx]), float(taus[idx])


def det_curve(scores: ScoreSet) -> np.ndarray:
    """(APCER, BPCER) staircase, one row per candidate threshold.

    Includes the (0, 1) and (1, 0) endpoints from the sentinels.
    """
    _, apcer, bpcer = _sweep(scores)
    return np.column_stack([apcer, bpcer])


@dataclass(frozen=True)
class DetectionReport:
    deer: float
    deer_threshold: float
    bpcer10: float
    bpcer10_threshold: float
    thresholds: np.ndarray
    apcer: np.ndarray
    bpcer: np.ndarray


def detection_report(scores: ScoreSet, bpcer_target: float = 0.10) -> DetectionReport:
    taus, apcer, bpcer = _sweep(scores)
    eer, eer_tau = deer(scores)
    b10, b10_tau = bpcer_at_apcer(scores, bpcer_target)
    return DetectionReport(deer=eer, deer_threshold=eer_tau, bpcer10=b10,
                           bpcer10_threshold=b10_tau, thresholds=taus,
                           apcer=apcer, bpcer=bpcer)
