"""Face-recognition vulnerability metrics over higher-is-match scores.

A comparison score at or above the decision threshold counts as a match
(same tie rule as the detection metrics).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import EmptyClassError, MadkitError


def threshold_at_fmr(impostor_scores, target: float = 0.001) -> float:
    """Smallest threshold whose false match rate is at or below ``target``.

    Candidates are -inf, the midpoints between consecutive distinct
    scores, and the value just above the maximum; target 1.0 therefore
    returns -inf (everything matches).
    """
    scores = np.sort(np.asarray(impostor_scores, dtype=np.float64))
    if len(scores) == 0:
        raise EmptyClassError("no impostor scores")
    if not 0.0 <= target <= 1.0:
        raise MadkitError(f"target FMR must be in [0, 1], got {target}")
    v = np.unique(scores)
    mids = (v[:-1] + v[1:]) / 2.0
    taus = np.concatenate([[-np.inf], mids, [np.nextafter(v[-1], np.inf)]])
    n = len(scores)
    budget = target * n + 1e-12
    for tau in taus:
        matches = n - np.searchsorted(scores, tau, side="left")
        if matches <= budget:
            return float(tau)
    return float(taus[-1])


def fmr_at(impostor_scores, threshold: float) -> float:
    scores = np.asarray(impostor_scores, dtype=np.float64)
    if len(scores) == 0:
        raise EmptyClassError("no impostor scores")
    return float(np.mean(scores >= threshold))


def fnmr_at(genuine_scores, threshold: float) -> float:
    scores = np.asarray(genuine_scores, dtype=np.float64)
    if len(scores) == 0:
        raise EmptyClassError("no genuine scores")
    return float(np.mean(scores < threshold))


def mmpmr(attack_groups: dict, threshold: float) -> float:
    """Mated-morph presentation match rate, min-max convention.

    ``attack_groups`` maps morph id -> {subject id -> [scores]}. A morph
    is accepted when every contributing subject has at least one probe
    matching: min over subjects of (max over that subject's scores) >=
    threshold.
    """
    if not attack_groups:
        raise EmptyClassError("no morph attack groups")
    accepted = 0
    for morph_id, per_subject in attack_groups.items():
        if not per_subject:
            raise EmptyClassError(f"morph '{morph_id}' has no contributors")
        best_per_subject = []
        for subject_id, values in per_subject.items():
            values = np.asarray(values, dtype=np.float64)
            if len(values) == 0:
                raise EmptyClassError(
                    f"morph '{morph_id}' contributor '{subject_id}' has no scores")
            best_per_subject.append(values.max())
        if min(best_per_subject) >= threshold:
            accepted += 1
    return accepted / len(attack_groups)


def attack_acceptance_rate(attack_scores, threshold: float) -> float:
    """Per-comparison convention: fraction of attack scores that match."""
    scores = np.asarray(attack_scores, dtype=np.float64)
    if len(scores) == 0:
        raise EmptyClassError("no attack scores")
    return float(np.mean(scores >= threshold))


def rmmr(mmpmr_value: float, fnmr: float) -> float:
    """RMMR = MMPMR + FNMR (equivalently 1 + MMPMR - TMR)."""
    if not 0.0 <= mmpmr_value <= 1.0:
        raise MadkitError(f"MMPMR must be in [0, 1], got {mmpmr_value}")
    if not 0.0 <= fnmr <= 1.0:
        raise MadkitError(f"FNMR must be in [0, 1], got {fnmr}")
    return mmpmr_value + fnmr


@dataclass(frozen=True)
class VulnerabilityReport:
    threshold: float
    fmr: float
    fnmr: float
    mmpmr: float
    rmmr: float
    per_comparison_rate: float


def vulnerability_report(genuine_scores, impostor_scores, attack_groups: dict,
                         fmr_target: float = 0.001) -> VulnerabilityReport:
    tau = threshold_at_fmr(impostor_scores, fmr_target)
    fnmr = fnmr_at(genuine_scores, tau)
    accepted = mmpmr(attack_groups, tau)
    flat = [v for per_subject in attack_groups.values()
            for values in per_subject.values() for v in np.atleast_1d(values)]
    return VulnerabilityReport(
        threshold=tau,
        fmr=fmr_at(impostor_scores, tau),
        fnmr=fnmr,
        mmpmr=accepted,
        rmmr=rmmr(accepted, fnmr),
        per_comparison_rate=attack_acceptance_rate(flat, tau),
    )
