from .detection import (
    DetectionReport,
    bpcer_at_apcer,
    candidate_thresholds,
    deer,
    det_curve,
    detection_report,
    error_rates,
)
from .distributions import ClassDensity, score_histograms, silverman_bandwidth
from .mds import MdsResult, classical_mds
from .vulnerability import (
    VulnerabilityReport,
    attack_acceptance_rate,
    fmr_at,
    fnmr_at,
    mmpmr,
    rmmr,
    threshold_at_fmr,
    vulnerability_report,
)

__all__ = [
    "ClassDensity", "DetectionReport", "MdsResult", "VulnerabilityReport",
    "attack_acceptance_rate", "bpcer_at_apcer", "candidate_thresholds",
    "classical_mds", "deer", "det_curve", "detection_report", "error_rates",
    "fmr_at", "fnmr_at", "mmpmr", "rmmr", "score_histograms",
    "silverman_bandwidth", "threshold_at_fmr", "vulnerability_report",
]
