from .calibration import apply_sigmoid, fit_sigmoid
from .model import MadModel, load_model, save_model
from .svm import (
    KernelCache,
    SmoResult,
    SvmParams,
    dual_objective,
    kkt_violations,
    rbf_kernel,
    resolve_gamma,
    smo_solve,
    train,
)

__all__ = [
    "KernelCache", "MadModel", "SmoResult", "SvmParams", "apply_sigmoid",
    "dual_objective", "fit_sigmoid", "kkt_violations", "load_model",
    "rbf_kernel", "resolve_gamma", "save_model", "smo_solve", "train",
]
