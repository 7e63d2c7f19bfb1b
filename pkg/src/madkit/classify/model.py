"""Trained MAD classifier: state, scoring and persistence.

The model file is a versioned JSON container. Arrays are stored as
base64 of their little-endian float64 bytes, so a save/load round trip
is bit-exact and scores are reproduced identically.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core.errors import MadkitError, ModelFormatError
from .calibration import apply_sigmoid

MODEL_FORMAT = "madkit-model/1"


@dataclass(frozen=True)
class MadModel:
    support_vectors: np.ndarray  # (m, d), stored in standardized space if used
    dual_coef: np.ndarray        # alpha_i * y_i, (m,)
    bias: float
    gamma: float
    sigmoid_a: float
    sigmoid_b: float
    feature_mean: np.ndarray | None = None  # optional input standardization
    feature_std: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        sv = np.ascontiguousarray(self.support_vectors, dtype=np.float64)
        dc = np.ascontiguousarray(self.dual_coef, dtype=np.float64)
        if sv.ndim != 2 or dc.shape != (len(sv),):
            raise MadkitError("support vectors and dual coefficients misaligned")
        sv.setflags(write=False)
        dc.setflags(write=False)
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "dual_coef", dc)
        if (self.feature_mean is None) != (self.feature_std is None):
            raise MadkitError("feature_mean and feature_std must be set together")
        if self.feature_mean is not None:
            mean = np.ascontiguousarray(self.feature_mean, dtype=np.float64)
            std = np.ascontiguousarray(self.feature_std, dtype=np.float64)
            if mean.shape != (sv.shape[1],) or std.shape != (sv.shape[1],):
                raise MadkitError("standardizer shape does not match feature dim")
            object.__setattr__(self, "feature_mean", mean)
            object.__setattr__(self, "feature_std", std)

    @property
    def dim(self) -> int:
        return self.support_vectors.shape[1]

    def decision_value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise MadkitError(f"feature dim {x.shape} does not match model dim {self.dim}")
        if self.feature_mean is not None:
            x = (x - self.feature_mean) / self.feature_std
        diff = self.support_vectors - x
        k = np.exp(-self.gamma * np.sum(diff * diff, axis=1))
        return float(k @ self.dual_coef + self.bias)

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return np.array([self.decision_value(X)])
        # row-by-row so batch scoring is bit-identical to one-by-one
        return np.array([self.decision_value(x) for x in X])

    def score(self, x: np.ndarray) -> float:
        return float(apply_sigmoid(self.decision_value(x), self.sigmoid_a,
                                   self.sigmoid_b))

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        return apply_sigmoid(self.decision_values(X), self.sigmoid_a,
                             self.sigmoid_b)


def _encode_array(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype="<f8")
    return {"shape": list(arr.shape),
            "data": base64.b64encode(data.tobytes()).decode("ascii")}


def _decode_array(obj, name: str) -> np.ndarray:
    try:
        raw = base64.b64decode(obj["data"], validate=True)
        arr = np.frombuffer(raw, dtype="<f8").astype(np.float64)
        return arr.reshape(obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model: bad array '{name}' ({exc})") from None


def save_model(model: MadModel, path) -> None:
    if len(model.support_vectors) == 0:
        raise MadkitError("refusing to save a model with zero support vectors")
    doc = {
        "format": MODEL_FORMAT,
        "bias": model.bias,
        "gamma": model.gamma,
        "sigmoid": [model.sigmoid_a, model.sigmoid_b],
        "support_vectors": _encode_array(model.support_vectors),
        "dual_coef": _encode_array(model.dual_coef),
        "metadata": model.metadata,
    }
    if model.feature_mean is not None:
        doc["feature_mean"] = _encode_array(model.feature_mean)
        doc["feature_std"] = _encode_array(model.feature_std)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True),
                          encoding="utf-8")


def load_model(path) -> MadModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt model: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(
            f"unsupported model format {doc.get('format')!r}, "
            f"expected {MODEL_FORMAT!r}")
    try:
        sigmoid = doc["sigmoid"]
        mean = std = None
        if "feature_mean" in doc:
            mean = _decode_array(doc["feature_mean"], "feature_mean")
            std = _decode_array(doc["feature_std"], "feature_std")
        model = MadModel(
            support_vectors=_decode_array(doc["support_vectors"], "support_vectors"),
            dual_coef=_decode_array(doc["dual_coef"], "dual_coef"),
            bias=float(doc["bias"]),
            gamma=float(doc["gamma"]),
            sigmoid_a=float(sigmoid[0]),
            sigmoid_b=float(sigmoid[1]),
            feature_mean=mean,
            feature_std=std,
            metadata=dict(doc.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ModelFormatError(f"corrupt model: {exc}") from None
    if len(model.support_vectors) == 0:
        raise ModelFormatError("corrupt model: zero support vectors")
    return model
