"""Landmark displacement and angle-difference features.

Both landmark sets are first normalized by the similarity transform that
puts the eye centers at (-0.5, 0) and (+0.5, 0), i.e. inter-eye distance
1.0, which cancels translation, rotation and scale between capture
geometries.
"""

from __future__ import annotations

import numpy as np

from ..core.errors import MadkitError
from ..core.types import LandmarkSet
from ..morph.engine import DLIB68_GROUPS

RIGHT_EYE = slice(36, 42)
LEFT_EYE = slice(42, 48)

# consecutive landmark pairs within each facial component group
ANGLE_PAIRS = tuple(
    (i, i + 1)
    for lo, hi in DLIB68_GROUPS.values()
    for i in range(lo, hi - 1)
)


def _face_points(lm: LandmarkSet) -> np.ndarray:
    pts = lm.points[:-8] if lm.augmented else lm.points
    if len(pts) != 68:
        raise MadkitError(
            f"landmark features require the 68-point scheme, got {len(pts)} points")
    return pts


def normalize_landmarks(lm: LandmarkSet) -> np.ndarray:
    """Similarity-normalized 68x2 coordinates, eyes at (-0.5,0)/(+0.5,0)."""
    pts = _face_points(lm)
    eye_a = pts[RIGHT_EYE].mean(axis=0)
    eye_b = pts[LEFT_EYE].mean(axis=0)
    d = eye_b - eye_a
    norm2 = float(d @ d)
    if norm2 == 0.0:
        raise MadkitError("eye centers coincide; cannot normalize")
    rot = np.array([[d[0], d[1]], [-d[1], d[0]]]) / norm2
    mid = (eye_a + eye_b) / 2.0
    return (pts - mid) @ rot.T


def landmark_features(lm_ref: LandmarkSet, lm_probe: LandmarkSet,
                      mode: str = "distances") -> np.ndarray:
    """68 per-landmark displacements or 59 segment-angle differences."""
    if lm_ref.scheme != lm_probe.scheme:
        raise MadkitError(
            f"landmark schemes differ: {lm_ref.scheme} vs {lm_probe.scheme}")
    ref = normalize_landmarks(lm_ref)
    probe = normalize_landmarks(lm_probe)
    if mode == "distances":
        return np.linalg.norm(ref - probe, axis=1)
    if mode == "angles":
        out = np.empty(len(ANGLE_PAIRS))
        for idx, (p, q) in enumerate(ANGLE_PAIRS):
            ang_ref = np.arctan2(ref[q, 1] - ref[p, 1], ref[q, 0] - ref[p, 0])
            ang_probe = np.arctan2(probe[q, 1] - probe[p, 1],
                                   probe[q, 0] - probe[p, 0])
            out[idx] = _wrap_angle(ang_ref - ang_probe)
        return out
    raise MadkitError(f"mode must be 'distances' or 'angles', got {mode!r}")


def _wrap_angle(theta: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    return -((-theta + np.pi) % (2.0 * np.pi) - np.pi)
