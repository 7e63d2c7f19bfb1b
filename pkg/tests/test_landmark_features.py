import numpy as np
import pytest

from madkit.core import LandmarkSet, MadkitError
from madkit.features import ANGLE_PAIRS, landmark_features, normalize_landmarks


def canonical_face(seed=0):
    """68 points in normalized units with eyes exactly at (-0.5,0)/(0.5,0)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.2, 1.2, (68, 2))
    pts[36:42] = np.array([-0.5, 0.0]) + 0.0  # collapse eye region to center
    pts[36] = (-0.6, 0.05)
    pts[37] = (-0.55, -0.05)
    pts[38] = (-0.45, -0.05)
    pts[39] = (-0.4, 0.05)
    pts[40] = (-0.45, 0.03)
    pts[41] = (-0.55, 0.02)
    right = pts[36:42].copy()
    pts[42:48] = -right[:, :] * (1, -1) * -1  # mirror across x=0
    pts[42:48, 0] = -right[:, 0][::-1]
    pts[42:48, 1] = right[:, 1][::-1]
    # force exact centers at (-0.5, 0) and (0.5, 0)
    pts[36:42] -= pts[36:42].mean(axis=0) - (-0.5, 0.0)
    pts[42:48] -= pts[42:48].mean(axis=0) - (0.5, 0.0)
    return pts


def test_identical_sets_zero_features():
    lm = LandmarkSet(canonical_face(), scheme="dlib68")
    assert np.all(landmark_features(lm, lm, "distances") == 0.0)
    assert np.all(landmark_features(lm, lm, "angles") == 0.0)


def test_rotation_about_eye_midpoint_cancels():
    pts = canonical_face(1)
    theta = np.deg2rad(10.0)
    rot = np.array([[np.cos(theta), -np.sin(theta)],
                    [np.sin(theta), np.cos(theta)]])
    mid = (pts[36:42].mean(axis=0) + pts[42:48].mean(axis=0)) / 2.0
    rotated = (pts - mid) @ rot.T + mid
    lm = LandmarkSet(pts, scheme="dlib68")
    lm_rot = LandmarkSet(rotated, scheme="dlib68")
    d = landmark_features(lm, lm_rot, "distances")
    assert np.max(d) <= 1e-9


def test_similarity_transform_cancels_scale_and_shift():
    pts = canonical_face(2)
    moved = pts * 180.0 + np.array([300.0, 400.0])
    d = landmark_features(LandmarkSet(pts, scheme="dlib68"),
                          LandmarkSet(moved, scheme="dlib68"), "distances")
    assert np.max(d) <= 1e-9


def test_single_perturbation_yields_single_distance():
    pts = canonical_face(3)
    probe = pts.copy()
    probe[30] += (0.1, 0.0)  # nose tip, not an eye landmark
    d = landmark_features(LandmarkSet(pts, scheme="dlib68"),
                          LandmarkSet(probe, scheme="dlib68"), "distances")
    assert abs(d[30] - 0.1) < 1e-12
    others = np.delete(d, 30)
    assert np.max(others) < 1e-12


def test_angle_features_dimension_and_wrap():
    assert len(ANGLE_PAIRS) == 59
    pts = canonical_face(4)
    probe = pts.copy()
    probe[0] += (0.0, 0.2)
    a = landmark_features(LandmarkSet(pts, scheme="dlib68"),
                          LandmarkSet(probe, scheme="dlib68"), "angles")
    assert a.shape == (59,)
    assert np.all(a > -np.pi) and np.all(a <= np.pi)
    assert np.count_nonzero(np.abs(a) > 1e-12) == 1  # only pair (0, 1) moves


def test_scheme_mismatch_and_mode_errors():
    lm = LandmarkSet(canonical_face(), scheme="dlib68")
    other = LandmarkSet(canonical_face(), scheme="dlib68x")
    with pytest.raises(MadkitError, match="scheme"):
        landmark_features(lm, other)
    with pytest.raises(MadkitError, match="mode"):
        landmark_features(lm, lm, "curvature")


def test_normalize_puts_eyes_at_canonical_positions(rng):
    pts = canonical_face(5) * 77.0 + rng.uniform(-40, 40, 2)
    norm = normalize_landmarks(LandmarkSet(pts, scheme="dlib68"))
    assert np.allclose(norm[36:42].mean(axis=0), (-0.5, 0.0), atol=1e-12)
    assert np.allclose(norm[42:48].mean(axis=0), (0.5, 0.0), atol=1e-12)
