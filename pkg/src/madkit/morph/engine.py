"""Landmark-driven face morphing and its inverse (demorphing).

The morph interpolates landmark geometry with weight ``alpha`` on the
first subject, triangulates the interpolated landmarks, warps each
triangle from both sources and blends the warped pixels with the same
alpha. Two optional post-steps approximate the quality-diversity of
other morphing tools: pasting key regions of the first image over the
morph, and replacing everything outside the face hull with the first
image's original background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError
from ..core.types import LandmarkSet
from .delaunay import delaunay
from .warp import affine_from_triangles, bilinear_sample, triangle_pixels

# Index ranges of the 68-point landmark convention, [start, stop).
DLIB68_GROUPS = {
    "jaw": (0, 17),
    "right_brow": (17, 22),
    "left_brow": (22, 27),
    "nose_bridge": (27, 31),
    "nose_lower": (31, 36),
    "right_eye": (36, 42),
    "left_eye": (42, 48),
    "outer_lip": (48, 60),
    "inner_lip": (60, 68),
}


@dataclass(frozen=True)
class MorphParams:
    """Blend weight of subject A plus optional artefact-hiding steps."""

    alpha: float = 0.5
    reblend_regions: bool = False
    replace_background: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise MadkitError(f"alpha={self.alpha} outside [0, 1]")


def interpolate_points(a: np.ndarray, b: np.ndarray, alpha: float) -> np.ndarray:
    """alpha*a + (1-alpha)*b, exact where a == b."""
    blend = alpha * a + (1.0 - alpha) * b
    return np.where(a == b, a, blend)


def _check_pair(img_a, img_b, lm_a: LandmarkSet, lm_b: LandmarkSet):
    if img_a.shape != img_b.shape:
        raise MadkitError(f"image dimensions differ: {img_a.shape} vs {img_b.shape}")
    if lm_a.scheme != lm_b.scheme:
        raise MadkitError(f"landmark schemes differ: {lm_a.scheme} vs {lm_b.scheme}")
    if len(lm_a) != len(lm_b):
        raise MadkitError(f"landmark counts differ: {len(lm_a)} vs {len(lm_b)}")
    if not lm_a.augmented:
        raise MadkitError("landmarks must be augmented with border points first")


def _warp_mesh(images, landmark_arrays, target: np.ndarray, shape):
    """Warp each image from its landmarks onto the target geometry.

    All images share one destination mesh and one pixel-ownership mask
    (first triangle in canonical order wins shared edges), so the warped
    layers stay pixel-aligned. Accumulators start as copies of the
    sources, which leaves any uncovered pixel at its original value.
    """
    mesh = delaunay(target)
    h, w = shape[:2]
    accs = [img.astype(np.float64) for img in images]
    written = np.zeros((h, w), dtype=bool)
    for tri in mesh.triangles:
        dst = target[tri]
        xs, ys = triangle_pixels(dst, w, h)
        if len(xs):
            free = ~written[ys, xs]
            xs, ys = xs[free], ys[free]
            written[ys, xs] = True
        if not len(xs):
            continue
        for img, lm_pts, acc in zip(images, landmark_arrays, accs):
            mat = affine_from_triangles(lm_pts[tri], dst)
            if mat is None:
                continue
            src_x = mat[0, 0] * xs + mat[0, 1] * ys + mat[0, 2]
            src_y = mat[1, 0] * xs + mat[1, 1] * ys + mat[1, 2]
            acc[ys, xs] = bilinear_sample(img, src_x, src_y)
    return accs


def morph(img_a: np.ndarray, img_b: np.ndarray, lm_a: LandmarkSet,
          lm_b: LandmarkSet, params: MorphParams) -> np.ndarray:
    _check_pair(img_a, img_b, lm_a, lm_b)
    alpha = params.alpha
    target = interpolate_points(lm_a.points, lm_b.points, alpha)
    acc_a, acc_b = _warp_mesh((img_a, img_b), (lm_a.points, lm_b.points),
                              target, img_a.shape)
    blended = alpha * acc_a + (1.0 - alpha) * acc_b
    out = np.clip(np.rint(blended), 0, 255).astype(np.uint8)

    if params.reblend_regions:
        warped_a = np.clip(np.rint(acc_a), 0, 255).astype(np.uint8)
        mask = _key_region_mask(target, img_a.shape)
        out[mask] = warped_a[mask]
    if params.replace_background:
        face = _hull_mask(_face_points(target, lm_a), img_a.shape)
        out[~face] = img_a[~face]
    return out


def demorph(reference: np.ndarray, lm_ref: LandmarkSet, probe: np.ndarray,
            lm_probe: LandmarkSet, factor: float) -> tuple[np.ndarray, LandmarkSet]:
    """Subtract the probe's contribution from a possibly morphed reference.

    Geometry is extrapolated away from the probe by ``factor`` and pixels
    are inverted as (R - factor*P) / (1 - factor). Returns the demorphed
    image together with its landmark set.
    """
    _check_pair(reference, probe, lm_ref, lm_probe)
    if not 0.0 <= factor < 1.0:
        raise MadkitError(f"demorph factor must be in [0, 1), got {factor}")
    r = lm_ref.points
    p = lm_probe.points
    target = np.where(r == p, r, r + factor * (r - p))
    acc_r, acc_p = _warp_mesh((reference, probe), (r, p), target, reference.shape)
    demorphed = (acc_r - factor * acc_p) / (1.0 - factor)
    out = np.clip(np.rint(demorphed), 0, 255).astype(np.uint8)
    return out, LandmarkSet(target, scheme=lm_ref.scheme)


def _face_points(target: np.ndarray, lm: LandmarkSet) -> np.ndarray:
    # strip the border augmentation, keep the facial landmarks
    n_face = len(target) - 8 if lm.augmented else len(target)
    return target[:n_face]


def _key_region_mask(target: np.ndarray, shape) -> np.ndarray:
    """Eyes, nostrils and a hair band above the brows, in target geometry."""
    if len(target) - 8 < 68:
        raise MadkitError("region re-blend requires the 68-point scheme")
    mask = np.zeros(shape[:2], dtype=bool)
    for group in ("right_eye", "left_eye", "nose_lower"):
        lo, hi = DLIB68_GROUPS[group]
        mask |= _hull_mask(target[lo:hi], shape, expand=1.4)
    brows = np.vstack([target[slice(*DLIB68_GROUPS["right_brow"])],
                       target[slice(*DLIB68_GROUPS["left_brow"])]])
    jaw = target[slice(*DLIB68_GROUPS["jaw"])]
    x0 = int(max(np.floor(jaw[:, 0].min()), 0))
    x1 = int(min(np.ceil(jaw[:, 0].max()), shape[1] - 1))
    y1 = int(max(np.floor(brows[:, 1].min()), 0))
    mask[:y1 + 1, x0:x1 + 1] = True
    return mask


def _hull_mask(points: np.ndarray, shape, expand: float = 1.0) -> np.ndarray:
    hull = _convex_hull(points)
    if expand != 1.0:
        center = hull.mean(axis=0)
        hull = center + expand * (hull - center)
    h, w = shape[:2]
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float64),
                         np.arange(h, dtype=np.float64))
    inside = np.ones((h, w), dtype=bool)
    for i in range(len(hull)):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % len(hull)]
        cross = (bx - ax) * (gy - ay) - (by - ay) * (gx - ax)
        inside &= cross >= 0
    return inside


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain convex hull, CCW order."""
    pts = sorted({(float(x), float(y)) for x, y in points})
    if len(pts) < 3:
        return np.array(pts, dtype=np.float64)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=np.float64)
