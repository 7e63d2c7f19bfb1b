"""Per-triangle affine warping with bit-reproducible sampling.

Pixels are sampled bilinearly with edge-clamped borders and written with
round-half-to-even, so identical inputs produce identical outputs on any
platform. When source and destination triangles are exactly equal the
mapping short-circuits to the identity, which keeps self-morphs bit-exact.
"""

from __future__ import annotations

import logging

import numpy as np

DEGENERATE_AREA = 1e-9
EDGE_TOL = 1e-9

log = logging.getLogger(__name__)


def affine_from_triangles(src_tri: np.ndarray, dst_tri: np.ndarray) -> np.ndarray | None:
    """2x3 matrix mapping destination coordinates into the source triangle.

    Returns None (and logs) if either triangle is degenerate.
    """
    src = np.asarray(src_tri, dtype=np.float64)
    dst = np.asarray(dst_tri, dtype=np.float64)
    if np.array_equal(src, dst):
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    area_dst = abs(_tri_area2(dst)) / 2.0
    area_src = abs(_tri_area2(src)) / 2.0
    if area_dst < DEGENERATE_AREA or area_src < DEGENERATE_AREA:
        log.warning("skipping degenerate triangle (area src=%.3g dst=%.3g)",
                    area_src, area_dst)
        return None
    # solve [x_dst y_dst 1] @ M.T = [x_src y_src] for all three vertices
    m = np.hstack([dst, np.ones((3, 1))])
    sol = np.linalg.solve(m, src)  # (3, 2)
    return sol.T  # (2, 3)


def _tri_area2(tri):
    return ((tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1])
            - (tri[1, 1] - tri[0, 1]) * (tri[2, 0] - tri[0, 0]))


def triangle_pixels(tri: np.ndarray, width: int, height: int):
    """Integer pixel coordinates whose centers fall inside ``tri``.

    Returns (xs, ys) index arrays. Pixels on edges are included
    (barycentric coordinates >= -EDGE_TOL).
    """
    tri = np.asarray(tri, dtype=np.float64)
    x0 = max(int(np.floor(tri[:, 0].min())), 0)
    x1 = min(int(np.ceil(tri[:, 0].max())), width - 1)
    y0 = max(int(np.floor(tri[:, 1].min())), 0)
    y1 = min(int(np.ceil(tri[:, 1].max())), height - 1)
    if x1 < x0 or y1 < y0:
        return (np.empty(0, dtype=np.int64),) * 2
    gx, gy = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    gx = gx.ravel()
    gy = gy.ravel()
    area = _tri_area2(tri)
    if area == 0.0:
        return (np.empty(0, dtype=np.int64),) * 2
    w0 = ((tri[1, 0] - gx) * (tri[2, 1] - gy) - (tri[1, 1] - gy) * (tri[2, 0] - gx)) / area
    w1 = ((tri[2, 0] - gx) * (tri[0, 1] - gy) - (tri[2, 1] - gy) * (tri[0, 0] - gx)) / area
    w2 = 1.0 - w0 - w1
    inside = (w0 >= -EDGE_TOL) & (w1 >= -EDGE_TOL) & (w2 >= -EDGE_TOL)
    return gx[inside], gy[inside]


def bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample ``img`` at float coordinates; borders are edge-clamped.

    Returns float64 values; shape (n,) for grayscale, (n, c) for color.
    """
    h, w = img.shape[:2]
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    img_f = img.astype(np.float64)
    if img.ndim == 3:
        fx = fx[:, None]
        fy = fy[:, None]
    v00 = img_f[y0, x0]
    v01 = img_f[y0, x1]
    v10 = img_f[y1, x0]
    v11 = img_f[y1, x1]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy


def warp_triangle(src: np.ndarray, src_tri, dst_tri, accumulator: np.ndarray,
                  written: np.ndarray | None = None) -> np.ndarray:
    """Warp the ``src_tri`` patch of ``src`` onto ``dst_tri`` in ``accumulator``.

    ``accumulator`` is a float64 image updated in place (and returned).
    If ``written`` is given (bool mask, same h x w), only unwritten pixels
    are filled and the mask is updated; this gives shared-edge pixels to
    the first triangle that claims them.
    """
    mat = affine_from_triangles(src_tri, dst_tri)
    if mat is None:
        return accumulator
    h, w = accumulator.shape[:2]
    xs, ys = triangle_pixels(np.asarray(dst_tri, dtype=np.float64), w, h)
    if written is not None and len(xs):
        free = ~written[ys, xs]
        xs, ys = xs[free], ys[free]
        written[ys, xs] = True
    if not len(xs):
        return accumulator
    src_x = mat[0, 0] * xs + mat[0, 1] * ys + mat[0, 2]
    src_y = mat[1, 0] * xs + mat[1, 1] * ys + mat[1, 2]
    accumulator[ys, xs] = bilinear_sample(src, src_x, src_y)
    return accumulator
