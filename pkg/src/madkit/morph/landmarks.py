"""Landmark augmentation and the landmark file format.

File format: one header line naming the scheme, then one "x y" pair per
line. Coordinates are written with full float64 round-trip precision.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..core.errors import FormatError, MadkitError
from ..core.types import LandmarkSet


def augment_landmarks(lm: LandmarkSet, width: int, height: int,
                      idempotent: bool = False) -> LandmarkSet:
    """Append the 8 image-border points (4 corners, 4 edge midpoints).

    Order of the appended points, 0-based integer coordinates:
    (0,0), (w-1,0), (0,h-1), (w-1,h-1), ((w-1)//2,0), ((w-1)//2,h-1),
    (0,(h-1)//2), (w-1,(h-1)//2).

    A second augmentation raises unless ``idempotent`` is set, in which
    case the input is returned unchanged.
    """
    if lm.augmented:
        if idempotent:
            return lm
        raise MadkitError(f"landmark set '{lm.scheme}' is already augmented")
    pts = lm.points
    if len(pts):
        inside_x = (pts[:, 0] >= 0) & (pts[:, 0] <= width - 1)
        inside_y = (pts[:, 1] >= 0) & (pts[:, 1] <= height - 1)
        bad = np.flatnonzero(~(inside_x & inside_y))
        if len(bad):
            i = int(bad[0])
            raise MadkitError(
                f"landmark {i} at ({pts[i, 0]:g}, {pts[i, 1]:g}) lies outside "
                f"the {width}x{height} image")
    mx, my = (width - 1) // 2, (height - 1) // 2
    border = np.array([
        (0, 0), (width - 1, 0), (0, height - 1), (width - 1, height - 1),
        (mx, 0), (mx, height - 1), (0, my), (width - 1, my),
    ], dtype=np.float64)
    return LandmarkSet(np.vstack([pts, border]) if len(pts) else border,
                       scheme=lm.scheme + "+border")


def save_landmarks(lm: LandmarkSet, path) -> None:
    lines = [lm.scheme]
    lines += [f"{x:.17g} {y:.17g}" for x, y in lm.points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_landmarks(path) -> LandmarkSet:
    full = Path(path).read_text(encoding="utf-8").splitlines()
    raw = [l for l in full if not l.startswith("#")]
    if not raw or not raw[0].strip():
        raise FormatError(f"{path}: missing scheme header line")
    scheme = raw[0].strip()
    points = []
    for lineno, line in enumerate(raw[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 'x y', got {line!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric coordinate") from None
    pts = np.array(points, dtype=np.float64).reshape(-1, 2)
    return LandmarkSet(pts, scheme=scheme)
