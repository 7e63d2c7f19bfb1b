"""Score histograms and gaussian kernel-density series for plotting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError
from ..core.types import ScoreSet


@dataclass(frozen=True)
class ClassDensity:
    label: str
    bin_edges: np.ndarray
    masses: np.ndarray      # normalized to sum 1
    grid: np.ndarray
    density: np.ndarray     # gaussian KDE, Silverman bandwidth
    bandwidth: float


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(std, IQR/1.34) * n^(-1/5), with a floor for degenerate data."""
    n = len(values)
    std = float(values.std())
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    spread = min(std, iqr / 1.34) if iqr > 0 else std
    if spread <= 0:
        spread = max(abs(float(values[0])) * 1e-3, 1e-3)
    return 0.9 * spread * n ** (-0.2)


def score_histograms(scores: ScoreSet, bins: int = 50,
                     grid_points: int = 512) -> list[ClassDensity]:
    """Per-class normalized histogram plus KDE series on a shared range."""
    if bins < 2:
        raise MadkitError(f"bins must be >= 2, got {bins}")
    lo = float(scores.scores.min())
    hi = float(scores.scores.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)

    out = []
    for label, values in (("bona-fide", scores.bona_fide),
                          ("attack", scores.attack)):
        if len(values) == 0:
            continue
        counts, _ = np.histogram(values, bins=edges)
        masses = counts / counts.sum()
        bw = silverman_bandwidth(values)
        grid = np.linspace(values.min() - 5.0 * bw, values.max() + 5.0 * bw,
                           grid_points)
        z = (grid[:, None] - values[None, :]) / bw
        density = np.exp(-0.5 * z * z).sum(axis=1) / (len(values) * bw * np.sqrt(2.0 * np.pi))
        out.append(ClassDensity(label=label, bin_edges=edges, masses=masses,
                                grid=grid, density=density, bandwidth=bw))
    return out
