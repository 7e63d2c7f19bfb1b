"""LBP and BSIF texture histograms.

LBP neighbor order is fixed clockwise starting at the top-left corner
of the 3x3 patch (TL, T, TR, R, BR, B, BL, L) with the first neighbor
as the most significant bit; a neighbor >= center sets its bit. BSIF
codes set bit 2^i when filter i responds > 0. Border pixels that lack a
full patch are excluded from both descriptors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from ..core.errors import FormatError, MadkitError

MAX_BANK_FILTERS = 12


def _cell_bounds(length: int, cells: int) -> list[int]:
    return [round(i * length / cells) for i in range(cells + 1)]


def _per_cell_histograms(codes: np.ndarray, cells: int, n_bins: int) -> np.ndarray:
    if cells == 1:
        return np.bincount(codes.ravel(), minlength=n_bins).astype(np.float64)
    ys = _cell_bounds(codes.shape[0], cells)
    xs = _cell_bounds(codes.shape[1], cells)
    parts = []
    for i in range(cells):
        for j in range(cells):
            block = codes[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
            parts.append(np.bincount(block.ravel(), minlength=n_bins))
    return np.concatenate(parts).astype(np.float64)


def lbp_codes(img: np.ndarray) -> np.ndarray:
    """8-neighbor LBP code image over the interior (h-2, w-2) region."""
    if img.ndim != 2:
        raise MadkitError("grayscale required")
    h, w = img.shape
    if min(h, w) < 3:
        raise MadkitError(f"image must be at least 3x3, got {w}x{h}")
    c = img[1:-1, 1:-1]
    neighbors = (
        img[0:-2, 0:-2], img[0:-2, 1:-1], img[0:-2, 2:], img[1:-1, 2:],
        img[2:, 2:], img[2:, 1:-1], img[2:, 0:-2], img[1:-1, 0:-2],
    )
    codes = np.zeros(c.shape, dtype=np.int64)
    for k, nb in enumerate(neighbors):
        codes |= (nb >= c).astype(np.int64) << (7 - k)
    return codes


def lbp_histogram(img: np.ndarray, cells: int = 1) -> np.ndarray:
    """256-bin LBP histogram per cell, concatenated (256 or 4096 dims)."""
    if cells not in (1, 4):
        raise MadkitError(f"cells must be 1 or 4, got {cells}")
    return _per_cell_histograms(lbp_codes(img), cells, 256)


@dataclass(frozen=True)
class FilterBank:
    """k filters of size n x n, loaded (never learned here)."""

    filters: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.filters, dtype=np.float64)
        if f.ndim != 3 or f.shape[1] != f.shape[2]:
            raise FormatError(f"filter bank must have shape (k, n, n), got {f.shape}")
        if len(f) < 1 or len(f) > MAX_BANK_FILTERS:
            raise FormatError(f"bank size must be 1..{MAX_BANK_FILTERS}, got {len(f)}")
        if f.shape[1] % 2 == 0:
            raise FormatError("filter size must be odd")
        if not np.all(np.isfinite(f)):
            raise FormatError("filters must be finite")
        f.setflags(write=False)
        object.__setattr__(self, "filters", f)

    @property
    def k(self) -> int:
        return len(self.filters)

    @property
    def size(self) -> int:
        return self.filters.shape[1]


def load_filter_bank(path) -> FilterBank:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"filter bank file not found: {path}")
    return FilterBank(np.load(path))


def save_filter_bank(bank: FilterBank, path) -> None:
    np.save(path, bank.filters)


def synthetic_filter_bank(k: int = 8, size: int = 3, seed: int = 0) -> FilterBank:
    """Seeded zero-mean bank for tests and demos (stands in for ICA banks)."""
    rng = np.random.default_rng(seed)
    filters = rng.standard_normal((k, size, size))
    filters -= filters.mean(axis=(1, 2), keepdims=True)
    filters /= np.linalg.norm(filters.reshape(k, -1), axis=1)[:, None, None]
    return FilterBank(filters)


def bsif_codes(img: np.ndarray, bank: FilterBank) -> np.ndarray:
    if bank is None:
        raise MadkitError("a filter bank is required")
    if img.ndim != 2:
        raise MadkitError("grayscale required")
    h, w = img.shape
    n = bank.size
    if min(h, w) < n:
        raise MadkitError(f"image must be at least {n}x{n}, got {w}x{h}")
    data = img.astype(np.float64)
    codes = np.zeros((h - n + 1, w - n + 1), dtype=np.int64)
    for i, filt in enumerate(bank.filters):
        response = signal.correlate2d(data, filt, mode="valid")
        codes |= (response > 0).astype(np.int64) << i
    return codes


def bsif_histogram(img: np.ndarray, bank: FilterBank, cells: int = 1) -> np.ndarray:
    """2^k-bin BSIF histogram per cell, concatenated."""
    if cells not in (1, 4):
        raise MadkitError(f"cells must be 1 or 4, got {cells}")
    return _per_cell_histograms(bsif_codes(img, bank), cells, 2 ** bank.k)
