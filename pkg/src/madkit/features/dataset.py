"""Labeled classifier-input datasets built from embedding differences.

Dataset file format (UTF-8)::

    dim=<d> source=<tag>
    <label> <ref id> <probe id> <d floats>

where label is "bona-fide" or "attack". Bona fide rows come from genuine
comparisons (reference minus probe embedding), attack rows from morph
attack comparisons (morph minus probe embedding).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core.errors import FormatError
from ..protocol import ComparisonSet
from .embeddings import EmbeddingStore, combine_difference

LABELS = ("bona-fide", "attack")


@dataclass
class FeatureDataset:
    X: np.ndarray          # (n, d)
    y: np.ndarray          # (n,) -1 bona fide / +1 attack
    rows: list             # (label, ref_id, probe_id) per sample
    source: str = "unknown"

    @property
    def dim(self) -> int:
        return self.X.shape[1]


def build_difference_dataset(store: EmbeddingStore, comparisons: ComparisonSet,
                             source: str | None = None) -> FeatureDataset:
    X, y, rows = [], [], []
    for ref_id, probe_id, _subject in comparisons.genuine:
        X.append(combine_difference(store[ref_id], store[probe_id]))
        y.append(-1.0)
        rows.append(("bona-fide", ref_id, probe_id))
    for morph_id, probe_id, _subject in comparisons.attacks:
        X.append(combine_difference(store[morph_id], store[probe_id]))
        y.append(1.0)
        rows.append(("attack", morph_id, probe_id))
    if not X:
        raise FormatError("no comparisons produced any feature rows")
    return FeatureDataset(X=np.array(X), y=np.array(y), rows=rows,
                          source=source or store.extractor)


def dataset_to_text(ds: FeatureDataset) -> str:
    lines = [f"dim={ds.dim} source={ds.source}"]
    for (label, ref_id, probe_id), vec in zip(ds.rows, ds.X):
        values = " ".join(f"{v:.17g}" for v in vec)
        lines.append(f"{label} {ref_id} {probe_id} {values}")
    return "\n".join(lines) + "\n"


def save_dataset(ds: FeatureDataset, path) -> None:
    Path(path).write_text(dataset_to_text(ds), encoding="utf-8")


def load_dataset(path) -> FeatureDataset:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    lines = [l for l in raw if not l.startswith("#")]
    if not lines:
        raise FormatError(f"{path}: empty dataset file")
    header = dict(part.split("=", 1) for part in lines[0].split() if "=" in part)
    try:
        dim = int(header["dim"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}:1: header must declare dim=<d>") from None
    X, y, rows = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != dim + 3:
            raise FormatError(f"{path}:{lineno}: expected label, two ids and "
                              f"{dim} values")
        label, ref_id, probe_id = parts[:3]
        if label not in LABELS:
            raise FormatError(f"{path}:{lineno}: unknown label '{label}'")
        try:
            vec = np.array([float(v) for v in parts[3:]])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value") from None
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"{path}:{lineno}: non-finite value")
        X.append(vec)
        y.append(1.0 if label == "attack" else -1.0)
        rows.append((label, ref_id, probe_id))
    if not X:
        raise FormatError(f"{path}: dataset has no rows")
    return FeatureDataset(X=np.array(X), y=np.array(y), rows=rows,
                          source=header.get("source", "unknown"))
