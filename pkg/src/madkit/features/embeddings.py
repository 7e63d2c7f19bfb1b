"""Embedding storage, file IO and the difference-vector combiner.

Embedding file format (UTF-8)::

    dim=<d> extractor=<tag>
    <image id> <d space-separated decimal floats>
    ...

Floats are written with 17 significant digits, which round-trips IEEE
float64 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core.errors import FormatError


@dataclass
class EmbeddingStore:
    dim: int
    extractor: str = "unknown"
    vectors: dict = field(default_factory=dict)

    def add(self, image_id: str, values) -> None:
        vec = np.asarray(values, dtype=np.float64)
        if vec.ndim != 1 or len(vec) != self.dim:
            raise FormatError(
                f"embedding for '{image_id}' has dim {vec.shape}, expected {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"embedding for '{image_id}' has non-finite values")
        if image_id in self.vectors:
            raise FormatError(f"duplicate id '{image_id}'")
        vec.setflags(write=False)
        self.vectors[image_id] = vec

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, image_id):
        return image_id in self.vectors

    def __getitem__(self, image_id) -> np.ndarray:
        try:
            return self.vectors[image_id]
        except KeyError:
            raise FormatError(f"no embedding for id '{image_id}'") from None


def load_embeddings(path) -> EmbeddingStore:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    lines = [l for l in raw if not l.startswith("#")]
    if not lines:
        raise FormatError(f"{path}: empty embedding file")
    header = lines[0].split()
    fields = dict(part.split("=", 1) for part in header if "=" in part)
    if "dim" not in fields:
        raise FormatError(f"{path}:1: header must declare dim=<d>")
    try:
        dim = int(fields["dim"])
    except ValueError:
        raise FormatError(f"{path}:1: dim is not an integer") from None
    if dim < 1:
        raise FormatError(f"{path}:1: dim must be positive")
    store = EmbeddingStore(dim=dim, extractor=fields.get("extractor", "unknown"))
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        image_id = parts[0]
        if len(parts) - 1 != dim:
            raise FormatError(
                f"{path}:{lineno}: id '{image_id}' has {len(parts) - 1} values, "
                f"expected {dim}")
        try:
            vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value") from None
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"{path}:{lineno}: non-finite value for id '{image_id}'")
        try:
            store.add(image_id, vec)
        except FormatError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return store


def embeddings_to_text(store: EmbeddingStore) -> str:
    lines = [f"dim={store.dim} extractor={store.extractor}"]
    for image_id in sorted(store.vectors):
        values = " ".join(f"{v:.17g}" for v in store.vectors[image_id])
        lines.append(f"{image_id} {values}")
    return "\n".join(lines) + "\n"


def save_embeddings(store: EmbeddingStore, path) -> None:
    Path(path).write_text(embeddings_to_text(store), encoding="utf-8")


def combine_difference(ref_feat, probe_feat) -> np.ndarray:
    """Elementwise reference - probe; preserves dimensionality."""
    ref = np.asarray(ref_feat, dtype=np.float64)
    probe = np.asarray(probe_feat, dtype=np.float64)
    if ref.shape != probe.shape:
        raise FormatError(f"feature dims differ: {ref.shape} vs {probe.shape}")
    return ref - probe


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        raise FormatError("cosine similarity undefined for zero vector")
    return float(np.dot(a, b) / denom)
