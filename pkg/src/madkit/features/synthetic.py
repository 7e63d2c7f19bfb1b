"""Synthetic embedding oracle for desk-scale experiments.

Identities are unit vectors drawn uniformly on the sphere; image samples
add isotropic gaussian noise before renormalizing, and a morph embedding
is the renormalized convex combination of its contributors' identity
vectors plus the same noise. This mirrors the geometric intuition that a
morph carries biometric information of both contributors, without
claiming fidelity to any specific network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError
from ..core.types import DatasetManifest, ImageEntry, Role, Sex, SubjectRecord
from ..protocol import derive_morphs
from .embeddings import EmbeddingStore


@dataclass(frozen=True)
class SyntheticConfig:
    dim: int = 512
    identities: int = 50
    refs_per_identity: int = 1
    inputs_per_identity: int = 1
    probes_per_identity: int = 2
    sigma: float = 0.05
    alpha: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise MadkitError("dim must be >= 2")
        if self.identities < 2:
            raise MadkitError("need at least 2 identities")
        if self.sigma < 0:
            raise MadkitError("sigma must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise MadkitError("alpha must be in (0, 1)")


def build_synthetic_manifest(cfg: SyntheticConfig, id_prefix: str = "sub",
                             tool: str = "synthetic") -> DatasetManifest:
    """Subjects with FERET-like role structure plus scan-rule morph pairs.

    Sexes alternate with the subject index so the same-sex pairing rule
    always finds partners.
    """
    subjects = []
    for i in range(cfg.identities):
        sid = f"{id_prefix}{i:04d}"
        images = []
        for k in range(cfg.refs_per_identity):
            images.append(ImageEntry(f"{sid}_r{k}", Role.BONA_FIDE_REFERENCE, 1))
        for k in range(cfg.inputs_per_identity):
            images.append(ImageEntry(f"{sid}_m{k}", Role.MORPH_INPUT, 1))
        for k in range(cfg.probes_per_identity):
            images.append(ImageEntry(f"{sid}_p{k}", Role.PROBE, 2))
        subjects.append(SubjectRecord(
            id=sid, sex=Sex.MALE if i % 2 == 0 else Sex.FEMALE,
            images=tuple(images)))
    manifest = DatasetManifest(subjects=tuple(subjects))
    return derive_morphs(manifest, tool=tool, alpha=cfg.alpha)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def synthesize_embeddings(cfg: SyntheticConfig,
                          manifest: DatasetManifest) -> EmbeddingStore:
    """Deterministic embeddings for every image and morph in the manifest.

    Draw order is fixed: subjects in sorted-id order (identity vector,
    then one draw per image in sorted-id order), then morphs in manifest
    order. Identical (seed, manifest) pairs give identical stores.
    """
    rng = np.random.default_rng(cfg.seed)
    store = EmbeddingStore(dim=cfg.dim, extractor=f"synthetic-seed{cfg.seed}")
    identity = {}
    for subj in sorted(manifest.subjects, key=lambda s: s.id):
        id_vec = _unit(rng.standard_normal(cfg.dim))
        identity[subj.id] = id_vec
        for img in sorted(subj.images, key=lambda im: im.id):
            noise = rng.standard_normal(cfg.dim)
            store.add(img.id, _unit(id_vec + cfg.sigma * noise))
    owner = {img.id: subj.id for subj in manifest.subjects for img in subj.images}
    for morph in manifest.morphs:
        for side in (morph.a, morph.b):
            if side not in owner:
                raise MadkitError(f"morph references unknown image '{side}'")
        combo = (morph.alpha * identity[owner[morph.a]]
                 + (1.0 - morph.alpha) * identity[owner[morph.b]])
        noise = rng.standard_normal(cfg.dim)
        store.add(morph.morph_id, _unit(combo + cfg.sigma * noise))
    return store
