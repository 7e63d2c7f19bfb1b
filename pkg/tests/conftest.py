import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from madkit.core import (
    DatasetManifest,
    ImageEntry,
    LandmarkSet,
    MorphPair,
    Role,
    Sex,
    SubjectRecord,
)
from madkit.morph import augment_landmarks


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_subject(sid, sex=Sex.MALE, refs=1, inputs=1, probes=1, glasses=()):
    images = []
    for k in range(refs):
        images.append(ImageEntry(f"{sid}_r{k}", Role.BONA_FIDE_REFERENCE, 1))
    for k in range(inputs):
        images.append(ImageEntry(f"{sid}_m{k}", Role.MORPH_INPUT, 1,
                                 glasses=f"m{k}" in glasses))
    for k in range(probes):
        images.append(ImageEntry(f"{sid}_p{k}", Role.PROBE, 2))
    return SubjectRecord(id=sid, sex=sex, images=tuple(images))


def make_manifest(n_subjects=2, refs=1, inputs=1, probes=1, morphs=()):
    subjects = tuple(
        make_subject(f"s{i:03d}", Sex.MALE if i % 2 == 0 else Sex.FEMALE,
                     refs, inputs, probes)
        for i in range(n_subjects))
    return DatasetManifest(subjects=subjects, morphs=tuple(morphs))


@pytest.fixture
def two_subject_manifest():
    man = make_manifest(n_subjects=2)
    # same-sex pair: use subjects 0 and 2 style ids instead; simplest: two males
    subjects = (make_subject("s000", Sex.MALE), make_subject("s001", Sex.MALE))
    return DatasetManifest(
        subjects=subjects,
        morphs=(MorphPair(a="s000_m0", b="s001_m0", tool="t", alpha=0.5),))


def grid_landmarks(width, height, nx=8, ny=8, jitter=0.0, seed=0, scheme=None):
    """Jittered interior grid plus border augmentation, ready for morphing."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(12, width - 13, nx)
    ys = np.linspace(12, height - 13, ny)
    pts = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    if jitter:
        pts = pts + rng.uniform(-jitter, jitter, pts.shape)
    lm = LandmarkSet(pts, scheme=scheme or f"grid{nx * ny}")
    return augment_landmarks(lm, width, height)
