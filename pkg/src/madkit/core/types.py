"""Shared domain types.

All types are immutable after construction and safe to share between
workers. Images are plain ``numpy`` arrays of dtype uint8, shape (h, w)
for grayscale or (h, w, 3) for color, row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import FormatError


class Sex(str, Enum):
    MALE = "male"
    FEMALE = "female"


class Role(str, Enum):
    BONA_FIDE_REFERENCE = "bona-fide-reference"
    MORPH_INPUT = "morph-input"
    PROBE = "probe"


class PostProcessing(str, Enum):
    NPP = "NPP"
    RESIZED = "Resized"
    JP2 = "JP2"
    PS_JP2 = "PS-JP2"


class Orientation(str, Enum):
    HIGHER_IS_ATTACK = "higher-is-attack"
    HIGHER_IS_MATCH = "higher-is-match"


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check that ``img`` is a valid uint8 raster image and return it."""
    if not isinstance(img, np.ndarray) or img.dtype != np.uint8:
        raise FormatError("image must be a uint8 numpy array")
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[2] == 3:
        return img
    raise FormatError(f"image must have shape (h, w) or (h, w, 3), got {img.shape}")


# Landmark schemes with a fixed, checked point count. The "+border" suffix
# marks a set augmented with the 8 image-edge points.
KNOWN_SCHEMES = {"dlib68": 68, "dlib68+border": 76}


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered (x, y) pixel coordinates under a named convention."""

    points: np.ndarray
    scheme: str = "dlib68"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise FormatError(f"landmarks must have shape (n, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise FormatError("landmark coordinates must be finite")
        expected = KNOWN_SCHEMES.get(self.scheme)
        if expected is not None and len(pts) != expected:
            raise FormatError(
                f"scheme '{self.scheme}' requires {expected} points, got {len(pts)}"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def augmented(self) -> bool:
        return self.scheme.endswith("+border")


@dataclass(frozen=True)
class ImageEntry:
    """One image of a subject, tagged with its protocol role."""

    id: str
    role: Role
    session: int = 1
    glasses: bool = False


@dataclass(frozen=True)
class SubjectRecord:
    id: str
    sex: Sex
    images: tuple[ImageEntry, ...] = ()

    def with_role(self, role: Role) -> tuple[ImageEntry, ...]:
        return tuple(img for img in self.images if img.role == role)


@dataclass(frozen=True)
class MorphPair:
    """Two morph-input image ids blended with weight ``alpha`` on ``a``.

    By convention the ``a`` side is the attacker when attacker-only
    trials are enumerated.
    """

    a: str
    b: str
    tool: str = "reference"
    alpha: float = 0.5

    @property
    def morph_id(self) -> str:
        return f"{self.a}__{self.b}__{self.tool}__a{int(round(self.alpha * 100)):02d}"


@dataclass(frozen=True)
class DatasetManifest:
    """Declarative inventory of subjects, images and derived morph pairs."""

    subjects: tuple[SubjectRecord, ...]
    morphs: tuple[MorphPair, ...] = ()
    post_processing: dict = field(default_factory=dict)

    def image_index(self) -> dict[str, tuple[SubjectRecord, ImageEntry]]:
        index = {}
        for subj in self.subjects:
            for img in subj.images:
                index.setdefault(img.id, (subj, img))
        return index

    def subject_index(self) -> dict[str, SubjectRecord]:
        return {s.id: s for s in self.subjects}


BONA_FIDE_LABELS = ("bona-fide", "genuine")
ATTACK_LABELS = ("attack", "impostor")


@dataclass(frozen=True)
class ScoreSet:
    """Labeled scalar scores feeding the metric suite.

    ``labels`` uses either the detection vocabulary (bona-fide/attack)
    or the recognition vocabulary (genuine/impostor); the two positive
    and negative labels are treated interchangeably by the metrics.
    """

    scores: np.ndarray
    labels: np.ndarray
    orientation: Orientation = Orientation.HIGHER_IS_ATTACK

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=object)
        if scores.ndim != 1 or labels.shape != scores.shape:
            raise FormatError("scores and labels must be 1-D arrays of equal length")
        if not np.all(np.isfinite(scores)):
            raise FormatError("scores must be finite")
        known = set(BONA_FIDE_LABELS) | set(ATTACK_LABELS)
        bad = sorted({str(l) for l in labels} - known)
        if bad:
            raise FormatError(f"unknown score labels: {bad}")
        scores.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_classes(cls, bona_fide, attack, orientation=Orientation.HIGHER_IS_ATTACK,
                     labels=("bona-fide", "attack")) -> "ScoreSet":
        bona_fide = np.asarray(bona_fide, dtype=np.float64)
        attack = np.asarray(attack, dtype=np.float64)
        scores = np.concatenate([bona_fide, attack])
        lab = np.array([labels[0]] * len(bona_fide) + [labels[1]] * len(attack),
                       dtype=object)
        return cls(scores, lab, orientation)

    @property
    def bona_fide(self) -> np.ndarray:
        mask = np.array([l in BONA_FIDE_LABELS for l in self.labels])
        return self.scores[mask]

    @property
    def attack(self) -> np.ndarray:
        mask = np.array([l in ATTACK_LABELS for l in self.labels])
        return self.scores[mask]
