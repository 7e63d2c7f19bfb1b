from .errors import (
    EmptyClassError,
    FormatError,
    MadkitError,
    ManifestError,
    ModelFormatError,
)
from .images import load_png, save_png, to_grayscale
from .manifest import (
    Violation,
    load_manifest,
    parse_manifest,
    save_manifest,
    validate_manifest,
)
from .types import (
    DatasetManifest,
    ImageEntry,
    LandmarkSet,
    MorphPair,
    Orientation,
    PostProcessing,
    Role,
    ScoreSet,
    Sex,
    SubjectRecord,
    validate_image,
)

__all__ = [
    "DatasetManifest", "EmptyClassError", "FormatError", "ImageEntry",
    "LandmarkSet", "MadkitError", "ManifestError", "ModelFormatError",
    "MorphPair", "Orientation", "PostProcessing", "Role", "ScoreSet", "Sex",
    "SubjectRecord", "Violation", "load_manifest", "load_png",
    "parse_manifest", "save_manifest", "save_png", "to_grayscale",
    "validate_image", "validate_manifest",
]
