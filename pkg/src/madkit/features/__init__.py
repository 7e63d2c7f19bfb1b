from .dataset import (
    FeatureDataset,
    build_difference_dataset,
    dataset_to_text,
    load_dataset,
    save_dataset,
)
from .embeddings import (
    EmbeddingStore,
    combine_difference,
    cosine_similarity,
    embeddings_to_text,
    load_embeddings,
    save_embeddings,
)
from .landmark_feats import ANGLE_PAIRS, landmark_features, normalize_landmarks
from .synthetic import SyntheticConfig, build_synthetic_manifest, synthesize_embeddings
from .texture import (
    FilterBank,
    bsif_codes,
    bsif_histogram,
    lbp_codes,
    lbp_histogram,
    load_filter_bank,
    save_filter_bank,
    synthetic_filter_bank,
)

__all__ = [
    "ANGLE_PAIRS", "EmbeddingStore", "FeatureDataset", "FilterBank",
    "SyntheticConfig", "bsif_codes", "bsif_histogram",
    "build_difference_dataset", "build_synthetic_manifest",
    "combine_difference", "cosine_similarity", "dataset_to_text",
    "embeddings_to_text", "landmark_features", "lbp_codes", "lbp_histogram",
    "load_dataset", "load_embeddings", "load_filter_bank",
    "normalize_landmarks", "save_dataset", "save_embeddings",
    "save_filter_bank", "synthesize_embeddings", "synthetic_filter_bank",
]
