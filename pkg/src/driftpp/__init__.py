"""Incremental ensemble classification for drifting chunked streams."""

from .adaptive import (
    ChunkReport,
    RunConfig,
    drift_alarm,
    pretrain,
    process_chunk,
    reduce_chunk,
    run_experiment,
)
from .core import (
    Chunk,
    ClassLabel,
    LabeledInstance,
    PredictionRecord,
    slice_features,
    standardize_chunk,
    validate_chunk,
)
from .data import DriftSpec, StreamSpec, generate_stream, read_chunk_csv, write_chunk_csv
from .knn import KnnConfig, KnnModel, knn_fit, knn_predict, knn_predict_batch, minkowski_distance
from .learnpp import (
    LearnPPConfig,
    LearnPPModel,
    WeakHypothesis,
    WeightDistribution,
    composite_error,
    composite_vote,
    hypothesis_error,
    init_weights,
    normalize_composite_error,
    normalize_error,
    run_round,
    sample_training_subset,
    update_weights,
)
from .metrics import ConfusionCounts, auc, confusion, f1, fnr
from .pca import PcaModel, pca_fit, pca_inverse_transform, pca_transform, tevr, write_tevr_csv

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChunkReport",
    "RunConfig",
    "drift_alarm",
    "pretrain",
    "process_chunk",
    "reduce_chunk",
    "run_experiment",
    "Chunk",
    "ClassLabel",
    "LabeledInstance",
    "PredictionRecord",
    "slice_features",
    "standardize_chunk",
    "validate_chunk",
    "DriftSpec",
    "StreamSpec",
    "generate_stream",
    "read_chunk_csv",
    "write_chunk_csv",
    "KnnConfig",
    "KnnModel",
    "knn_fit",
    "knn_predict",
    "knn_predict_batch",
    "minkowski_distance",
    "LearnPPConfig",
    "LearnPPModel",
    "WeakHypothesis",
    "WeightDistribution",
    "composite_error",
    "composite_vote",
    "hypothesis_error",
    "init_weights",
    "normalize_composite_error",
    "normalize_error",
    "run_round",
    "sample_training_subset",
    "update_weights",
    "ConfusionCounts",
    "auc",
    "confusion",
    "f1",
    "fnr",
    "PcaModel",
    "pca_fit",
    "pca_inverse_transform",
    "pca_transform",
    "tevr",
    "write_tevr_csv",
]
