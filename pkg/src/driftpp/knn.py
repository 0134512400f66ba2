"""K-nearest-neighbor weak learner over a Minkowski metric.

Prediction is an exhaustive scan of the stored points. Distance ties at the
neighborhood boundary are broken toward the lower stored-point index, so
results are reproducible regardless of query batching.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ClassLabel, LabeledInstance
from .errors import DimensionError, EmptyTrainingSet

__all__ = ["KnnConfig", "KnnModel", "minkowski_distance", "knn_fit", "knn_predict", "knn_predict_batch"]

# cap on scratch memory for pairwise distances, in float64 cells
_BLOCK_CELLS = 2_000_000


@dataclass(frozen=True)
class KnnConfig:
    k: int = 3
    p: float = 2.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")


@dataclass(frozen=True, eq=False)
class KnnModel:
    """Training points stored verbatim, in fit order."""

    config: KnnConfig
    features: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,)

    @property
    def n_points(self) -> int:
        return self.features.shape[0]

    @property
    def dimensionality(self) -> int:
        return self.features.shape[1]


def minkowski_distance(a, b, p: float = 2.0) -> float:
    """(sum_i |a_i - b_i|^p)^(1/p) for two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"vector shapes differ: {a.shape} vs {b.shape}")
    return float(_pairwise(a[None, :], b[None, :], p)[0, 0])


def _pairwise(points: np.ndarray, queries: np.ndarray, p: float) -> np.ndarray:
    """Distances from every query row to every stored row, shape (n_q, n_p).

    Computed in row blocks to bound scratch memory; blocking never changes
    the result because each (query, point) pair is reduced independently.
    """
    n_p, d = points.shape
    n_q = queries.shape[0]
    out = np.empty((n_q, n_p))
    step = max(1, _BLOCK_CELLS // max(1, n_p * d))
    for start in range(0, n_q, step):
        stop = min(start + step, n_q)
        diff = np.abs(queries[start:stop, None, :] - points[None, :, :])
        if p == 2.0:
            out[start:stop] = np.sqrt((diff * diff).sum(axis=-1))
        elif p == 1.0:
            out[start:stop] = diff.sum(axis=-1)
        else:
            out[start:stop] = (diff**p).sum(axis=-1) ** (1.0 / p)
    return out


def knn_fit(config: KnnConfig, data: Sequence[LabeledInstance]) -> KnnModel:
    """Store the training pairs verbatim. Duplicates are kept."""
    if len(data) == 0:
        raise EmptyTrainingSet("cannot fit a nearest-neighbor model on zero instances")
    dims = {len(inst.features) for inst in data}
    if len(dims) != 1:
        raise DimensionError(f"mixed feature dimensionalities in training data: {sorted(dims)}")
    features = np.stack([inst.features for inst in data])
    labels = np.array([int(inst.label) for inst in data], dtype=np.int64)
    features.flags.writeable = False
    labels.flags.writeable = False
    return KnnModel(config, features, labels)


def knn_predict_batch(model: KnnModel, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predict labels and class-1 scores for an (n_q, d) query array.

    The score is the class-1 fraction among the min(k, n_points) nearest
    stored points. A query at exactly 0.5 resolves to label 0. Output is
    identical to predicting each row on its own.
    """
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2 or queries.shape[1] != model.dimensionality:
        raise DimensionError(
            f"query shape {queries.shape} does not match model dimensionality {model.dimensionality}"
        )
    k = min(model.config.k, model.n_points)
    dist = _pairwise(model.features, queries, model.config.p)
    # stable sort keeps the lower stored index first among tied distances
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    neighbor_labels = model.labels[order]
    scores = neighbor_labels.sum(axis=1) / k
    labels = (scores > 0.5).astype(np.int64)
    return labels, scores


def knn_predict(model: KnnModel, x) -> tuple[ClassLabel, float]:
    """Predict one query vector. See :func:`knn_predict_batch`."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-D query vector, got shape {x.shape}")
    labels, scores = knn_predict_batch(model, x[None, :])
    return ClassLabel(int(labels[0])), float(scores[0])
