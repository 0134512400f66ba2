"""Incremental ensemble engine built on weighted weak-learner rounds.

Training works window by window. Each window carries a weight distribution
over its instances. A round repeatedly samples a training subset in
proportion to those weights, fits a nearest-neighbor weak hypothesis, and
keeps it only if its weighted error over the whole window stays below the
error threshold; over-threshold candidates are discarded and re-sampled, and
too many consecutive discards abort the round. Every kept hypothesis votes
with weight log(1 / normalized_error), so more accurate hypotheses speak
louder. After each acceptance the composite vote of all retained hypotheses
is evaluated on the window, and the weights of correctly classified
instances decay by the normalized composite error, which concentrates the
next subset on the instances the ensemble still gets wrong. A composite
that classifies the whole window correctly ends the round early.

The model itself learns online: each (instance, was_correct) pair enters a
buffer, and a full buffer becomes the next training window. Instances that
the ensemble misclassified at arrival enter the window with doubled initial
weight. Old window groups can be pruned wholesale to bound memory.

Predictions are read-only and may run concurrently; training calls must be
serialized by the caller (single writer).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ClassLabel, LabeledInstance
from .errors import (
    DimensionError,
    EmptyEnsemble,
    EmptyWindow,
    RoundFailed,
)
from .knn import KnnConfig, KnnModel, knn_fit, knn_predict, knn_predict_batch

__all__ = [
    "BETA_FLOOR",
    "LearnPPConfig",
    "WeightDistribution",
    "WeakHypothesis",
    "LearnPPModel",
    "init_weights",
    "sample_training_subset",
    "hypothesis_error",
    "normalize_error",
    "composite_vote",
    "composite_error",
    "normalize_composite_error",
    "update_weights",
    "run_round",
]

logger = logging.getLogger(__name__)

# normalized error assigned to a perfect weak hypothesis; keeps its vote
# weight large but finite
BETA_FLOOR = 1e-10

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LearnPPConfig:
    """Knobs for the ensemble.

    ``window_size=None`` leaves window boundaries to the caller (the chunk
    harness flushes once per chunk, so each chunk becomes one window).
    ``max_window_ensembles=None`` disables forgetting.
    """

    n_estimators: int = 3
    window_size: int | None = None
    error_threshold: float = 0.5
    max_retries: int = 10
    max_window_ensembles: int | None = None
    knn: KnnConfig = field(default_factory=KnnConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_estimators < 1:
            raise ValueError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.window_size is not None and self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if not 0.0 < self.error_threshold < 1.0:
            raise ValueError(f"error_threshold must lie in (0, 1), got {self.error_threshold}")
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {self.max_retries}")
        if self.max_window_ensembles is not None and self.max_window_ensembles < 1:
            raise ValueError(
                f"max_window_ensembles must be >= 1, got {self.max_window_ensembles}"
            )


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Normalized, non-negative weights over the instances of one window."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.weights, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise EmptyWindow("weight distribution needs at least one entry")
        if np.any(arr < 0.0):
            raise ValueError("weights must be non-negative")
        if not np.any(arr > 0.0):
            raise ValueError("at least one weight must be positive")
        total = arr.sum()
        if abs(total - 1.0) > _SUM_TOLERANCE:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return self.weights.size

    @classmethod
    def normalized(cls, raw) -> "WeightDistribution":
        """Build a distribution from unnormalized non-negative weights."""
        arr = np.asarray(raw, dtype=np.float64)
        if arr.size == 0:
            raise EmptyWindow("cannot normalize an empty weight vector")
        total = arr.sum()
        if total <= 0.0:
            raise ValueError("weights must have a positive sum")
        return cls(arr / total)


@dataclass(frozen=True, eq=False)
class WeakHypothesis:
    """One accepted weak learner and its voting strength.

    ``normalized_error`` is e/(1-e) for the weighted training error e, always
    inside (0, 1) for an accepted hypothesis. The vote weight is its log
    reciprocal, so it is always positive.
    """

    model: KnnModel
    normalized_error: float
    window_ordinal: int

    def __post_init__(self) -> None:
        if not 0.0 < self.normalized_error < 1.0:
            raise ValueError(
                f"normalized error must lie in (0, 1), got {self.normalized_error!r}"
            )

    @property
    def vote_weight(self) -> float:
        return math.log(1.0 / self.normalized_error)


def init_weights(n: int) -> WeightDistribution:
    """Uniform distribution 1/n over n instances."""
    if n < 1:
        raise EmptyWindow(f"cannot build weights over {n} instances")
    return WeightDistribution(np.full(n, 1.0 / n))


def sample_training_subset(dist: WeightDistribution, rng: np.random.Generator) -> np.ndarray:
    """Draw ceil(n/2) instance indices with replacement, proportional to weight."""
    n = len(dist)
    size = (n + 1) // 2
    return rng.choice(n, size=size, replace=True, p=dist.weights)


def _window_arrays(window: Sequence[LabeledInstance]) -> tuple[np.ndarray, np.ndarray]:
    features = np.stack([inst.features for inst in window])
    labels = np.array([int(inst.label) for inst in window], dtype=np.int64)
    return features, labels


def hypothesis_error(model: KnnModel, window: Sequence[LabeledInstance], dist: WeightDistribution) -> float:
    """Total weight of the window instances the model misclassifies."""
    if len(window) != len(dist):
        raise DimensionError(f"window has {len(window)} instances but distribution has {len(dist)}")
    features, labels = _window_arrays(window)
    predicted, _ = knn_predict_batch(model, features)
    return float(dist.weights[predicted != labels].sum())


def normalize_error(e: float) -> float:
    """Map a weighted error e in (0, 0.5) to e/(1-e) in (0, 1)."""
    return e / (1.0 - e)


def _vote_mass(
    prediction_rows: Sequence[np.ndarray], vote_weights: Sequence[float], n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance vote mass for each class, accumulated in hypothesis order."""
    mass0 = np.zeros(n)
    mass1 = np.zeros(n)
    for predictions, weight in zip(prediction_rows, vote_weights):
        ones = predictions == 1
        mass1[ones] += weight
        mass0[~ones] += weight
    return mass0, mass1


def composite_vote(hypotheses: Sequence[WeakHypothesis], x) -> tuple[ClassLabel, float]:
    """Weighted majority vote of the ensemble on one query.

    Each hypothesis adds its vote weight to the class it predicts; the class
    with the larger total wins and a tied vote resolves to 0. The score is
    the class-1 share of the total vote mass (0.5 when no mass was cast).
    """
    if not hypotheses:
        raise EmptyEnsemble("no hypotheses to vote with")
    mass0 = 0.0
    mass1 = 0.0
    for hyp in hypotheses:
        label, _ = knn_predict(hyp.model, x)
        if label == ClassLabel.POSITIVE:
            mass1 += hyp.vote_weight
        else:
            mass0 += hyp.vote_weight
    total = mass0 + mass1
    score = mass1 / total if total > 0.0 else 0.5
    label = ClassLabel.POSITIVE if mass1 > mass0 else ClassLabel.NEGATIVE
    return label, score


def _composite_predictions(
    prediction_rows: Sequence[np.ndarray], vote_weights: Sequence[float], n: int
) -> np.ndarray:
    mass0, mass1 = _vote_mass(prediction_rows, vote_weights, n)
    return (mass1 > mass0).astype(np.int64)


def composite_error(
    hypotheses: Sequence[WeakHypothesis],
    window: Sequence[LabeledInstance],
    dist: WeightDistribution,
) -> float:
    """Total weight of the window instances the composite vote misclassifies."""
    if not hypotheses:
        raise EmptyEnsemble("no hypotheses to vote with")
    if len(window) != len(dist):
        raise DimensionError(f"window has {len(window)} instances but distribution has {len(dist)}")
    features, labels = _window_arrays(window)
    rows = [knn_predict_batch(hyp.model, features)[0] for hyp in hypotheses]
    weights = [hyp.vote_weight for hyp in hypotheses]
    composite = _composite_predictions(rows, weights, len(window))
    return float(dist.weights[composite != labels].sum())


def normalize_composite_error(e: float) -> float:
    """Map a composite error E in (0, 0.5) to E/(1-E) in (0, 1)."""
    return e / (1.0 - e)


def update_weights(dist: WeightDistribution, correct_mask, decay: float) -> WeightDistribution:
    """Decay the weights of correctly classified instances by ``decay`` and
    renormalize. Misclassified instances keep their raw weight, so they gain
    relative mass."""
    mask = np.asarray(correct_mask, dtype=bool)
    if mask.shape != dist.weights.shape:
        raise DimensionError(
            f"mask has shape {mask.shape} but distribution has shape {dist.weights.shape}"
        )
    raw = np.where(mask, dist.weights * decay, dist.weights)
    return WeightDistribution(raw / raw.sum())


def run_round(
    window: Sequence[LabeledInstance],
    d0: WeightDistribution,
    config: LearnPPConfig,
    rng: np.random.Generator,
    prior: Sequence[WeakHypothesis] = (),
    window_ordinal: int = 0,
) -> tuple[list[WeakHypothesis], WeightDistribution]:
    """Run one training round over a window and return the accepted
    hypotheses plus the final weight distribution.

    The caller should hand in a window containing both classes; prior
    retained hypotheses participate in every composite evaluation. Each
    candidate is fit on a weight-proportional subset and judged on the whole
    window. A perfect candidate gets the floor normalized error instead of
    zero. After each acceptance, the composite error E of all hypotheses
    (prior and new) drives the weight update; E of zero stops the round, and
    E at or above one half leaves the weights untouched for that step.

    Raises RoundFailed after ``max_retries`` consecutive rejected candidates.
    """
    if len(window) == 0:
        raise EmptyWindow("cannot run a training round on an empty window")
    if len(d0) != len(window):
        raise DimensionError(f"window has {len(window)} instances but distribution has {len(d0)}")
    features, labels = _window_arrays(window)
    n = len(window)
    weights = np.array(d0.weights)

    prior_rows = [knn_predict_batch(hyp.model, features)[0] for hyp in prior]
    prior_votes = [hyp.vote_weight for hyp in prior]
    accepted: list[WeakHypothesis] = []
    accepted_rows: list[np.ndarray] = []
    consecutive_failures = 0

    while len(accepted) < config.n_estimators:
        dist = WeightDistribution(weights)
        subset_idx = sample_training_subset(dist, rng)
        candidate = knn_fit(config.knn, [window[i] for i in subset_idx])
        predictions, _ = knn_predict_batch(candidate, features)
        error = float(weights[predictions != labels].sum())

        if error >= config.error_threshold:
            consecutive_failures += 1
            logger.debug(
                "window %d: candidate rejected at weighted error %.4f (failure %d/%d)",
                window_ordinal, error, consecutive_failures, config.max_retries,
            )
            if consecutive_failures >= config.max_retries:
                raise RoundFailed(
                    f"window {window_ordinal}: {consecutive_failures} consecutive "
                    f"candidates at weighted error >= {config.error_threshold:g}"
                )
            continue
        consecutive_failures = 0

        norm_err = BETA_FLOOR if error == 0.0 else normalize_error(error)
        hypothesis = WeakHypothesis(candidate, norm_err, window_ordinal)
        accepted.append(hypothesis)
        accepted_rows.append(predictions)

        composite = _composite_predictions(
            prior_rows + accepted_rows,
            prior_votes + [hyp.vote_weight for hyp in accepted],
            n,
        )
        correct = composite == labels
        comp_error = float(weights[~correct].sum())
        if comp_error == 0.0:
            # the ensemble already masters this window; keep weights as-is
            break
        if comp_error < 0.5:
            decay = normalize_composite_error(comp_error)
            weights = np.where(correct, weights * decay, weights)
            weights /= weights.sum()
        # comp_error >= 0.5: keep the hypothesis but skip the weight update

    return accepted, WeightDistribution(weights)


class LearnPPModel:
    """Stateful incremental ensemble.

    Single writer: ``partial_fit``, ``flush_window``, and ``fit_initial``
    must not run concurrently with each other. ``predict`` only reads.
    """

    def __init__(self, config: LearnPPConfig):
        self.config = config
        self.hypotheses: list[WeakHypothesis] = []
        self.windows_completed = 0
        self._rng = np.random.default_rng(config.seed)
        self._buffer: list[tuple[LabeledInstance, bool]] = []

    @property
    def buffer_size(self) -> int:
        return len(self._buffer)

    def predict(self, x) -> tuple[ClassLabel, float]:
        """Composite vote of all retained hypotheses on one query."""
        return composite_vote(self.hypotheses, x)

    def fit_initial(self, window: Sequence[LabeledInstance]) -> None:
        """Train one full round on ``window`` under uniform weights.

        Used to bootstrap the ensemble before online updates begin. The
        pending buffer is untouched.
        """
        d0 = init_weights(len(window))
        new_hypotheses, _ = run_round(
            window, d0, self.config, self._rng,
            prior=self.hypotheses, window_ordinal=self.windows_completed,
        )
        self.hypotheses.extend(new_hypotheses)
        self.windows_completed += 1
        self._prune()

    def partial_fit(self, instance: LabeledInstance, was_correct: bool) -> "LearnPPModel":
        """Buffer one observed instance together with its online outcome.

        When the buffer reaches the configured window size, it becomes a
        training window: instances misclassified at arrival get double
        initial weight, one round runs, the new hypotheses join the
        ensemble, and the buffer clears. With ``window_size=None`` the
        buffer only converts when the caller invokes :meth:`flush_window`.

        If the round fails, the buffer is retained so the caller can retry,
        flush later, or resize.
        """
        self._buffer.append((instance, not was_correct))
        if self.config.window_size is not None and len(self._buffer) >= self.config.window_size:
            self.flush_window()
        return self

    def flush_window(self) -> None:
        """Turn the pending buffer into a training window and run one round.

        A buffer holding a single class cannot support a meaningful round;
        its instances are dropped with a warning. No-op on an empty buffer.
        """
        if not self._buffer:
            return
        window = [inst for inst, _ in self._buffer]
        present = {int(inst.label) for inst in window}
        if len(present) < 2:
            logger.warning(
                "window %d holds only class %d; dropping %d buffered instances",
                self.windows_completed, present.pop(), len(window),
            )
            self._buffer.clear()
            self.windows_completed += 1
            return
        raw = np.array([2.0 if misclassified else 1.0 for _, misclassified in self._buffer])
        d0 = WeightDistribution.normalized(raw)
        new_hypotheses, _ = run_round(
            window, d0, self.config, self._rng,
            prior=self.hypotheses, window_ordinal=self.windows_completed,
        )
        self.hypotheses.extend(new_hypotheses)
        self._buffer.clear()
        self.windows_completed += 1
        self._prune()

    def _prune(self) -> None:
        cap = self.config.max_window_ensembles
        if cap is None:
            return
        ordinals = sorted({hyp.window_ordinal for hyp in self.hypotheses})
        if len(ordinals) <= cap:
            return
        keep = set(ordinals[-cap:])
        dropped = len(self.hypotheses)
        self.hypotheses = [hyp for hyp in self.hypotheses if hyp.window_ordinal in keep]
        dropped -= len(self.hypotheses)
        logger.info("pruned %d hypotheses from the oldest window groups", dropped)
