"""Binary classification metrics over prediction records. Class 1 is positive."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import PredictionRecord
from .errors import UndefinedAUC

__all__ = ["ConfusionCounts", "confusion", "f1", "fnr", "auc"]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(records: Sequence[PredictionRecord]) -> ConfusionCounts:
    tp = fp = tn = fn = 0
    for record in records:
        if record.predicted == 1:
            if record.truth == 1:
                tp += 1
            else:
                fp += 1
        else:
            if record.truth == 1:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def f1(counts: ConfusionCounts) -> float:
    """Harmonic mean of precision and recall; 0.0 when there are no true
    positives (covers the empty and degenerate cases)."""
    if counts.tp == 0:
        return 0.0
    precision = counts.tp / (counts.tp + counts.fp)
    recall = counts.tp / (counts.tp + counts.fn)
    return 2.0 * precision * recall / (precision + recall)


def fnr(counts: ConfusionCounts) -> float:
    """Miss rate fn/(fn+tp); 0.0 when no positives exist."""
    positives = counts.fn + counts.tp
    if positives == 0:
        return 0.0
    return counts.fn / positives


def auc(records: Sequence[PredictionRecord]) -> float:
    """Rank-based AUC of the class-1 scores.

    Equals the probability that a random positive outscores a random
    negative, counting score ties as one half. Computed from midrank sums in
    O(n log n).
    """
    scores = np.array([record.score for record in records], dtype=np.float64)
    truth = np.array([int(record.truth) for record in records], dtype=np.int64)
    n_pos = int(truth.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUC(
            f"need both classes, got {n_pos} positives and {n_neg} negatives"
        )
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(truth.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < truth.size:
        j = i
        while j + 1 < truth.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # midrank of the tie group, 1-based
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = ranks[truth == 1].sum()
    u_statistic = rank_sum - n_pos * (n_pos + 1) / 2.0
    return float(u_statistic / (n_pos * n_neg))
