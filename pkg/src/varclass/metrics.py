"""Accuracy, ROC AUC, cross-entropy and the letter-grade scoreboard."""
from __future__ import annotations

from collections import Counter
from enum import Enum

import numpy as np
from scipy.stats import rankdata

from .errors import DataError, ShapeError


class Grade(Enum):
    A = 1
    B = 2
    C = 3
    D = 4
    F = 5

    @property
    def weight(self) -> int:
        return self.value


# Lower bounds of each grade band, checked from the top.
_GRADE_FLOORS = ((0.9, Grade.A), (0.8, Grade.B), (0.7, Grade.C), (0.6, Grade.D))


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.shape[0] == 0:
        raise DataError("empty input")
    return a, b


def accuracy(predictions, labels) -> float:
    """Percentage of predictions equal to the labels."""
    p, y = _pair(predictions, labels)
    return 100.0 * np.count_nonzero(p == y) / p.shape[0]


def roc_auc(scores, labels) -> float:
    """Mann-Whitney estimate of the area under the ROC curve.

    Ties between a positive and a negative score count one half. Computed
    from average ranks in O(n log n).
    """
    s, y = _pair(scores, labels)
    s = s.astype(float)
    pos = y == 1
    n_pos = int(np.count_nonzero(pos))
    n_neg = int(np.count_nonzero(y == 0))
    if n_pos + n_neg != y.shape[0]:
        raise DataError("labels must be 0 or 1")
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC is undefined when only one class is present")
    ranks = rankdata(s)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def cross_entropy(sigma_values, labels) -> float:
    """Mean binary cross-entropy; probabilities are clamped away from 0 and 1."""
    p, y = _pair(sigma_values, labels)
    eps = np.finfo(float).eps
    p = np.clip(p.astype(float), eps, 1.0 - eps)
    y = y.astype(float)
    return float(np.mean(-y * np.log(p) - (1.0 - y) * np.log1p(-p)))


def grade(auc: float) -> Grade:
    """Letter grade for an AUC. Bands are closed below; anything under 0.6 is F."""
    if not 0.0 <= auc <= 1.0:
        raise ValueError(f"AUC must lie in [0, 1], got {auc}")
    for floor, letter in _GRADE_FLOORS:
        if auc >= floor:
            return letter
    return Grade.F


def tally(grades) -> dict:
    """Count grades; every letter is present in the result, possibly with 0."""
    counts = Counter(Grade[g] if isinstance(g, str) else g for g in grades)
    return {g: counts.get(g, 0) for g in Grade}


def weighted_grade_total(counts) -> int:
    """Sum of count * weight with A=1 ... F=5. Lower is better."""
    total = 0
    for g, n in counts.items():
        g = Grade[g] if isinstance(g, str) else g
        if n < 0:
            raise ValueError("grade counts must be nonnegative")
        total += g.weight * int(n)
    return total
