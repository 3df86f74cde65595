"""One-against-one multiclass classification by pairwise voting.

For ``k`` classes, ``k(k-1)/2`` binary machines are trained, one per pair
``(i, j)`` with ``i < j`` in class order; ``+1`` stands for class ``i``.
Each machine casts one vote.  Ties between the most-voted classes go to the
class with the larger sum of ``|decision value|`` over the votes it won,
then to the earlier class.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .classify import SvcModel, decision_values, train_svc
from .kernels import KernelSpec, as_samples
from .qp import SolverConfig

__all__ = ["MulticlassModel", "train_ovo", "vote_tally", "predict_vote", "predict_votes"]


@dataclass
class MulticlassModel:
    classes: list
    models: dict  # (i, j) class positions -> SvcModel
    kernel: KernelSpec
    C: float

    def __post_init__(self):
        k = len(self.classes)
        if k < 2 or len(set(self.classes)) != k:
            raise ValueError("need at least two distinct classes")
        if sorted(self.models) != list(combinations(range(k), 2)):
            raise ValueError("expected one model per unordered class pair")

    @property
    def dim(self) -> int:
        return next(iter(self.models.values())).dim

    def predict(self, X) -> np.ndarray:
        return predict_votes(self, X)


def train_ovo(
    X,
    labels,
    kernel: KernelSpec = KernelSpec.linear(),
    C: float = 1.0,
    config: SolverConfig = SolverConfig(),
    classes=None,
) -> MulticlassModel:
    """Train every pairwise machine on its two classes' samples only."""
    X = as_samples(X)
    labels = np.asarray(labels)
    if labels.size != X.shape[0]:
        raise ValueError("sample and label counts differ")
    classes = sorted(set(labels.tolist())) if classes is None else list(classes)
    for c in classes:
        if not np.any(labels == c):
            raise ValueError(f"class {c!r} has no samples")
    if not np.all(np.isin(labels, classes)):
        raise ValueError("labels outside the class list")
    models = {}
    for i, j in combinations(range(len(classes)), 2):
        mask = (labels == classes[i]) | (labels == classes[j])
        y = np.where(labels[mask] == classes[i], 1.0, -1.0)
        models[i, j] = train_svc(X[np.flatnonzero(mask)], y, kernel, C, config)
    return MulticlassModel(classes, models, kernel, float(C))


def vote_tally(model: MulticlassModel, X):
    """Vote counts and won-|decision| sums, each of shape ``(n, k)``."""
    X = as_samples(X, dim=model.dim)
    n, k = X.shape[0], len(model.classes)
    votes = np.zeros((n, k), dtype=np.int64)
    strength = np.zeros((n, k))
    rows = np.arange(n)
    for (i, j), m in model.models.items():
        d = decision_values(m, X)
        winner = np.where(d >= 0.0, i, j)
        votes[rows, winner] += 1
        strength[rows, winner] += np.abs(d)
    return votes, strength


def _resolve(votes, strength):
    top = votes == votes.max(axis=1, keepdims=True)
    # lexicographic: votes, then strength; argmax keeps the first class on exact ties
    score = np.where(top, strength, -np.inf)
    return np.argmax(score, axis=1)


def predict_votes(model: MulticlassModel, X) -> np.ndarray:
    votes, strength = vote_tally(model, X)
    idx = _resolve(votes, strength)
    return np.asarray(model.classes)[idx]


def predict_vote(model: MulticlassModel, x):
    return predict_votes(model, [x])[0]
