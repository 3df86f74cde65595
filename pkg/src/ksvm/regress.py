"""Epsilon-insensitive support vector regression."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import decision_values, rkhs_norm2
from .kernels import KernelSpec, as_samples
from .qp import KernelCache, SolverConfig, SvrDualSolution, solve_svr_dual, sv_threshold

__all__ = [
    "SvrModel",
    "train_svr",
    "predict_svr",
    "predict_svr_batch",
    "epsilon_loss",
    "svr_primal_objective",
]


@dataclass
class SvrModel:
    """``f(x) = sum_i beta_i K(sv_i, x) + b`` with ``|beta_i| <= C``."""

    kernel: KernelSpec
    support_vectors: object
    coef: np.ndarray
    b: float
    epsilon: float
    dim: int
    C: float = float("nan")
    tol: float = float("nan")
    n_samples: int = 0
    seed: int | None = None
    support: np.ndarray | None = field(default=None, repr=False)
    solution: SvrDualSolution | None = field(default=None, repr=False)

    @property
    def n_sv(self) -> int:
        return self.coef.size

    def predict(self, X) -> np.ndarray:
        return decision_values(self, X)


def epsilon_loss(y, f, epsilon: float):
    """``(|f - y| - epsilon)_+``; zero inside the tube."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    return np.maximum(np.abs(np.asarray(f) - np.asarray(y)) - epsilon, 0.0)


def train_svr(
    X,
    y,
    kernel: KernelSpec = KernelSpec.linear(),
    C: float = 1.0,
    epsilon: float = 0.1,
    config: SolverConfig = SolverConfig(),
    seed: int | None = None,
) -> SvrModel:
    X = as_samples(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != X.shape[0]:
        raise ValueError("sample and target counts differ")
    sol = solve_svr_dual(KernelCache(kernel, X, config.cache_bytes), y, C, epsilon, config)
    support = np.flatnonzero(np.abs(sol.beta) > sv_threshold(C))
    return SvrModel(
        kernel=kernel,
        support_vectors=X[support],
        coef=sol.beta[support],
        b=sol.b,
        epsilon=float(epsilon),
        dim=X.shape[1],
        C=float(C),
        tol=config.tol,
        n_samples=y.size,
        seed=seed,
        support=support,
        solution=sol,
    )


def predict_svr_batch(model: SvrModel, X) -> np.ndarray:
    return decision_values(model, X)


def predict_svr(model: SvrModel, x) -> float:
    return float(decision_values(model, [x])[0])


def svr_primal_objective(model: SvrModel, X, y) -> float:
    """``1/2 ||w||^2 + C sum_i (|f(x_i) - y_i| - eps)_+`` on ``(X, y)``."""
    f = decision_values(model, X)
    return 0.5 * rkhs_norm2(model) + model.C * float(epsilon_loss(y, f, model.epsilon).sum())
