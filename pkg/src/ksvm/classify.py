"""Binary soft-margin SVM: training, bias, decision function, risks."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .kernels import KernelSpec, as_samples, gram
from .qp import (
    DualSolution,
    KernelCache,
    SolverConfig,
    SvcDualProblem,
    compute_bias,
    solve_svc_dual,
    sv_threshold,
)

__all__ = [
    "SvcModel",
    "Risks",
    "train_svc",
    "compute_bias",
    "decision_value",
    "decision_values",
    "predict",
    "predict_labels",
    "hinge_loss",
    "empirical_risks",
    "linear_hyperplane",
]

log = logging.getLogger(__name__)


@dataclass
class SvcModel:
    """Sparse kernel expansion ``D(x) = sum_i coef_i K(sv_i, x) + b``.

    ``coef_i`` is the signed multiplier ``lambda_i * y_i``; only support
    vectors are kept.
    """

    kernel: KernelSpec
    support_vectors: object  # 2-D ndarray or CSR matrix
    coef: np.ndarray
    b: float
    dim: int
    C: float = float("nan")
    tol: float = float("nan")
    n_samples: int = 0
    seed: int | None = None
    support: np.ndarray | None = field(default=None, repr=False)
    solution: DualSolution | None = field(default=None, repr=False)

    @property
    def n_sv(self) -> int:
        return self.coef.size

    def decision_function(self, X) -> np.ndarray:
        return decision_values(self, X)

    def free_mask(self) -> np.ndarray:
        """Support vectors whose multiplier lies strictly inside (0, C)."""
        return np.abs(self.coef) < self.C - sv_threshold(self.C)


def _check_dim(model_dim: int, X) -> None:
    d = X.shape[1]
    if d != model_dim and not (sp.issparse(X) and d < model_dim):
        raise ValueError(f"dimension mismatch: model has {model_dim} features, data {d}")


def _samples_for(model, X):
    X = as_samples(X, dim=model.dim)
    _check_dim(model.dim, X)
    return X


def decision_values(model, X) -> np.ndarray:
    """Decision values for a batch; works for SvcModel and SvrModel alike."""
    X = _samples_for(model, X)
    if model.n_sv == 0:
        return np.full(X.shape[0], model.b)
    return gram(model.kernel, X, model.support_vectors) @ model.coef + model.b


def decision_value(model: SvcModel, x) -> float:
    return float(decision_values(model, [x])[0])


def predict_labels(model: SvcModel, X) -> np.ndarray:
    """Sign of the decision values; an exact zero maps to +1."""
    return np.where(decision_values(model, X) >= 0.0, 1, -1)


def predict(model: SvcModel, x) -> int:
    return 1 if decision_value(model, x) >= 0.0 else -1


def _binary_labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    for lab in (-1.0, 1.0):
        if not np.any(y == lab):
            raise ValueError(f"class {int(lab):+d} is empty")
    return y


def train_svc(
    X,
    y,
    kernel: KernelSpec = KernelSpec.linear(),
    C: float = 1.0,
    config: SolverConfig = SolverConfig(),
    seed: int | None = None,
) -> SvcModel:
    """Train a soft-margin SVM on ``(X, y)`` with labels in {-1, +1}.

    ``seed`` is recorded in the model metadata only; training is
    deterministic.
    """
    X = as_samples(X)
    y = _binary_labels(y)
    if y.size != X.shape[0]:
        raise ValueError("sample and label counts differ")
    problem = SvcDualProblem(KernelCache(kernel, X, config.cache_bytes), y, C)
    sol = solve_svc_dual(problem, config)
    support = np.flatnonzero(sol.lambdas > sv_threshold(C))
    return SvcModel(
        kernel=kernel,
        support_vectors=X[support],
        coef=sol.lambdas[support] * y[support],
        b=sol.b,
        dim=X.shape[1],
        C=float(C),
        tol=config.tol,
        n_samples=y.size,
        seed=seed,
        support=support,
        solution=sol,
    )


def hinge_loss(y, f):
    """``(1 - y f)_+``, elementwise."""
    return np.maximum(0.0, 1.0 - np.asarray(y) * np.asarray(f))


@dataclass
class Risks:
    hinge: float
    objective: float
    error_rate: float
    w_norm2: float
    mu: float


def rkhs_norm2(model) -> float:
    """``||w||^2 = sum_ij coef_i coef_j K(sv_i, sv_j)``."""
    if model.n_sv == 0:
        return 0.0
    K = gram(model.kernel, model.support_vectors)
    return float(model.coef @ K @ model.coef)


def empirical_risks(model: SvcModel, X, y) -> Risks:
    """Hinge risk, regularised objective at ``mu = 1/(2 C n)`` and error rate.

    ``n`` is the number of samples in ``(X, y)``.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    f = decision_values(model, X)
    hinge = float(hinge_loss(y, f).mean())
    w2 = rkhs_norm2(model)
    mu = 1.0 / (2.0 * model.C * y.size)
    err = float(np.mean(np.where(f >= 0.0, 1.0, -1.0) != y))
    return Risks(hinge, hinge + mu * w2, err, w2, mu)


def linear_hyperplane(model: SvcModel):
    """Explicit ``(w, b)`` of a linear-kernel model.

    Returns ``w, b, normalized`` where ``normalized`` rescales the line so
    that its leading coefficient is 1.
    """
    if model.kernel.kind != "linear":
        raise ValueError("explicit hyperplane needs the linear kernel")
    S = model.support_vectors
    w = np.asarray(S.T @ model.coef).ravel() if model.n_sv else np.zeros(model.dim)
    line = np.append(w, model.b)
    return w, model.b, line / line[0]
