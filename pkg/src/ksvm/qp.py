"""Dual quadratic programs for soft-margin classification and SVR.

The classification dual is::

    minimise    1/2 sum_ij l_i l_j y_i y_j K_ij - sum_i l_i
    subject to  sum_i y_i l_i = 0,   0 <= l_i <= C

Both it and the regression dual are solved by the same SMO-style routine:
two multipliers move at a time, chosen as the maximal violating pair of the
first-order optimality conditions, with ties going to the lowest index.

:func:`brute_force_dual` is an independent accelerated projected-gradient
solver for tiny problems, used to check the SMO results.
"""
from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelSpec, as_samples, gram, row_sq_norms, _cross_dots

__all__ = [
    "SolverConfig",
    "SolverError",
    "KernelCache",
    "SvcDualProblem",
    "DualSolution",
    "SvrDualSolution",
    "KKTReport",
    "solve_svc_dual",
    "solve_svr_dual",
    "dual_objective",
    "kkt_report",
    "compute_bias",
    "brute_force_dual",
]

log = logging.getLogger(__name__)

FULL_GRAM_LIMIT = 4000
BRUTE_FORCE_MAX_N = 8


class SolverError(RuntimeError):
    """Raised when the solver cannot reach the requested tolerance.

    The best iterate found is attached as ``lambdas`` together with its
    residual pairwise violation.
    """

    def __init__(self, message, lambdas=None, violation=float("nan"), iterations=0):
        super().__init__(message)
        self.lambdas = lambdas
        self.violation = violation
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-3
    max_iter: int = 10_000_000
    cache_bytes: int = 256 * 2**20

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


class KernelCache:
    """Row access to a kernel matrix.

    Up to ``FULL_GRAM_LIMIT`` samples the whole Gram matrix is computed once.
    Beyond that rows are computed on demand and kept in an LRU cache bounded
    by ``cache_bytes``.
    """

    def __init__(self, spec: KernelSpec, samples, cache_bytes: int = 256 * 2**20):
        self.spec = spec
        self.X = as_samples(samples)
        self.n = self.X.shape[0]
        self._sq = row_sq_norms(self.X)
        self._full = gram(spec, self.X) if self.n <= FULL_GRAM_LIMIT else None
        self._rows = OrderedDict()
        self._max_rows = max(2, cache_bytes // (8 * self.n))
        if self._full is not None:
            self.diag = np.diag(self._full).copy()
        elif spec.kind == "gaussian":
            self.diag = np.ones(self.n)
        else:
            self.diag = np.asarray(spec.apply(self._sq), dtype=np.float64)

    @classmethod
    def from_matrix(cls, K) -> KernelCache:
        K = np.asarray(K, dtype=np.float64)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError("kernel matrix must be square")
        self = cls.__new__(cls)
        self.spec = None
        self.X = None
        self.n = K.shape[0]
        self._full = K
        self._rows = OrderedDict()
        self.diag = np.diag(K).copy()
        return self

    def row(self, i: int) -> np.ndarray:
        if self._full is not None:
            return self._full[i]
        r = self._rows.get(i)
        if r is not None:
            self._rows.move_to_end(i)
            return r
        dots = _cross_dots(self.X[i : i + 1], self.X).ravel()
        r = np.asarray(self.spec.apply(dots, self._sq[i], self._sq), dtype=np.float64)
        self._rows[i] = r
        if len(self._rows) > self._max_rows:
            self._rows.popitem(last=False)
        return r

    def matrix(self) -> np.ndarray:
        if self._full is None:
            return np.vstack([self.row(i) for i in range(self.n)])
        return self._full

    def dot(self, coef) -> np.ndarray:
        """``K @ coef``, touching only rows with nonzero coefficient."""
        if self._full is not None:
            return self._full @ coef
        out = np.zeros(self.n)
        for i in np.flatnonzero(coef):
            out += coef[i] * self.row(i)
        return out


def _as_cache(K) -> KernelCache:
    return K if isinstance(K, KernelCache) else KernelCache.from_matrix(K)


@dataclass
class SvcDualProblem:
    """Soft-margin classification dual: kernel rows, +/-1 labels, cost ``C``."""

    K: KernelCache
    y: np.ndarray
    C: float

    def __post_init__(self):
        self.K = _as_cache(self.K)
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if self.y.size != self.K.n:
            raise ValueError("kernel order and label count differ")
        if not (np.any(self.y > 0) and np.any(self.y < 0)):
            raise ValueError("both classes must be present")
        if not (np.isfinite(self.C) and self.C > 0):
            raise ValueError("C must be finite and > 0")

    @property
    def n(self) -> int:
        return self.y.size


@dataclass
class DualSolution:
    lambdas: np.ndarray
    b: float
    objective: float
    iterations: int
    violation: float

    def summary(self) -> str:
        return (
            f"iterations={self.iterations} violation={self.violation:.3g} "
            f"objective={self.objective:.10g}"
        )


@dataclass
class SvrDualSolution:
    """Regression dual result; unpacks as ``beta, b``."""

    beta: np.ndarray
    b: float
    objective: float
    iterations: int
    violation: float
    alphas: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        return iter((self.beta, self.b))

    def summary(self) -> str:
        return (
            f"iterations={self.iterations} violation={self.violation:.3g} "
            f"objective={self.objective:.10g}"
        )


def _violating_pair(a, G, s, C):
    v = -s * G
    up = np.where(s > 0, a < C, a > 0)
    low = np.where(s > 0, a > 0, a < C)
    vu = np.where(up, v, -np.inf)
    vl = np.where(low, v, np.inf)
    i = int(np.argmax(vu))
    j = int(np.argmin(vl))
    return i, j, vu[i], vl[j]


def _smo(row, diag, s, p, C, tol, max_iter):
    """Minimise 1/2 a'Qa + p'a, Q_tu = s_t s_u K_tu, s'a = 0, 0 <= a <= C.

    ``row(t)`` must return kernel row ``K[t, :]`` over all variables.
    Returns the multipliers, the gradient, the iteration count and the final
    maximal pairwise violation.
    """
    m = s.size
    a = np.zeros(m)
    G = p.astype(np.float64).copy()
    it = 0
    while True:
        i, j, vi, vj = _violating_pair(a, G, s, C)
        gap = vi - vj
        if gap <= tol:
            return a, G, it, max(gap, 0.0)
        if it >= max_iter:
            raise SolverError(
                f"iteration budget {max_iter} exhausted, violation {gap:.3g}",
                lambdas=a,
                violation=gap,
                iterations=it,
            )
        Ki = row(i)
        Kj = row(j)
        curv = diag[i] + diag[j] - 2.0 * Ki[j]
        if curv <= 1e-12:
            curv = 1e-12
        room_i = C - a[i] if s[i] > 0 else a[i]
        room_j = a[j] if s[j] > 0 else C - a[j]
        t = min(gap / curv, room_i, room_j)
        # land exactly on the box face when a bound is hit
        a[i] = (C if s[i] > 0 else 0.0) if t == room_i else a[i] + s[i] * t
        a[j] = (0.0 if s[j] > 0 else C) if t == room_j else a[j] - s[j] * t
        G += t * s * (Ki - Kj)
        it += 1


def _bias(a, G, s, C, thr):
    """Bias from the multipliers and gradient.

    With free multipliers on both sides the per-side means of ``-s G`` are
    averaged (one free point per side gives back the two-point formula);
    otherwise the midpoint of the interval allowed by the KKT conditions.
    """
    v = -s * G
    free = (a > thr) & (a < C - thr)
    pos, neg = free & (s > 0), free & (s < 0)
    if pos.any() and neg.any():
        return 0.5 * (v[pos].mean() + v[neg].mean())
    up = np.where(s > 0, a < C - thr, a > thr)
    low = np.where(s > 0, a > thr, a < C - thr)
    lo = v[up].max() if up.any() else None
    hi = v[low].min() if low.any() else None
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return 0.5 * (lo + hi)


def sv_threshold(C: float) -> float:
    """Multipliers at or below this count as zero (and within it of C as bound)."""
    return 1e-8 * C


def compute_bias(problem: SvcDualProblem, lambdas) -> float:
    """Bias for given classification multipliers.

    Averages the two-support-vector bias formula over every pairing of a
    free support vector from each class.  When one class has no free
    support vector, the midpoint of the KKT-admissible interval is used.
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    thr = sv_threshold(problem.C)
    if not np.any(lam > thr):
        raise ValueError("no support vectors: all multipliers are zero")
    coef = lam * problem.y
    G = problem.y * problem.K.dot(coef) - 1.0
    return float(_bias(lam, G, problem.y, problem.C, thr))


def dual_objective(problem: SvcDualProblem, lambdas) -> float:
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.size != problem.n:
        raise ValueError("multiplier count does not match problem order")
    coef = lam * problem.y
    return float(0.5 * coef @ problem.K.dot(coef) - lam.sum())


def solve_svc_dual(problem: SvcDualProblem, config: SolverConfig = SolverConfig()) -> DualSolution:
    s = problem.y
    lam, G, it, gap = _smo(
        problem.K.row, problem.K.diag, s, -np.ones(problem.n), problem.C, config.tol, config.max_iter
    )
    b = _bias(lam, G, s, problem.C, sv_threshold(problem.C))
    obj = 0.5 * float(lam @ (G + 1.0)) - float(lam.sum())
    sol = DualSolution(lam, float(b), obj, it, gap)
    log.debug("svc dual: %s", sol.summary())
    return sol


def solve_svr_dual(K, targets, C: float, epsilon: float, config: SolverConfig = SolverConfig()):
    """Solve the epsilon-insensitive regression dual.

    Variables are the pairs ``(a_i, a'_i)`` for the two tube constraints of
    each sample; the regression function is ``sum_i beta_i K(x_i, x) + b``
    with ``beta = a - a'``.  The dual minimised is::

        1/2 beta'K beta + eps sum(a + a') - y'beta,
        sum(beta) = 0,  0 <= a, a' <= C
    """
    K = _as_cache(K)
    y = np.asarray(targets, dtype=np.float64).ravel()
    n = K.n
    if y.size != n:
        raise ValueError("kernel order and target count differ")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite target")
    if not (np.isfinite(C) and C > 0):
        raise ValueError("C must be finite and > 0")
    if not epsilon >= 0:
        raise ValueError("epsilon must be >= 0")
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    diag = np.concatenate([K.diag, K.diag])

    def row(t):
        r = K.row(t % n)
        return np.concatenate([r, r])

    a, G, it, gap = _smo(row, diag, s, p, C, config.tol, config.max_iter)
    beta = a[:n] - a[n:]
    b = _bias(a, G, s, C, sv_threshold(C))
    obj = 0.5 * float(a @ (G + p))
    sol = SvrDualSolution(beta, float(b), obj, it, gap, alphas=a)
    log.debug("svr dual: %s", sol.summary())
    return sol


@dataclass
class KKTReport:
    violations: np.ndarray
    max_violation: float


def kkt_report(problem: SvcDualProblem, solution: DualSolution) -> KKTReport:
    """Per-sample violation of the complementarity conditions.

    With ``m = y D(x)``: a zero multiplier needs ``m >= 1``, a free one
    ``m == 1`` and one at ``C`` needs ``m <= 1``.  Violations are measured
    in units of the functional margin.
    """
    lam = np.asarray(solution.lambdas, dtype=np.float64)
    thr = sv_threshold(problem.C)
    margin = problem.y * (problem.K.dot(lam * problem.y) + solution.b)
    at_zero = lam <= thr
    at_c = lam >= problem.C - thr
    viol = np.abs(margin - 1.0)
    viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    viol[at_c & ~at_zero] = np.maximum(0.0, margin[at_c & ~at_zero] - 1.0)
    return KKTReport(viol, float(viol.max()))


def _project(v, y, C):
    """Euclidean projection onto {l : y'l = 0, 0 <= l <= C}.

    ``sum_i y_i clip(v_i - nu y_i, 0, C)`` is piecewise linear and
    nonincreasing in ``nu``; its root is located exactly between
    breakpoints.
    """

    knots = np.unique(np.concatenate([v * y, (v - C) * y]))
    hk = np.clip(v[None, :] - knots[:, None] * y[None, :], 0.0, C) @ y
    if hk[0] <= 0.0 and hk[0] >= 0.0:
        nu = knots[0]
    elif hk[-1] >= 0.0 and hk[-1] <= 0.0:
        nu = knots[-1]
    else:
        k = int(np.searchsorted(-hk, 0.0))
        lo, hi = knots[k - 1], knots[k]
        flo, fhi = hk[k - 1], hk[k]
        nu = hi if fhi == 0.0 else lo + (hi - lo) * flo / (flo - fhi)
    return np.clip(v - nu * y, 0.0, C)


def brute_force_dual(problem: SvcDualProblem, tol: float = 1e-9, max_iter: int = 200_000) -> DualSolution:
    """Reference solver for problems with at most 8 samples.

    Nesterov-accelerated projected gradient with step ``1/L`` and
    function-value restarts, stopped when the gradient mapping norm falls
    below ``tol``.
    """
    n = problem.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force oracle limited to {BRUTE_FORCE_MAX_N} samples, got {n}")
    y, C = problem.y, problem.C
    Q = np.outer(y, y) * problem.K.matrix()
    # floor keeps a single step within the box scale when Q is (near) zero
    L = max(float(np.linalg.eigvalsh(Q)[-1]), 1.0 / C)

    def f(lam):
        return 0.5 * lam @ Q @ lam - lam.sum()

    lam = np.zeros(n)
    z, theta, f_prev = lam.copy(), 1.0, f(lam)
    gm = np.inf
    it = 0
    while it < max_iter:
        it += 1
        new = _project(z - (Q @ z - 1.0) / L, y, C)
        f_new = f(new)
        if f_new > f_prev and theta > 1.0:
            # restart momentum from the last iterate; a plain step is always taken
            z, theta = lam.copy(), 1.0
            continue
        theta_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
        z = new + ((theta - 1.0) / theta_next) * (new - lam)
        lam, theta, f_prev = new, theta_next, f_new
        gm = L * np.linalg.norm(lam - _project(lam - (Q @ lam - 1.0) / L, y, C))
        if gm <= tol:
            break
    lam = np.clip(lam, 0.0, C)
    b = compute_bias(problem, lam)
    return DualSolution(lam, b, float(f(lam)), it, float(gm))
