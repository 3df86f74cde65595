"""Closed-form Mercer kernels and Gram-matrix construction.

Three kernels are supported::

    linear       K(x, y) = x.y
    polynomial   K(x, y) = (c + x.y) ** d
    gaussian     K(x, y) = exp(-||x - y||**2 / c)

The Gaussian width uses the *divisor* convention: ``c`` is the number the
squared distance is divided by, so ``gamma = 1 / c`` in the common
``exp(-gamma ||x - y||**2)`` parameterisation.  A width of ``c = 200`` is
``gamma = 0.005``.

Samples may be dense (1-D numpy arrays) or sparse (:class:`SparseVector`,
1-based strictly increasing indices).  Collections of samples are handled as
2-D arrays or ``scipy.sparse`` CSR matrices.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "KernelSpec",
    "SparseVector",
    "as_samples",
    "eval_kernel",
    "gram",
    "n_features",
]

KINDS = ("linear", "polynomial", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selection plus parameters.

    ``c`` is the polynomial offset for ``polynomial`` and the width divisor
    for ``gaussian``; ``d`` is the polynomial degree.
    """

    kind: str = "linear"
    c: float = 0.0
    d: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not np.isfinite(self.c):
            raise ValueError("kernel parameter c must be finite")
        if self.kind == "gaussian" and not self.c > 0:
            raise ValueError("gaussian width c must be > 0")
        if self.kind == "polynomial":
            if int(self.d) != self.d or self.d < 1:
                raise ValueError("polynomial degree must be an integer >= 1")
            if self.c < 0:
                raise ValueError("polynomial offset c must be >= 0")

    @classmethod
    def linear(cls) -> KernelSpec:
        return cls("linear")

    @classmethod
    def polynomial(cls, c: float = 1.0, d: int = 2) -> KernelSpec:
        return cls("polynomial", float(c), int(d))

    @classmethod
    def gaussian(cls, c: float) -> KernelSpec:
        return cls("gaussian", float(c))

    @property
    def gamma(self) -> float:
        """``1 / c`` for the Gaussian kernel (the usual RBF parameter)."""
        if self.kind != "gaussian":
            raise AttributeError("gamma is only defined for the gaussian kernel")
        return 1.0 / self.c

    @classmethod
    def parse(cls, text: str) -> KernelSpec:
        """Parse ``linear``, ``poly:c=<real>,d=<int>`` or ``gauss:c=<real>``."""
        text = text.strip()
        if text == "linear":
            return cls.linear()
        m = re.fullmatch(r"(poly|gauss):(.*)", text)
        if not m:
            raise ValueError(f"unknown kernel spec {text!r}")
        params = {}
        for item in m.group(2).split(","):
            key, sep, val = item.partition("=")
            if not sep or key.strip() in params:
                raise ValueError(f"bad kernel parameter {item!r} in {text!r}")
            params[key.strip()] = val.strip()
        try:
            if m.group(1) == "poly":
                if set(params) != {"c", "d"}:
                    raise ValueError
                return cls.polynomial(float(params["c"]), int(params["d"]))
            if set(params) != {"c"}:
                raise ValueError
            return cls.gaussian(float(params["c"]))
        except ValueError:
            raise ValueError(f"bad kernel spec {text!r}") from None

    def __str__(self) -> str:
        if self.kind == "linear":
            return "linear"
        if self.kind == "polynomial":
            return f"poly:c={self.c!r},d={self.d}"
        return f"gauss:c={self.c!r}"

    def apply(self, dots, sq_x=None, sq_y=None):
        """Turn linear inner products into kernel values.

        ``sq_x``/``sq_y`` are squared norms, needed only for the Gaussian,
        and must broadcast against ``dots``.
        """
        if self.kind == "linear":
            return dots
        if self.kind == "polynomial":
            return (self.c + dots) ** self.d
        dist2 = np.maximum(sq_x - 2.0 * dots + sq_y, 0.0)
        return np.exp(-dist2 / self.c)


@dataclass(frozen=True)
class SparseVector:
    """Sparse sample: 1-based strictly increasing indices, no stored zeros.

    ``dim`` is the nominal dimension; it defaults to the largest index (and
    is at least 1).  Shorter vectors are implicitly zero-padded.
    """

    indices: np.ndarray
    values: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        val = np.asarray(self.values, dtype=np.float64).ravel()
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (idx[0] < 1 or np.any(np.diff(idx) <= 0)):
            raise ValueError("sparse indices must be 1-based and strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("non-finite sparse value")
        keep = val != 0.0
        idx, val = idx[keep], val[keep]
        dim = max(int(self.dim), int(idx[-1]) if idx.size else 0, 1)
        if self.dim and idx.size and idx[-1] > self.dim:
            raise ValueError(f"index {idx[-1]} exceeds dimension {self.dim}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def from_dense(cls, x) -> SparseVector:
        x = np.asarray(x, dtype=np.float64).ravel()
        nz = np.flatnonzero(x)
        return cls(nz + 1, x[nz], x.size)

    @classmethod
    def from_dict(cls, entries: dict, dim: int = 0) -> SparseVector:
        keys = sorted(entries)
        return cls(np.array(keys, dtype=np.int64), np.array([entries[k] for k in keys]), dim)

    def to_dense(self, dim: int | None = None) -> np.ndarray:
        dim = self.dim if dim is None else dim
        if self.indices.size and self.indices[-1] > dim:
            raise ValueError(f"index {self.indices[-1]} exceeds dimension {dim}")
        out = np.zeros(dim)
        out[self.indices - 1] = self.values
        return out

    def dot(self, other) -> float:
        if isinstance(other, SparseVector):
            # index merge
            _, ia, ib = np.intersect1d(
                self.indices, other.indices, assume_unique=True, return_indices=True
            )
            return float(self.values[ia] @ other.values[ib])
        other = np.asarray(other, dtype=np.float64)
        inside = self.indices <= other.size
        return float(self.values[inside] @ other[self.indices[inside] - 1])

    def __len__(self) -> int:
        return self.dim


def _dense(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("a sample must be a nonempty 1-D vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite sample component")
    return x


def _dot(x, y) -> float:
    if isinstance(x, SparseVector):
        return x.dot(y)
    if isinstance(y, SparseVector):
        return y.dot(x)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return float(x @ y)


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Kernel value for one pair of samples (dense arrays or SparseVectors)."""
    if not isinstance(x, SparseVector):
        x = _dense(x)
    if not isinstance(y, SparseVector):
        y = _dense(y)
    xy = _dot(x, y)
    if spec.kind == "gaussian":
        return float(spec.apply(xy, _dot(x, x), _dot(y, y)))
    return float(spec.apply(xy))


def as_samples(samples, dim: int | None = None):
    """Normalise a sample collection to a 2-D float array or a CSR matrix.

    Accepts a 2-D array-like, a scipy sparse matrix, or a list of
    SparseVector / 1-D arrays.  Lists containing any SparseVector become CSR
    with width ``max(dim, widest sample)``.
    """
    if sp.issparse(samples):
        X = sp.csr_matrix(samples, dtype=np.float64)
        if dim is not None and dim > X.shape[1]:
            X = sp.csr_matrix((X.data, X.indices, X.indptr), shape=(X.shape[0], dim))
    elif isinstance(samples, np.ndarray) or not any(
        isinstance(s, SparseVector) for s in samples
    ):
        X = np.asarray(samples, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2:
            raise ValueError("samples must form a 2-D collection")
    else:
        rows = [s if isinstance(s, SparseVector) else SparseVector.from_dense(s) for s in samples]
        width = max([r.dim for r in rows] + [dim or 0])
        indptr = np.cumsum([0] + [r.indices.size for r in rows])
        indices = np.concatenate([r.indices - 1 for r in rows]) if rows else []
        data = np.concatenate([r.values for r in rows]) if rows else []
        X = sp.csr_matrix((data, indices, indptr), shape=(len(rows), width))
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError("empty sample collection")
    values = X.data if sp.issparse(X) else X
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite sample component")
    return X


def n_features(X) -> int:
    return X.shape[1]


def _align(X, Y):
    # sparse collections are zero-padded to a common width; dense ones must agree
    if X.shape[1] == Y.shape[1]:
        return X, Y
    if sp.issparse(X) and sp.issparse(Y):
        d = max(X.shape[1], Y.shape[1])
        X = sp.csr_matrix((X.data, X.indices, X.indptr), shape=(X.shape[0], d))
        Y = sp.csr_matrix((Y.data, Y.indices, Y.indptr), shape=(Y.shape[0], d))
        return X, Y
    raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")


def row_sq_norms(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray(X.multiply(X).sum(axis=1)).ravel()
    return np.einsum("ij,ij->i", X, X)


def _cross_dots(X, Y) -> np.ndarray:
    if sp.issparse(X) or sp.issparse(Y):
        prod = X @ Y.T
        return prod.toarray() if sp.issparse(prod) else np.asarray(prod)
    return X @ Y.T


def gram(spec: KernelSpec, samples, others=None) -> np.ndarray:
    """Kernel matrix ``K[i, j] = K(samples[i], others[j])``.

    With ``others`` omitted this is the symmetric Gram matrix of
    ``samples``; it is symmetrised explicitly so that ``K == K.T`` exactly.
    """
    X = as_samples(samples)
    Y = X if others is None else as_samples(others)
    X, Y = _align(X, Y)
    dots = _cross_dots(X, Y)
    if spec.kind == "gaussian":
        # squared norms from the same product keep duplicate rows at distance 0
        sx = np.diag(dots).copy() if others is None else row_sq_norms(X)
        sy = sx if others is None else row_sq_norms(Y)
        K = spec.apply(dots, sx[:, None], sy[None, :])
    else:
        K = spec.apply(dots)
    K = np.asarray(K, dtype=np.float64)
    if others is None:
        K = 0.5 * (K + K.T)
        if spec.kind == "gaussian":
            np.fill_diagonal(K, 1.0)
    return K
