"""Synthetic generators, dataset files and train/test splitting.

All generators draw from ``numpy.random.default_rng(seed)`` (the PCG64 bit
generator); normal deviates come from numpy's ziggurat ``standard_normal``.
The generator identifier is exposed as :data:`RNG_NAME` so experiment
reports can record it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "RNG_NAME",
    "LabeledDataset",
    "SparseFormatError",
    "WaveformSpec",
    "BlobSpec",
    "waveform_basis",
    "waveform_sample",
    "gen_waveform",
    "gen_blobs",
    "gen_topics",
    "read_sparse",
    "write_sparse",
    "read_csv",
    "write_csv",
    "read_dataset",
    "split",
    "split_counts",
]

RNG_NAME = f"numpy-{np.__version__}/PCG64"

WAVEFORM_DIM = 21
# class -> (first, second) basis waveform; x = u*h_first + (1-u)*h_second
WAVEFORM_CLASSES = {1: (1, 2), 2: (1, 3), 3: (2, 3)}


@dataclass
class LabeledDataset:
    """Samples (2-D array or CSR matrix) with one label or target each."""

    X: object
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y).ravel()
        if self.X.shape[0] != self.y.size:
            raise ValueError("sample and label counts differ")
        if self.X.ndim != 2 or self.X.shape[1] < 1:
            raise ValueError("samples must be a 2-D collection with dim >= 1")

    def __len__(self) -> int:
        return self.y.size

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> LabeledDataset:
        idx = np.asarray(idx)
        return LabeledDataset(self.X[idx], self.y[idx], dict(self.meta))


class SparseFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


# --- waveform -------------------------------------------------------------


@dataclass(frozen=True)
class WaveformSpec:
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("waveform sample count must be >= 3")


def _h1(i):
    return np.maximum(6 - np.abs(np.asarray(i) - 11), 0)


def waveform_basis(i: int):
    """Values ``(h1(i), h2(i), h3(i))`` of the three triangular waveforms."""
    if int(i) != i or not 1 <= i <= WAVEFORM_DIM:
        raise ValueError(f"waveform coordinate must be an integer in 1..21, got {i}")
    return int(_h1(i)), int(_h1(i - 4)), int(_h1(i + 4))


_COORDS = np.arange(1, WAVEFORM_DIM + 1)
_BASIS = np.vstack([_h1(_COORDS), _h1(_COORDS - 4), _h1(_COORDS + 4)]).astype(np.float64)


def waveform_sample(cls: int, u: float, noise=None) -> np.ndarray:
    """One noiseless (or given-noise) waveform of class 1, 2 or 3."""
    first, second = WAVEFORM_CLASSES[cls]
    x = u * _BASIS[first - 1] + (1.0 - u) * _BASIS[second - 1]
    return x if noise is None else x + noise


def gen_waveform(spec: WaveformSpec, u: float | None = None, noise: bool = True) -> LabeledDataset:
    """Draw waveform samples with equal class priors.

    Per sample: class uniform on {1, 2, 3}, one ``u ~ U(0, 1)``, and 21
    independent standard normal noise terms.  ``u`` and ``noise`` override
    the draws (test hooks); the random stream is consumed identically either
    way.
    """
    rng = np.random.default_rng(spec.seed)
    cls = rng.integers(1, 4, size=spec.n)
    us = rng.random(spec.n)
    eps = rng.standard_normal((spec.n, WAVEFORM_DIM))
    if u is not None:
        us = np.full(spec.n, float(u))
    if not noise:
        eps = np.zeros_like(eps)
    first = np.array([WAVEFORM_CLASSES[c][0] for c in range(1, 4)])[cls - 1]
    second = np.array([WAVEFORM_CLASSES[c][1] for c in range(1, 4)])[cls - 1]
    X = us[:, None] * _BASIS[first - 1] + (1.0 - us[:, None]) * _BASIS[second - 1] + eps
    meta = {"generator": "waveform", "n": spec.n, "seed": spec.seed, "rng": RNG_NAME}
    return LabeledDataset(X, cls, meta)


# --- Gaussian blobs -------------------------------------------------------


@dataclass(frozen=True)
class BlobSpec:
    """Identity-covariance normal clouds.

    Two clouds are labelled -1 and +1 in order; more are labelled 1..k.
    """

    means: tuple
    counts: tuple | int = 1000
    seed: int = 0

    def __post_init__(self):
        means = tuple(tuple(float(v) for v in m) for m in self.means)
        if len(means) < 2 or len({len(m) for m in means}) != 1:
            raise ValueError("need >= 2 mean vectors of equal length")
        if not all(math.isfinite(v) for m in means for v in m):
            raise ValueError("means must be finite")
        counts = self.counts
        counts = (int(counts),) * len(means) if np.isscalar(counts) else tuple(int(c) for c in counts)
        if len(counts) != len(means) or min(counts) < 1:
            raise ValueError("one count >= 1 per class")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "counts", counts)

    @property
    def labels(self) -> list:
        k = len(self.means)
        return [-1, 1] if k == 2 else list(range(1, k + 1))


def gen_blobs(spec: BlobSpec, noise: bool = True) -> LabeledDataset:
    rng = np.random.default_rng(spec.seed)
    parts, labels = [], []
    for mean, count, lab in zip(spec.means, spec.counts, spec.labels):
        dev = rng.standard_normal((count, len(mean)))
        parts.append(np.asarray(mean) + (dev if noise else np.zeros_like(dev)))
        labels.append(np.full(count, lab))
    meta = {
        "generator": "blobs",
        "means": spec.means,
        "counts": spec.counts,
        "seed": spec.seed,
        "rng": RNG_NAME,
    }
    return LabeledDataset(np.vstack(parts), np.concatenate(labels), meta)


# --- two-topic sparse "documents" ----------------------------------------


def gen_topics(
    n: int = 1000,
    dim: int = 700,
    seed: int = 0,
    topic_words: int = 40,
    doc_length: int = 30,
    topic_rate: float = 0.15,
) -> LabeledDataset:
    """Bag-of-words documents from two topics, as L2-normalised term counts.

    Each document has ``doc_length`` tokens.  A token is drawn from its
    class's private block of ``topic_words`` terms with probability
    ``topic_rate``, otherwise from a Zipf-weighted shared vocabulary.
    Labels are -1 and +1 with equal probability.
    """
    if dim <= 2 * topic_words:
        raise ValueError(f"topics need dim > {2 * topic_words} (two topic blocks plus shared words)")
    if n < 1 or doc_length < 1 or not 0.0 <= topic_rate <= 1.0:
        raise ValueError("bad topic generator parameters")
    rng = np.random.default_rng(seed)
    shared = np.arange(2 * topic_words, dim)
    zipf = 1.0 / np.arange(1, shared.size + 1)
    zipf /= zipf.sum()
    y = np.where(rng.random(n) < 0.5, -1, 1)
    rows = []
    for label in y:
        own = rng.random(doc_length) < topic_rate
        base = 0 if label < 0 else topic_words
        terms = np.where(
            own,
            base + rng.integers(0, topic_words, doc_length),
            rng.choice(shared, size=doc_length, p=zipf),
        )
        counts = np.bincount(terms, minlength=dim).astype(np.float64)
        rows.append(counts / np.linalg.norm(counts))
    X = sp.csr_matrix(np.vstack(rows))
    meta = {"generator": "topics", "n": n, "dim": dim, "seed": seed, "rng": RNG_NAME}
    return LabeledDataset(X, y, meta)


# --- files ----------------------------------------------------------------


def _label(tok: str):
    v = float(tok.replace("−", "-"))
    return int(v) if v.is_integer() else v


def _fmt_label(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def read_sparse(path, dim: int | None = None) -> LabeledDataset:
    """Read ``<label> <idx>:<val> ...`` lines (1-based ascending indices).

    ``#`` starts a comment.  A comment line of the exact form ``# dim=<d>``
    declares the feature dimension; otherwise it is the largest index seen
    (or ``dim`` if that is larger).
    """
    labels, indptr, indices, values = [], [0], [], []
    declared = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key == "dim" and val.strip().isdigit():
                    declared = int(val)
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            try:
                labels.append(_label(toks[0]))
            except ValueError:
                raise SparseFormatError(lineno, f"bad label {toks[0]!r}") from None
            prev = 0
            for tok in toks[1:]:
                idx, sep, val = tok.partition(":")
                try:
                    i, v = int(idx), float(val)
                except ValueError:
                    raise SparseFormatError(lineno, f"bad feature {tok!r}") from None
                if not sep:
                    raise SparseFormatError(lineno, f"bad feature {tok!r}")
                if i <= prev:
                    raise SparseFormatError(lineno, f"indices must be 1-based and ascending at {tok!r}")
                if not math.isfinite(v):
                    raise SparseFormatError(lineno, f"non-finite value in {tok!r}")
                prev = i
                if v != 0.0:
                    indices.append(i - 1)
                    values.append(v)
            indptr.append(len(indices))
    if not labels:
        raise SparseFormatError(0, "no samples")
    width = max((max(indices) + 1) if indices else 1, dim or 0)
    if declared is not None:
        if declared < width and (dim is None or dim <= declared):
            raise SparseFormatError(0, f"index {width} exceeds declared dim {declared}")
        width = max(declared, dim or 0)
    X = sp.csr_matrix((values, indices, indptr), shape=(len(labels), width))
    meta = {"path": str(path), "declared_dim": declared}
    return LabeledDataset(X, np.array(labels), meta)


def write_sparse(path, data: LabeledDataset, comment: str | None = None, declare_dim: bool = True) -> None:
    """Write the sparse text format; zero entries are omitted.

    With ``declare_dim`` a ``# dim=<d>`` line records the nominal dimension.
    """
    X = sp.csr_matrix(data.X)
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        if declare_dim:
            fh.write(f"# dim={X.shape[1]}\n")
        for r in range(X.shape[0]):
            lo, hi = X.indptr[r], X.indptr[r + 1]
            order = np.argsort(X.indices[lo:hi], kind="stable")
            feats = " ".join(
                f"{i + 1}:{float(v)!r}"
                for i, v in zip(X.indices[lo:hi][order], X.data[lo:hi][order])
                if v != 0.0
            )
            fh.write(f"{_fmt_label(data.y[r])} {feats}".rstrip() + "\n")


def read_csv(path) -> LabeledDataset:
    """Dense ``label,v1,...,vd`` rows; ``#`` lines are skipped."""
    rows, labels = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                labels.append(_label(parts[0]))
                rows.append([float(p) for p in parts[1:]])
            except ValueError:
                raise SparseFormatError(lineno, "non-numeric CSV field") from None
            if len(rows[-1]) != len(rows[0]):
                raise SparseFormatError(lineno, "inconsistent column count")
    if not rows or not rows[0]:
        raise SparseFormatError(0, "no samples")
    X = np.asarray(rows)
    if not np.all(np.isfinite(X)):
        raise SparseFormatError(0, "non-finite value")
    return LabeledDataset(X, np.array(labels), {"path": str(path)})


def write_csv(path, data: LabeledDataset, comment: str | None = None) -> None:
    X = data.X.toarray() if sp.issparse(data.X) else np.asarray(data.X)
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for lab, row in zip(data.y, X):
            fh.write(",".join([_fmt_label(lab)] + [repr(float(v)) for v in row]) + "\n")


def read_dataset(path, dim: int | None = None) -> LabeledDataset:
    """Dispatch on extension: ``.csv`` is dense CSV, anything else sparse."""
    if Path(path).suffix.lower() == ".csv":
        return read_csv(path)
    return read_sparse(path, dim)


# --- splitting ------------------------------------------------------------


def split_counts(data: LabeledDataset, n_train: int, seed: int = 0):
    """Shuffled partition with exactly ``n_train`` training samples."""
    n = len(data)
    if not 0 < n_train < n:
        raise ValueError(f"split would leave an empty side ({n_train} of {n})")
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(np.sort(perm[:n_train])), data.subset(np.sort(perm[n_train:]))


def split(data: LabeledDataset, fraction: float, seed: int = 0):
    """Shuffled train/test partition with ``round(fraction * n)`` training samples."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("train fraction must lie in (0, 1)")
    return split_counts(data, int(round(fraction * len(data))), seed)
