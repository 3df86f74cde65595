"""Line-oriented text files for trained models.

Binary classifier::

    SVMODEL 1 svc
    kernel gauss:c=200.0
    bias -0.25
    nsv 2
    dim 21
    -0.5 1:0.3 7:1.0
    0.5 2:1.0

Regression models use header ``SVMODEL 1 svr`` and add ``epsilon <real>``
after the bias.  One-against-one models start with ``SVMODEL 1 ovo`` and a
``classes ...`` line, followed by one ``pair <i> <j>`` line (0-based class
positions) and an embedded ``svc`` block per class pair.

Floats are written with ``repr`` so a round trip is exact.  Lines starting
with ``#`` carry training metadata (``# C=... tol=... n=...``).
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .classify import SvcModel
from .kernels import KernelSpec
from .multiclass import MulticlassModel
from .regress import SvrModel

__all__ = ["ModelFormatError", "save_model", "load_model", "dumps", "loads"]

DENSE_LOAD_LIMIT = 10_000_000  # nsv * dim above this loads as CSR


class ModelFormatError(ValueError):
    pass


def _fmt(v) -> str:
    return repr(float(v))


def _label_str(c) -> str:
    if isinstance(c, str):
        if not c or any(ch.isspace() for ch in c):
            raise ValueError(f"class label {c!r} cannot be written")
        return c
    f = float(c)
    return str(int(f)) if f.is_integer() else repr(f)


def _sv_lines(model):
    S = model.support_vectors
    S = sp.csr_matrix(S) if not sp.issparse(S) else S.tocsr()
    S.sort_indices()
    for r in range(S.shape[0]):
        lo, hi = S.indptr[r], S.indptr[r + 1]
        feats = " ".join(
            f"{i + 1}:{_fmt(v)}" for i, v in zip(S.indices[lo:hi], S.data[lo:hi]) if v != 0.0
        )
        yield f"{_fmt(model.coef[r])} {feats}".rstrip()


def _block(model, kind: str) -> list:
    lines = [f"SVMODEL 1 {kind}"]
    meta = f"# C={_fmt(model.C)} tol={_fmt(model.tol)} n={model.n_samples}"
    if model.seed is not None:
        meta += f" seed={model.seed}"
    lines.append(meta)
    lines.append(f"kernel {model.kernel}")
    lines.append(f"bias {_fmt(model.b)}")
    if kind == "svr":
        lines.append(f"epsilon {_fmt(model.epsilon)}")
    lines.append(f"nsv {model.n_sv}")
    lines.append(f"dim {model.dim}")
    lines.extend(_sv_lines(model))
    return lines


def dumps(model) -> str:
    if isinstance(model, SvrModel):
        lines = _block(model, "svr")
    elif isinstance(model, SvcModel):
        lines = _block(model, "svc")
    elif isinstance(model, MulticlassModel):
        lines = ["SVMODEL 1 ovo", "classes " + " ".join(_label_str(c) for c in model.classes)]
        for (i, j), m in sorted(model.models.items()):
            lines.append(f"pair {i} {j}")
            lines.extend(_block(m, "svc"))
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return "\n".join(lines) + "\n"


def save_model(path, model) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(model))


class _Lines:
    def __init__(self, text: str):
        self.items = [
            (no, ln.strip()) for no, ln in enumerate(text.splitlines(), 1) if ln.strip()
        ]
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        if self.pos >= len(self.items):
            raise ModelFormatError("unexpected end of model file")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def keyed(self, key: str) -> str:
        no, line = self.next()
        k, _, rest = line.partition(" ")
        if k != key:
            raise ModelFormatError(f"line {no}: expected {key!r}, got {line!r}")
        return rest.strip()


def _meta(lines: _Lines) -> dict:
    out = {}
    while True:
        no, line = lines.peek()
        if line is None or not line.startswith("#"):
            return out
        lines.next()
        for tok in line[1:].split():
            k, _, v = tok.partition("=")
            out[k] = v


def _read_block(lines: _Lines, kind: str):
    no, header = lines.next()
    if header.split() != ["SVMODEL", "1", kind]:
        raise ModelFormatError(f"line {no}: expected 'SVMODEL 1 {kind}', got {header!r}")
    meta = _meta(lines)
    try:
        kernel = KernelSpec.parse(lines.keyed("kernel"))
        b = float(lines.keyed("bias"))
        eps = float(lines.keyed("epsilon")) if kind == "svr" else None
        nsv = int(lines.keyed("nsv"))
        dim = int(lines.keyed("dim"))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None
    coef = np.empty(nsv)
    indptr, indices, values = [0], [], []
    for r in range(nsv):
        no, line = lines.next()
        toks = line.split()
        try:
            coef[r] = float(toks[0])
            prev = 0
            for tok in toks[1:]:
                i, v = tok.split(":")
                i = int(i)
                if i <= prev or i > dim:
                    raise ValueError(f"bad index {i}")
                prev = i
                indices.append(i - 1)
                values.append(float(v))
        except ValueError as exc:
            raise ModelFormatError(f"line {no}: {exc}") from None
        indptr.append(len(indices))
    S = sp.csr_matrix((values, indices, indptr), shape=(nsv, dim))
    if nsv * dim <= DENSE_LOAD_LIMIT:
        S = S.toarray()
    common = dict(
        kernel=kernel,
        support_vectors=S,
        coef=coef,
        b=b,
        dim=dim,
        C=float(meta.get("C", "nan")),
        tol=float(meta.get("tol", "nan")),
        n_samples=int(meta.get("n", 0)),
        seed=int(meta["seed"]) if "seed" in meta else None,
    )
    if kind == "svr":
        return SvrModel(epsilon=eps, **common)
    return SvcModel(**common)


def _parse_class(tok: str):
    try:
        v = float(tok)
    except ValueError:
        return tok
    return int(v) if v.is_integer() else v


def loads(text: str):
    lines = _Lines(text)
    no, header = lines.peek()
    if header is None:
        raise ModelFormatError("empty model file")
    parts = header.split()
    if len(parts) != 3 or parts[:2] != ["SVMODEL", "1"]:
        raise ModelFormatError(f"line {no}: not an SVMODEL file")
    kind = parts[2]
    if kind in ("svc", "svr"):
        model = _read_block(lines, kind)
    elif kind == "ovo":
        lines.next()
        classes = [_parse_class(t) for t in lines.keyed("classes").split()]
        models = {}
        while lines.peek()[1] is not None:
            no = lines.peek()[0]
            pair = lines.keyed("pair").split()
            try:
                key = (int(pair[0]), int(pair[1]))
            except (ValueError, IndexError):
                raise ModelFormatError(f"line {no}: bad pair line") from None
            if key in models:
                raise ModelFormatError(f"line {no}: duplicate pair {key}")
            models[key] = _read_block(lines, "svc")
        if not models:
            raise ModelFormatError("ovo model without pairwise machines")
        m0 = next(iter(models.values()))
        try:
            model = MulticlassModel(classes, models, m0.kernel, m0.C)
        except ValueError as exc:
            raise ModelFormatError(str(exc)) from None
    else:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    if lines.peek()[1] is not None:
        raise ModelFormatError(f"line {lines.peek()[0]}: trailing content")
    return model


def load_model(path):
    with open(path) as fh:
        return loads(fh.read())
