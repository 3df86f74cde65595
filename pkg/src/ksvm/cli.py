"""``ksvm`` command line: gen, train, predict, eval, experiment.

Exit status: 0 success, 1 an experiment missed an acceptance band, 2 usage
or input error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import data as D
from .classify import SvcModel, empirical_risks, linear_hyperplane, predict_labels, train_svc
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .kernels import KernelSpec
from .modelio import ModelFormatError, load_model, save_model
from .multiclass import MulticlassModel, predict_votes, train_ovo
from .qp import SolverConfig, SolverError
from .regress import SvrModel, epsilon_loss, train_svr

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3

log = logging.getLogger("ksvm")


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _kernel(text: str) -> KernelSpec:
    try:
        return KernelSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # parsed both before and after the subcommand; SUPPRESS keeps the later one
    p = argparse.ArgumentParser(add_help=False)
    dflt = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=dflt(0), help="generator / master seed")
    p.add_argument("--tol", type=float, default=dflt(None), help="KKT tolerance of the dual solver")
    p.add_argument("--verbose", "-v", action="count", default=dflt(0))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksvm", description=__doc__.splitlines()[0],
                                     parents=[_global_flags(True)])
    common = _global_flags(False)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a synthetic dataset")
    g.add_argument("generator", choices=("blobs", "waveform", "topics"))
    g.add_argument("--means", nargs="+", type=_floats, help="blob means, e.g. 0,0 10,10")
    g.add_argument("--n", type=int, required=True, help="samples (per class for blobs)")
    g.add_argument("--dim", type=int, default=700, help="vocabulary size for topics")
    g.add_argument("--out", "-o", required=True)
    g.add_argument("--format", choices=("sparse", "csv"), default="sparse")

    t = sub.add_parser("train", parents=[common], help="train a model")
    t.add_argument("data")
    t.add_argument("model")
    t.add_argument("--task", choices=("svc", "svr", "ovo"), default="svc")
    t.add_argument("--kernel", type=_kernel, default=KernelSpec.linear())
    t.add_argument("--C", "--c", dest="C", type=float, default=1.0)
    t.add_argument("--epsilon", type=float, default=0.1)

    p = sub.add_parser("predict", parents=[common], help="predict with a saved model")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", "-o")

    e = sub.add_parser("eval", parents=[common], help="evaluate a saved model on labelled data")
    e.add_argument("model")
    e.add_argument("data")

    x = sub.add_parser("experiment", parents=[common], help="run a reference experiment with acceptance checks")
    x.add_argument("experiment", choices=EXPERIMENTS)
    x.add_argument("--reps", type=int)
    x.add_argument("--full", action="store_true", help="1000 replications (waveform)")
    x.add_argument("--C", "--c", dest="C", type=float)
    x.add_argument("--cs", type=_floats)
    x.add_argument("--kernel")
    x.add_argument("--table", help="also write the tab-separated table here")
    return parser


def _solver(args) -> SolverConfig:
    return SolverConfig(tol=args.tol) if args.tol is not None else SolverConfig()


def _read_meta(path) -> dict:
    meta = Path(str(path) + ".meta")
    if not meta.exists():
        return {}
    out = {}
    for tok in meta.read_text().split():
        k, _, v = tok.partition("=")
        out[k] = v
    return out


def load_data(path) -> D.LabeledDataset:
    """Read a dataset, taking the dimension from a ``.meta`` sidecar if present."""
    meta = _read_meta(path)
    dim = int(meta["dim"]) if "dim" in meta else None
    data = D.read_dataset(path, dim)
    if dim is not None:
        data.meta["declared_dim"] = dim
    return data


def cmd_gen(args) -> int:
    if args.generator == "blobs":
        if not args.means:
            raise UsageError("gen blobs needs --means")
        spec = D.BlobSpec(tuple(args.means), args.n, args.seed)
        data = D.gen_blobs(spec)
        desc = "means=" + ";".join(",".join(f"{v:g}" for v in m) for m in spec.means) + f" n={args.n}"
    elif args.generator == "waveform":
        data = D.gen_waveform(D.WaveformSpec(args.n, args.seed))
        desc = f"n={args.n}"
    else:
        data = D.gen_topics(args.n, args.dim, args.seed)
        desc = f"n={args.n} dim={args.dim}"
    if args.format == "csv":
        D.write_csv(args.out, data)
    else:
        D.write_sparse(args.out, data, declare_dim=False)
    Path(args.out + ".meta").write_text(
        f"generator={args.generator} {desc} seed={args.seed} dim={data.dim} rng={D.RNG_NAME}\n"
    )
    log.info("wrote %d samples to %s", len(data), args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    data = load_data(args.data)
    cfg = _solver(args)
    if args.task == "svc":
        y = np.asarray(data.y, dtype=float)
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise UsageError("svc needs labels -1/+1; use --task ovo for other labels")
        model = train_svc(data.X, y, args.kernel, args.C, cfg, seed=args.seed)
        summary = model.solution.summary()
    elif args.task == "svr":
        model = train_svr(data.X, np.asarray(data.y, dtype=float), args.kernel, args.C, args.epsilon, cfg,
                          seed=args.seed)
        summary = model.solution.summary()
    else:
        model = train_ovo(data.X, data.y, args.kernel, args.C, cfg)
        summary = "; ".join(f"{i}v{j}: {m.solution.summary()}" for (i, j), m in sorted(model.models.items()))
    if args.verbose:
        print(summary, file=sys.stderr)
    save_model(args.model, model)
    return EXIT_OK


def _load_pair(args):
    model = load_model(args.model)
    data = load_data(args.data)
    declared = data.meta.get("declared_dim")
    if declared is not None and declared != model.dim:
        raise UsageError(f"dimension mismatch: model has {model.dim} features, data {declared}")
    return model, data


def _predict(model, X):
    if isinstance(model, MulticlassModel):
        return predict_votes(model, X)
    if isinstance(model, SvrModel):
        return model.predict(X)
    return predict_labels(model, X)


def cmd_predict(args) -> int:
    model, data = _load_pair(args)
    pred = _predict(model, data.X)
    fmt = (lambda v: repr(float(v))) if isinstance(model, SvrModel) else (lambda v: str(v))
    text = "\n".join(fmt(v) for v in pred) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_eval(args) -> int:
    model, data = _load_pair(args)
    out = []
    if isinstance(model, SvrModel):
        f = model.predict(data.X)
        y = np.asarray(data.y, dtype=float)
        out.append(f"epsilon_risk\t{float(epsilon_loss(y, f, model.epsilon).mean()):.6g}")
        out.append(f"mean_abs_error\t{float(np.abs(f - y).mean()):.6g}")
        out.append(f"n_sv\t{model.n_sv}")
        if model.n_samples:
            out.append(f"sv_fraction\t{model.n_sv / model.n_samples:.6g}")
    elif isinstance(model, MulticlassModel):
        err = float(np.mean(predict_votes(model, data.X) != data.y))
        out.append(f"error_pct\t{100 * err:.4g}")
        for (i, j), m in sorted(model.models.items()):
            out.append(f"n_sv_{model.classes[i]}v{model.classes[j]}\t{m.n_sv}")
    else:
        y = np.asarray(data.y, dtype=float)
        risks = empirical_risks(model, data.X, y)
        out.append(f"error_pct\t{100 * risks.error_rate:.4g}")
        out.append(f"n_sv\t{model.n_sv}")
        if model.n_samples:
            out.append(f"sv_fraction\t{model.n_sv / model.n_samples:.6g}")
        out.append(f"hinge_risk\t{risks.hinge:.6g}")
        if isinstance(model, SvcModel) and model.kernel.kind == "linear" and model.dim == 2:
            w, b, norm = linear_hyperplane(model)
            out.append(f"hyperplane\t{w[0]:.6g}x {w[1]:+.6g}y {b:+.6g} = 0")
            out.append(f"hyperplane_normalized\t{norm[0]:.3f}x {norm[1]:+.3f}y {norm[2]:+.3f} = 0")
    print("\n".join(out))
    return EXIT_OK


def cmd_experiment(args) -> int:
    reps = 1000 if args.full and args.reps is None else args.reps
    cfg = ExperimentConfig(args.experiment, reps=reps, seed=args.seed, tol=args.tol, C=args.C,
                           cs=args.cs, kernel=args.kernel)
    try:
        report = run_experiment(cfg)
    except SolverError as exc:
        where = f"replication seed {exc.seed}, " if getattr(exc, "seed", None) is not None else ""
        print(f"solver failure in experiment {args.experiment} ({where}master seed {args.seed})", file=sys.stderr)
        raise
    print(report.text())
    if args.table:
        Path(args.table).write_text(report.table() + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "train": cmd_train, "predict": cmd_predict, "eval": cmd_eval,
            "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SolverError as exc:
        print(f"ksvm: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, ModelFormatError, D.SparseFormatError, ValueError, OSError) as exc:
        print(f"ksvm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
