"""Kernel support vector machines built on an SMO dual solver.

Binary soft-margin classification, epsilon-insensitive regression and
one-against-one multiclass voting, plus synthetic data generators and the
experiment harness behind the ``ksvm`` command.
"""
from .classify import (
    SvcModel,
    compute_bias,
    decision_value,
    decision_values,
    empirical_risks,
    hinge_loss,
    linear_hyperplane,
    predict,
    predict_labels,
    train_svc,
)
from .data import (
    BlobSpec,
    LabeledDataset,
    WaveformSpec,
    gen_blobs,
    gen_topics,
    gen_waveform,
    read_dataset,
    read_sparse,
    split,
    split_counts,
    waveform_basis,
    write_sparse,
)
from .kernels import KernelSpec, SparseVector, eval_kernel, gram
from .modelio import load_model, save_model
from .multiclass import MulticlassModel, predict_vote, predict_votes, train_ovo
from .qp import (
    DualSolution,
    SolverConfig,
    SolverError,
    SvcDualProblem,
    brute_force_dual,
    dual_objective,
    kkt_report,
    solve_svc_dual,
    solve_svr_dual,
)
from .regress import SvrModel, epsilon_loss, predict_svr, train_svr

__version__ = "0.1.0"
