import numpy as np
import pytest
from oracles import svr_primal_oracle as primal_oracle

from ksvm.kernels import KernelSpec
from ksvm.qp import SolverConfig
from ksvm.regress import (
    epsilon_loss,
    predict_svr,
    predict_svr_batch,
    svr_primal_objective,
    train_svr,
)

TIGHT = SolverConfig(tol=1e-8)


def sine_instance():
    x = np.linspace(0.0, 2 * np.pi, 30)
    return x[:, None], np.sin(x)


def test_epsilon_loss_examples(rng):
    assert epsilon_loss(1.0, 1.3, 0.5) == 0.0
    assert epsilon_loss(1.0, 2.0, 0.5) == 0.5
    y, f = rng.normal(size=100), rng.normal(size=100)
    np.testing.assert_array_equal(epsilon_loss(y, f, 0.0), np.abs(f - y))
    with pytest.raises(ValueError):
        epsilon_loss(0.0, 0.0, -1.0)


def test_two_point_flattest_line():
    m = train_svr([[0.0], [1.0]], [1.0, 3.0], KernelSpec.linear(), C=100.0, epsilon=0.5, config=TIGHT)
    assert predict_svr(m, [0.0]) == pytest.approx(1.5, abs=1e-4)
    assert predict_svr(m, [1.0]) == pytest.approx(2.5, abs=1e-4)
    w = float(np.asarray(m.support_vectors)[:, 0] @ m.coef)
    assert w == pytest.approx(1.0, abs=1e-4)
    assert m.b == pytest.approx(1.5, abs=1e-4)
    # both points sit on the tube boundary: zero slack
    assert np.all(epsilon_loss([1.0, 3.0], m.predict([[0.0], [1.0]]), 0.5) <= 1e-6)


@pytest.mark.parametrize("kernel", [KernelSpec.linear(), KernelSpec.gaussian(1.0)])
def test_constant_targets(kernel):
    X = np.linspace(-1, 1, 7)[:, None]
    m = train_svr(X, np.full(7, 4.25), kernel, C=10.0, epsilon=0.2)
    assert m.n_sv == 0
    assert m.b == 4.25
    np.testing.assert_array_equal(predict_svr_batch(m, [[-10.0], [0.3], [99.0]]), 4.25)


def test_sine_fits_inside_tube():
    X, y = sine_instance()
    cfg = SolverConfig()
    m = train_svr(X, y, KernelSpec.gaussian(1.0), C=100.0, epsilon=0.05, config=cfg)
    assert np.max(np.abs(m.predict(X) - y)) <= 0.05 + cfg.tol


def test_primal_oracle_linear(rng):
    for _ in range(20):
        n, d = int(rng.integers(2, 7)), int(rng.integers(1, 3))
        X = rng.normal(size=(n, d))
        y = X @ rng.normal(size=d) + 0.5 * rng.normal(size=n)
        C, eps = float(rng.choice([0.1, 1.0, 10.0])), float(rng.choice([0.0, 0.1, 0.5]))
        m = train_svr(X, y, KernelSpec.linear(), C=C, epsilon=eps, config=TIGHT)
        ours = svr_primal_objective(m, X, y)
        ref = primal_oracle(X, y, C, eps)
        assert abs(ours - ref) <= 1e-4 * (1 + abs(ref))


def test_model_invariants(rng):
    cfg = SolverConfig()
    for kernel in (KernelSpec.linear(), KernelSpec.gaussian(1.0), KernelSpec.polynomial(1.0, 3)):
        X = rng.uniform(-2, 2, size=(40, 2))
        y = np.sin(X[:, 0]) * X[:, 1] + 0.1 * rng.normal(size=40)
        C, eps = 5.0, 0.1
        m = train_svr(X, y, kernel, C=C, epsilon=eps, config=cfg)
        beta = m.solution.beta
        assert np.all(np.abs(beta) <= C)
        assert abs(beta.sum()) <= 1e-8 * y.size * C
        # tube complementarity: only boundary/outside points carry weight
        resid = np.abs(m.predict(X) - y)
        assert np.all(resid[m.support] >= eps - 10 * cfg.tol)


def test_target_shift_equivariance():
    X, y = sine_instance()
    P = np.linspace(-1, 7, 50)[:, None]
    base = train_svr(X, y, KernelSpec.gaussian(1.0), C=10.0, epsilon=0.1, config=TIGHT)
    for c in (3.0, -17.5):
        moved = train_svr(X, y + c, KernelSpec.gaussian(1.0), C=10.0, epsilon=0.1, config=TIGHT)
        np.testing.assert_allclose(moved.solution.beta, base.solution.beta, atol=1e-9)
        assert moved.b == pytest.approx(base.b + c, abs=1e-9)
        np.testing.assert_allclose(moved.predict(P) - base.predict(P), c, atol=1e-9)


def test_epsilon_monotone_sv_count():
    X, y = sine_instance()
    counts = [train_svr(X, y, KernelSpec.gaussian(1.0), C=100.0, epsilon=e).n_sv for e in (0.0, 0.1, 0.5, 1.0)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert counts[-1] == 0


def test_errors():
    with pytest.raises(ValueError):
        train_svr([[0.0], [1.0]], [1.0], C=1.0)
    with pytest.raises(ValueError):
        train_svr([[0.0], [1.0]], [1.0, 2.0], C=0.0)
    with pytest.raises(ValueError):
        train_svr([[0.0], [1.0]], [1.0, 2.0], epsilon=-0.5)
    m = train_svr([[0.0], [1.0]], [1.0, 3.0], epsilon=0.1)
    with pytest.raises(ValueError, match="dimension"):
        predict_svr(m, [0.0, 1.0])
