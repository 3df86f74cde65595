import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ksvm.kernels import KernelSpec, SparseVector, as_samples, eval_kernel, gram

LIN = KernelSpec.linear()
POLY = KernelSpec.polynomial(1.0, 2)
GAUSS = KernelSpec.gaussian(1.0)
ALL = [LIN, POLY, KernelSpec.polynomial(0.5, 3), GAUSS, KernelSpec.gaussian(200.0)]


def phi_poly2(x):
    """Explicit feature map of (1 + x.y)^2 in two dimensions."""
    x1, x2 = x
    r2 = np.sqrt(2.0)
    return np.array([1.0, r2 * x1, r2 * x2, x1 * x1, x2 * x2, r2 * x1 * x2])


def test_linear_value():
    assert eval_kernel(LIN, [1, 2], [3, 4]) == 11


@pytest.mark.parametrize("c", [0.1, 1.0, 200.0])
def test_gaussian_self_is_one(c, rng):
    x = rng.normal(size=5)
    assert eval_kernel(KernelSpec.gaussian(c), x, x) == 1.0


def test_poly_matches_explicit_map():
    x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert eval_kernel(POLY, x, y) == 1.0
    assert phi_poly2(x) @ phi_poly2(y) == pytest.approx(1.0, abs=1e-15)


def test_poly_explicit_map_random_pairs(rng):
    X = rng.normal(size=(1000, 2))
    Y = rng.normal(size=(1000, 2))
    for x, y in zip(X, Y):
        assert abs(eval_kernel(POLY, x, y) - phi_poly2(x) @ phi_poly2(y)) <= 1e-10 * max(1, abs(phi_poly2(x) @ phi_poly2(y)))


def test_gram_examples():
    np.testing.assert_array_equal(gram(LIN, [[1, 0], [0, 1]]), np.eye(2))
    x = [0.3, -1.2]
    np.testing.assert_array_equal(gram(GAUSS, [x, x]), np.ones((2, 2)))
    X = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, -2.0]])
    P = np.array([phi_poly2(x) for x in X])
    np.testing.assert_allclose(gram(POLY, X), P @ P.T, atol=1e-12)


@pytest.mark.parametrize("spec", ALL, ids=str)
def test_symmetry_200_pairs(spec, rng):
    for _ in range(200):
        x, y = rng.normal(size=(2, 4))
        assert abs(eval_kernel(spec, x, y) - eval_kernel(spec, y, x)) <= 1e-12


@pytest.mark.parametrize("spec", ALL, ids=str)
def test_gram_invariants(spec, rng):
    for n in (1, 5, 30):
        X = rng.normal(size=(n, 3))
        K = gram(spec, X)
        assert np.array_equal(K, K.T)
        assert np.linalg.eigvalsh(K).min() >= -1e-8 * max(1.0, np.abs(K).max())
        if spec.kind == "gaussian":
            assert np.all(np.diag(K) == 1.0)
        for i in range(n):
            for j in range(n):
                assert K[i, j] ** 2 <= K[i, i] * K[j, j] * (1 + 1e-12) + 1e-12


def test_gram_entries_match_eval(rng):
    X = rng.normal(size=(6, 3))
    for spec in ALL:
        K = gram(spec, X)
        for i in range(6):
            for j in range(6):
                assert K[i, j] == pytest.approx(eval_kernel(spec, X[i], X[j]), rel=1e-12, abs=1e-14)


def test_dense_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        eval_kernel(LIN, [1, 2], [1, 2, 3])
    with pytest.raises(ValueError, match="dimension"):
        gram(LIN, [[1, 2]], [[1, 2, 3]])


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        eval_kernel(LIN, [1, np.nan], [1, 2])
    with pytest.raises(ValueError, match="non-finite"):
        gram(GAUSS, [[1, np.inf]])


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec.gaussian(0.0)
    with pytest.raises(ValueError):
        KernelSpec.polynomial(1.0, 0)
    with pytest.raises(ValueError):
        KernelSpec("sigmoid")


@pytest.mark.parametrize("text", ["linear", "poly:c=1.0,d=2", "poly:c=0.5,d=3", "gauss:c=200.0", "gauss:c=0.1"])
def test_spec_text_round_trip(text):
    spec = KernelSpec.parse(text)
    assert KernelSpec.parse(str(spec)) == spec


def test_spec_parse_forms():
    assert KernelSpec.parse("gauss:c=200") == KernelSpec.gaussian(200.0)
    assert KernelSpec.parse("poly:d=3,c=2") == KernelSpec.polynomial(2.0, 3)
    assert KernelSpec.gaussian(200.0).gamma == pytest.approx(0.005)
    for bad in ["rbf", "gauss:", "gauss:c=", "poly:c=1", "gauss:c=1,d=2", "poly:c=1,d=2.5"]:
        with pytest.raises(ValueError):
            KernelSpec.parse(bad)


def test_sparse_vector_invariants():
    v = SparseVector([3, 7], [0.5, 1.0])
    assert v.dim == 7
    assert SparseVector([2, 5], [0.0, 1.0]).indices.tolist() == [5]
    with pytest.raises(ValueError):
        SparseVector([3, 3], [1.0, 2.0])
    with pytest.raises(ValueError):
        SparseVector([0], [1.0])
    with pytest.raises(ValueError):
        SparseVector([1], [np.nan])


def test_sparse_dot_paths():
    a = SparseVector.from_dict({1: 2.0, 4: -1.0, 9: 3.0})
    b = SparseVector.from_dict({4: 5.0, 9: 1.0, 10: 7.0})
    assert a.dot(b) == -5.0 + 3.0
    dense = np.arange(1.0, 11.0)
    assert a.dot(dense) == 2.0 * 1 - 1.0 * 4 + 3.0 * 9
    # a shorter dense vector is zero padded on the sparse side
    assert a.dot(np.ones(4)) == 1.0


sparse_pairs = st.integers(1, 12).flatmap(
    lambda d: st.tuples(
        arrays(np.float64, d, elements=st.sampled_from([0.0, 0.0, 1.0, -2.5, 0.125, 3.0])),
        arrays(np.float64, d, elements=st.sampled_from([0.0, 0.0, -1.0, 2.0, 0.75])),
    )
)


@settings(max_examples=150, deadline=None)
@given(sparse_pairs, st.sampled_from(ALL))
def test_sparse_matches_dense(pair, spec):
    x, y = pair
    dense = eval_kernel(spec, x, y)
    sx, sy = SparseVector.from_dense(x), SparseVector.from_dense(y)
    assert eval_kernel(spec, sx, sy) == pytest.approx(dense, rel=1e-12, abs=1e-12)
    assert eval_kernel(spec, sx, y) == pytest.approx(dense, rel=1e-12, abs=1e-12)
    K_sparse = gram(spec, [sx, sy])
    K_dense = gram(spec, np.vstack([x, y]))
    np.testing.assert_allclose(K_sparse, K_dense, rtol=1e-12, atol=1e-12)


def test_sparse_collections_pad_to_common_width():
    X = as_samples([SparseVector([1], [1.0]), SparseVector([5], [2.0])])
    assert X.shape == (2, 5)
    K = gram(LIN, X, [SparseVector([2], [1.0])])
    np.testing.assert_array_equal(K, [[0.0], [0.0]])
