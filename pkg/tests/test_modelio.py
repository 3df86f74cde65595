import numpy as np
import pytest

from ksvm.classify import decision_values, train_svc
from ksvm.data import BlobSpec, gen_blobs, gen_topics
from ksvm.kernels import KernelSpec
from ksvm.modelio import ModelFormatError, dumps, load_model, loads, save_model
from ksvm.multiclass import predict_votes, train_ovo, vote_tally
from ksvm.regress import train_svr


def blobs(seed=0):
    return gen_blobs(BlobSpec(((0.0, 0.0), (2.5, 1.0)), 40, seed=seed))


@pytest.mark.parametrize("kernel", [KernelSpec.linear(), KernelSpec.polynomial(1.0, 3), KernelSpec.gaussian(0.7)])
def test_svc_round_trip(tmp_path, rng, kernel):
    d = blobs()
    m = train_svc(d.X, d.y, kernel, C=2.0, seed=5)
    p = tmp_path / "m.txt"
    save_model(p, m)
    back = load_model(p)
    P = rng.uniform(-3, 5, size=(200, 2))
    np.testing.assert_allclose(decision_values(back, P), decision_values(m, P), rtol=0, atol=1e-12)
    assert back.kernel == kernel and back.C == 2.0 and back.seed == 5 and back.n_samples == 80
    assert dumps(back) == dumps(m)


def test_svc_text_layout():
    m = train_svc([[-1.0], [1.0]], [-1, 1], C=10.0)
    lines = dumps(m).splitlines()
    assert lines[0] == "SVMODEL 1 svc"
    assert lines[1].startswith("# C=10.0")
    assert lines[2:6] == ["kernel linear", f"bias {float(m.b)!r}", "nsv 2", "dim 1"]
    assert lines[6] == f"{float(m.coef[0])!r} 1:-1.0"


def test_svr_round_trip(tmp_path, rng):
    X = rng.uniform(0, 6, size=(30, 1))
    m = train_svr(X, np.sin(X[:, 0]), KernelSpec.gaussian(1.0), C=10.0, epsilon=0.05)
    p = tmp_path / "r.txt"
    save_model(p, m)
    back = load_model(p)
    assert back.epsilon == 0.05
    P = rng.uniform(0, 6, size=(100, 1))
    np.testing.assert_allclose(back.predict(P), m.predict(P), rtol=0, atol=1e-12)
    assert "epsilon 0.05" in dumps(m).splitlines()


@pytest.mark.parametrize("names", [None, ["x", "y", "z"]])
def test_ovo_round_trip(tmp_path, rng, names):
    d = gen_blobs(BlobSpec(((0.0, 0.0), (4.0, 0.0), (2.0, 3.0)), 30, seed=1))
    y = d.y if names is None else np.array([names[v - 1] for v in d.y])
    m = train_ovo(d.X, y, KernelSpec.gaussian(3.0))
    p = tmp_path / "o.txt"
    save_model(p, m)
    back = load_model(p)
    assert back.classes == m.classes
    P = rng.uniform(-2, 6, size=(300, 2))
    np.testing.assert_array_equal(predict_votes(back, P), predict_votes(m, P))
    np.testing.assert_allclose(vote_tally(back, P)[1], vote_tally(m, P)[1], rtol=0, atol=1e-12)


def test_sparse_support_vectors_round_trip(tmp_path):
    d = gen_topics(120, 300, seed=2)
    m = train_svc(d.X, d.y, C=10.0)
    p = tmp_path / "t.txt"
    save_model(p, m)
    back = load_model(p)
    np.testing.assert_allclose(decision_values(back, d.X), decision_values(m, d.X), rtol=0, atol=1e-12)


GOOD = "SVMODEL 1 svc\nkernel linear\nbias 0.0\nnsv 1\ndim 2\n1.0 1:1.0\n"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "hello\n",
        "SVMODEL 2 svc\n",
        "SVMODEL 1 xyz\n",
        GOOD.replace("kernel linear", "kernel rbf"),
        GOOD.replace("bias 0.0", "bias zero"),
        GOOD.replace("nsv 1", "nsv 2"),
        GOOD.replace("1:1.0", "3:1.0"),
        GOOD.replace("1:1.0", "2:1.0 1:1.0"),
        GOOD.replace("bias 0.0\n", ""),
        GOOD + "extra\n",
        "SVMODEL 1 ovo\nclasses 1 2\n",
        "SVMODEL 1 ovo\nclasses 1 2\npair 0 x\n" + GOOD,
        "SVMODEL 1 ovo\nclasses 1 2 3\npair 0 1\n" + GOOD,
    ],
)
def test_malformed(text):
    with pytest.raises(ModelFormatError):
        loads(text)


def test_good_minimal():
    m = loads(GOOD)
    assert m.n_sv == 1 and decision_values(m, [[2.0, 5.0]])[0] == 2.0
