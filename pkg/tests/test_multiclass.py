import numpy as np
import pytest

from ksvm.classify import SvcModel, predict_labels, train_svc
from ksvm.data import BlobSpec, gen_blobs
from ksvm.kernels import KernelSpec
from ksvm.multiclass import MulticlassModel, predict_vote, predict_votes, train_ovo, vote_tally


def three_blobs(seed=3, n=100, spread=(6.0, 5.0)):
    a, h = spread
    return gen_blobs(BlobSpec(((0.0, 0.0), (a, 0.0), (a / 2, h)), n, seed=seed))


def constant_machine(b):
    return SvcModel(KernelSpec.linear(), np.zeros((0, 2)), np.zeros(0), b, dim=2)


def voting_model(b01, b02, b12, classes=(1, 2, 3)):
    models = {(0, 1): constant_machine(b01), (0, 2): constant_machine(b02), (1, 2): constant_machine(b12)}
    return MulticlassModel(list(classes), models, KernelSpec.linear(), 1.0)


def test_two_classes_reduce_to_binary(rng):
    d = gen_blobs(BlobSpec(((0.0, 0.0), (2.0, 1.0)), 60, seed=1))
    ovo = train_ovo(d.X, d.y, C=1.0)
    assert list(ovo.models) == [(0, 1)]
    # classes sorted as [-1, +1]; +1 of the pair machine stands for -1
    binary = train_svc(d.X, -d.y, C=1.0)
    P = rng.uniform(-4, 6, size=(1000, 2))
    np.testing.assert_array_equal(predict_votes(ovo, P), -predict_labels(binary, P))
    assert predict_vote(ovo, P[0]) == -predict_labels(binary, P[:1])[0]


def test_three_classes_three_models():
    d = three_blobs()
    m = train_ovo(d.X, d.y, C=1.0)
    assert sorted(m.models) == [(0, 1), (0, 2), (1, 2)]
    assert m.classes == [1, 2, 3]
    # each machine saw only its own two classes
    for (i, j), sub in m.models.items():
        assert sub.n_samples == 200


def test_separated_blobs_train_perfectly():
    d = three_blobs(spread=(20.0, 20.0))
    m = train_ovo(d.X, d.y, C=1.0)
    assert np.all(m.predict(d.X) == d.y)


def test_strict_majority():
    # 1v2 -> 1, 1v3 -> 1, 2v3 -> 2
    assert predict_vote(voting_model(1.0, 1.0, 1.0), [0.0, 0.0]) == 1
    votes, _ = vote_tally(voting_model(1.0, 1.0, 1.0), [[0.0, 0.0]])
    assert votes.tolist() == [[2, 1, 0]]


def test_three_cycle_resolved_by_strength():
    # 1v2 -> 1 (0.5), 2v3 -> 2 (0.7), 1v3 -> 3 (0.9)
    m = voting_model(0.5, -0.9, 0.7)
    votes, strength = vote_tally(m, [[0.0, 0.0]])
    assert votes.tolist() == [[1, 1, 1]]
    np.testing.assert_allclose(strength, [[0.5, 0.7, 0.9]])
    assert predict_vote(m, [0.0, 0.0]) == 3


def test_exact_tie_goes_to_first_class():
    assert predict_vote(voting_model(0.5, -0.5, 0.5), [0.0, 0.0]) == 1
    assert predict_vote(voting_model(0.5, -0.5, 0.5, classes=("c", "a", "b")), [0.0, 0.0]) == "c"


def test_zero_decision_votes_for_first_of_pair():
    votes, _ = vote_tally(voting_model(0.0, 0.0, 0.0), [[0.0, 0.0]])
    assert votes.tolist() == [[2, 1, 0]]


def test_vote_conservation(rng):
    for k in (2, 3, 4):
        means = [(4.0 * np.cos(t), 4.0 * np.sin(t)) for t in np.linspace(0, 2 * np.pi, k, endpoint=False)]
        d = gen_blobs(BlobSpec(tuple(means), 30, seed=k))
        m = train_ovo(d.X, d.y, KernelSpec.gaussian(4.0), C=1.0)
        votes, _ = vote_tally(m, rng.uniform(-6, 6, size=(200, 2)))
        assert np.all(votes.sum(axis=1) == k * (k - 1) // 2)


def test_relabeling_equivariance(rng):
    d = three_blobs(n=50)
    names = {1: "b", 2: "c", 3: "a"}
    renamed = np.array([names[v] for v in d.y])
    base = train_ovo(d.X, d.y, C=1.0)
    # keep the class order aligned so each machine sees the same problem
    other = train_ovo(d.X, renamed, C=1.0, classes=["b", "c", "a"])
    P = rng.uniform(-3, 9, size=(500, 2))
    votes, _ = vote_tally(base, P)
    clear = votes.max(axis=1) == 2
    got = predict_votes(other, P[clear])
    want = np.array([names[v] for v in predict_votes(base, P[clear])])
    np.testing.assert_array_equal(got, want)
    # sorted class order gives a different pairing but the same non-tie answers
    sorted_model = train_ovo(d.X, renamed, C=1.0)
    assert sorted_model.classes == ["a", "b", "c"]
    np.testing.assert_array_equal(predict_votes(sorted_model, P[clear]), want)


@pytest.mark.parametrize("point,label", [((3.1, 1.6), 2), ((3.0, 1.5), 1), ((3.2, 1.2), 2)])
def test_blob_tie_point_fixture(point, label):
    # recorded once from the seed-3 blob model; each point is a 1-1-1 vote cycle
    d = three_blobs()
    m = train_ovo(d.X, d.y, C=1.0)
    votes, _ = vote_tally(m, [point])
    assert votes.tolist() == [[1, 1, 1]]
    assert predict_vote(m, point) == label
    assert predict_vote(train_ovo(d.X, d.y, C=1.0), point) == label


def test_errors():
    d = three_blobs(n=10)
    with pytest.raises(ValueError, match="no samples"):
        train_ovo(d.X, d.y, classes=[1, 2, 3, 4])
    with pytest.raises(ValueError):
        train_ovo(d.X, d.y, classes=[1, 2])
    with pytest.raises(ValueError):
        train_ovo(d.X, d.y[:-1])
    with pytest.raises(ValueError):
        MulticlassModel([1, 1], {(0, 1): constant_machine(0.0)}, KernelSpec.linear(), 1.0)
    with pytest.raises(ValueError):
        MulticlassModel([1, 2, 3], {(0, 1): constant_machine(0.0)}, KernelSpec.linear(), 1.0)
    m = train_ovo(d.X, d.y)
    with pytest.raises(ValueError, match="dimension"):
        predict_vote(m, [1.0, 2.0, 3.0])
