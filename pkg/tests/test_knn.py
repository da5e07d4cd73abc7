import pytest

from trustrec.dataset import FriendEdge
from trustrec.knn import FRIENDS, NeighborhoodSpec, UserKNN, u2u_predict


def _ratings():
    return {
        ("u", "a"): 5, ("u", "b"): 1, ("u", "c"): 4,
        ("v", "a"): 5, ("v", "b"): 1, ("v", "c"): 5, ("v", "t"): 5,
        ("w", "a"): 1, ("w", "b"): 5, ("w", "t"): 1,
        ("x", "t"): 2,
    }


def test_similarity_sign_and_overlap():
    knn = UserKNN(_ratings())
    assert knn.similarity("u", "v") > 0.9
    assert knn.similarity("u", "w") < 0
    assert knn.similarity("u", "x") == 0.0
    assert knn.similarity("u", "v") == knn.similarity("v", "u")


def test_prediction_uses_positive_neighbours_only():
    r = _ratings()
    knn = UserKNN(r)
    assert [v for v, _ in knn.neighbors("u", "t")] == ["v"]
    mean_u = 10 / 3
    mean_v = 4.0
    assert knn.predict("u", "t") == pytest.approx(min(5.0, mean_u + (5 - mean_v)))
    assert knn("u", "t") == knn.predict("u", "t")


def test_fallbacks():
    knn = UserKNN(_ratings())
    assert knn.predict("x", "a") == 2.0
    assert knn.predict("stranger", "zzz") == pytest.approx(sum(_ratings().values()) / 11)


def test_friends_source():
    r = _ratings()
    spec = NeighborhoodSpec(source=FRIENDS)
    knn = UserKNN(r, spec, [FriendEdge("u", "w")])
    assert knn.similarity("u", "w") == 1.0 and knn.similarity("u", "v") == 0.0
    # w rated t below their own mean, pulling u down
    mean_w = 7 / 3
    assert knn.predict("u", "t") == pytest.approx(10 / 3 + (1 - mean_w))
    assert u2u_predict(r, "u", "t", spec, [FriendEdge("u", "w")]) == knn.predict("u", "t")


def test_top_k_truncation_and_ties():
    r = {(f"n{j}", i): v for j in range(4) for i, v in (("a", 5), ("b", 1), ("c", 3))}
    r.update({(f"n{j}", "t"): 1 + j for j in range(4)})
    r.update({("u", "a"): 5, ("u", "b"): 1, ("u", "c"): 3})
    knn = UserKNN(r, NeighborhoodSpec(k_neighbors=2))
    assert [v for v, _ in knn.neighbors("u", "t")] == ["n0", "n1"]


def test_spec_validation():
    with pytest.raises(ValueError):
        NeighborhoodSpec(k_neighbors=0)
    with pytest.raises(ValueError):
        NeighborhoodSpec(source="oracle")
