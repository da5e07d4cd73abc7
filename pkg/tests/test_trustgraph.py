import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trustrec.dataset import DatasetError, FriendEdge
from trustrec.trustgraph import SocialGraph, build_graph, importance, importance_from_rank, pagerank


def dense_pagerank(nodes, edges, damping=0.85, iters=3000):
    """Reference: explicit Google matrix, iterated to a fixed point."""
    n = len(nodes)
    idx = {v: j for j, v in enumerate(nodes)}
    G = np.zeros((n, n))
    out = {v: [b for a, b in edges if a == v] for v in nodes}
    for v in nodes:
        if out[v]:
            for b in out[v]:
                G[idx[b], idx[v]] += 1.0 / len(out[v])
        else:
            G[:, idx[v]] = 1.0 / n
    G = damping * G + (1 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(iters):
        x = G @ x
    return {v: x[idx[v]] for v in nodes}, G


def test_build_graph_links():
    g = build_graph([FriendEdge("a", "b")], ["a", "b"])
    assert g.edges == {("a", "b"), ("b", "a")}
    g = build_graph([FriendEdge("a", "b"), FriendEdge("b", "c")], "abc")
    assert len(g.edges) == 4
    g = build_graph([], ["x", "y", "z"])
    assert g.nodes == ("x", "y", "z") and not g.edges
    with pytest.raises(DatasetError):
        build_graph([FriendEdge("a", "q")], ["a"])


def test_symmetric_cases():
    pr = pagerank(build_graph([FriendEdge("a", "b")], "ab"))
    assert pr.score == pytest.approx({"a": 0.5, "b": 0.5}, abs=1e-12)
    assert pr.rank == {"a": 1, "b": 2}
    pr = pagerank(build_graph([], "xyz"))
    assert pr.score == pytest.approx({v: 1 / 3 for v in "xyz"}, abs=1e-12)
    assert pr.rank == {"x": 1, "y": 2, "z": 3}


def test_chain_against_power_iteration():
    g = SocialGraph(("a", "b", "c"), frozenset({("a", "b"), ("b", "c")}))
    ref, _ = dense_pagerank(g.nodes, g.edges)
    pr = pagerank(g)
    for v in g.nodes:
        assert abs(pr.score[v] - ref[v]) < 1e-8
    assert pr.rank["c"] == 1


def test_importance_values():
    assert importance_from_rank(1) == 1.0
    assert importance_from_rank(10) == pytest.approx(1 / (1 + math.log(10)), abs=1e-15)
    assert importance_from_rank(10) == pytest.approx(0.302793, abs=1e-6)
    assert importance_from_rank(100) == pytest.approx(0.178407, abs=1e-6)
    ranks = [importance_from_rank(r) for r in range(1, 50)]
    assert all(a > b for a, b in zip(ranks, ranks[1:]))


def test_importance_unknown_user():
    pr = pagerank(build_graph([], "ab"))
    assert importance(pr, "a") == 1.0
    with pytest.raises(KeyError):
        importance(pr, "zz")


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        pagerank(SocialGraph((), frozenset()))


def test_dump(tmp_path):
    pr = pagerank(build_graph([FriendEdge("a", "b"), FriendEdge("b", "c")], "abcd"))
    pr.dump(tmp_path / "pagerank.tsv")
    lines = (tmp_path / "pagerank.tsv").read_text().splitlines()
    assert lines[0].split("\t")[0] == "b"
    assert [int(l.split("\t")[2]) for l in lines] == [1, 2, 3, 4]


edge_sets = st.sets(st.tuples(st.integers(0, 7), st.integers(0, 7)).filter(lambda t: t[0] < t[1]), max_size=20)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), edge_sets)
def test_matches_eigenvector(n, pairs):
    nodes = [f"n{j}" for j in range(n)]
    friends = [FriendEdge(nodes[a], nodes[b]) for a, b in pairs if b < n]
    g = build_graph(friends, nodes)
    pr = pagerank(g, tol=1e-12, max_iter=1000)
    _, G = dense_pagerank(g.nodes, g.edges, iters=1)
    w, V = np.linalg.eig(G)
    v = np.real(V[:, np.argmin(np.abs(w - 1))])
    v = v / v.sum()
    for j, node in enumerate(g.nodes):
        assert abs(pr.score[node] - v[j]) < 1e-7
    assert abs(sum(pr.score.values()) - 1) < 1e-9
    assert sorted(pr.rank.values()) == list(range(1, n + 1))


@settings(max_examples=30, deadline=None)
@given(edge_sets, st.permutations(range(10)))
def test_label_permutation_invariance(pairs, perm):
    nodes = [f"n{j}" for j in range(10)]
    relabel = {nodes[j]: f"m{perm[j]}" for j in range(10)}
    friends = [FriendEdge(nodes[a], nodes[b]) for a, b in pairs]
    a = pagerank(build_graph(friends, nodes))
    b = pagerank(build_graph([FriendEdge(relabel[e.a], relabel[e.b]) for e in friends], relabel.values()))
    for v in nodes:
        assert a.score[v] == pytest.approx(b.score[relabel[v]], abs=1e-10)


def test_rank_monotone_in_score():
    friends = [FriendEdge("hub", f"l{j}") for j in range(5)] + [FriendEdge("l0", "l1")]
    pr = pagerank(build_graph(friends, ["hub"] + [f"l{j}" for j in range(5)] + ["iso"]))
    order = sorted(pr.rank, key=pr.rank.get)
    assert order[0] == "hub" and pr.importance["hub"] == 1.0
    for u, v in itertools.pairwise(order):
        assert pr.score[u] >= pr.score[v]
        assert pr.importance[u] > pr.importance[v]
