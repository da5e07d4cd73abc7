"""Directed social graph and PageRank-based user importance."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .dataset import DatasetError, FriendEdge

DAMPING = 0.85
TOL = 1e-8
MAX_ITER = 100
# ranks are compared on scores rounded to this many digits so that
# float noise between structurally tied users does not decide the order
_TIE_DIGITS = 12


@dataclass(frozen=True)
class SocialGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def out_neighbors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.nodes}
        for a, b in sorted(self.edges):
            adj[a].append(b)
        return adj


@dataclass(frozen=True)
class PageRankResult:
    score: Mapping[str, float]
    rank: Mapping[str, int]
    importance: Mapping[str, float]
    iterations: int = 0

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for u in sorted(self.rank, key=self.rank.__getitem__):
                fh.write(f"{u}\t{self.score[u]!r}\t{self.rank[u]}\t{self.importance[u]!r}\n")


def build_graph(friends: Iterable[FriendEdge], users: Iterable[str]) -> SocialGraph:
    """Each friendship {a, b} becomes the two links a->b and b->a."""
    nodes = tuple(sorted(set(users)))
    known = set(nodes)
    edges = set()
    for e in friends:
        for u in (e.a, e.b):
            if u not in known:
                raise DatasetError(f"dangling reference: unknown user {u!r} in friend edge")
        edges.add((e.a, e.b))
        edges.add((e.b, e.a))
    return SocialGraph(nodes, frozenset(edges))


def importance_from_rank(rank: int) -> float:
    return 1.0 / (1.0 + math.log(rank))


def pagerank(g: SocialGraph, damping: float = DAMPING, tol: float = TOL,
             max_iter: int = MAX_ITER) -> PageRankResult:
    """Power iteration with uniform teleport; dangling mass is spread uniformly.

    Stops when the L1 change between iterates drops below ``tol`` or after ``max_iter`` steps.
    Ranks are ordinal: descending score, ties by ascending user id.
    """
    if not g.nodes:
        raise ValueError("pagerank of an empty graph")
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = len(g.nodes)
    index = {v: j for j, v in enumerate(g.nodes)}
    out_deg = np.zeros(n)
    for a, _ in g.edges:
        out_deg[index[a]] += 1
    if g.edges:
        src = np.array([index[a] for a, _ in sorted(g.edges)])
        dst = np.array([index[b] for _, b in sorted(g.edges)])
        M = sp.csr_matrix((1.0 / out_deg[src], (dst, src)), shape=(n, n))
    else:
        M = sp.csr_matrix((n, n))
    dangling = out_deg == 0

    x = np.full(n, 1.0 / n)
    it = 0
    for it in range(1, max_iter + 1):
        new = damping * (M @ x) + (damping * x[dangling].sum() + 1.0 - damping) / n
        new /= new.sum()
        delta = np.abs(new - x).sum()
        x = new
        if delta < tol:
            break

    score = {v: float(x[index[v]]) for v in g.nodes}
    order = sorted(g.nodes, key=lambda v: (-round(score[v], _TIE_DIGITS), v))
    rank = {v: r for r, v in enumerate(order, 1)}
    imp = {v: importance_from_rank(rank[v]) for v in g.nodes}
    return PageRankResult(score, rank, imp, it)


def importance(pr: PageRankResult, v: str) -> float:
    """Importance 1 / (1 + ln rank); the top-ranked user gets exactly 1."""
    if v not in pr.rank:
        raise KeyError(f"unknown user {v!r}")
    return importance_from_rank(pr.rank[v])
