"""User-to-user neighbourhood baselines (rating similarity or friendship)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .dataset import FriendEdge, Pair
from .factorization import RATING_MAX, RATING_MIN, pearson, ratings_by_user

SIMILARITY = "similarity"
FRIENDS = "friends"


@dataclass(frozen=True)
class NeighborhoodSpec:
    k_neighbors: int = 40
    min_overlap: int = 2
    source: str = SIMILARITY

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.source not in (SIMILARITY, FRIENDS):
            raise ValueError(f"unknown neighbour source {self.source!r}")


def _clamp(v: float) -> float:
    return min(RATING_MAX, max(RATING_MIN, v))


class UserKNN:
    """Mean-centred weighted-deviation predictor.

    ``source="similarity"`` weighs neighbours by Pearson correlation (negative
    correlations are dropped); ``source="friends"`` gives every friend weight 1.
    """

    def __init__(self, ratings: Mapping[Pair, float], spec: NeighborhoodSpec = NeighborhoodSpec(),
                 friends: Iterable[FriendEdge] = ()):
        self.spec = spec
        self.by_user = ratings_by_user(ratings)
        self.means = {u: sum(r.values()) / len(r) for u, r in self.by_user.items()}
        n = sum(len(r) for r in self.by_user.values())
        self.global_mean = sum(sum(r.values()) for r in self.by_user.values()) / n if n else 3.0
        self.raters: dict[str, list[str]] = {}
        for u, r in self.by_user.items():
            for i in r:
                self.raters.setdefault(i, []).append(u)
        self.friends: dict[str, set[str]] = {}
        for e in friends:
            self.friends.setdefault(e.a, set()).add(e.b)
            self.friends.setdefault(e.b, set()).add(e.a)
        self._sim: dict[tuple[str, str], float] = {}

    def similarity(self, u: str, v: str) -> float:
        if self.spec.source == FRIENDS:
            return 1.0 if v in self.friends.get(u, ()) else 0.0
        key = (u, v) if u < v else (v, u)
        if key not in self._sim:
            ru, rv = self.by_user.get(u, {}), self.by_user.get(v, {})
            overlap = len(ru.keys() & rv.keys())
            self._sim[key] = pearson(ru, rv, "corated") if overlap >= max(2, self.spec.min_overlap) else 0.0
        return self._sim[key]

    def neighbors(self, u: str, i: str) -> list[tuple[str, float]]:
        """Top-k raters of ``i`` by similarity to ``u``; ties by ascending user id."""
        cands = []
        for v in self.raters.get(i, ()):
            if v == u:
                continue
            s = self.similarity(u, v)
            if s > 0:
                cands.append((v, s))
        cands.sort(key=lambda t: (-t[1], t[0]))
        return cands[: self.spec.k_neighbors]

    def predict(self, u: str, i: str) -> float:
        base = self.means.get(u, self.global_mean)
        nbrs = self.neighbors(u, i)
        if not nbrs:
            return _clamp(base)
        num = sum(s * (self.by_user[v][i] - self.means[v]) for v, s in nbrs)
        den = sum(abs(s) for _, s in nbrs)
        return _clamp(base + num / den)

    __call__ = predict


def u2u_predict(ratings: Mapping[Pair, float], u: str, i: str, spec: NeighborhoodSpec = NeighborhoodSpec(),
                friends: Iterable[FriendEdge] = ()) -> float:
    """One-off prediction; build a :class:`UserKNN` when predicting many cells."""
    return UserKNN(ratings, spec, friends).predict(u, i)
