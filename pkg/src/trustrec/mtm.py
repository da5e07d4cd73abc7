"""Multi-faceted trust: per-user reputation indicators and per-rating trust weights.

Every indicator is a ratio against the best value in its reference group (the item
for contribution quality, the whole community for user indicators). Any 0/0 ratio
resolves to 0.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping, TypeVar

from .dataset import POSITIVE_NEGATIVE, REVIEW, TIP, Contribution, Dataset, Pair
from .trustgraph import PageRankResult

K = TypeVar("K", bound=Hashable)

INDICATORS = ("imp", "elite", "lup", "op_leader", "vis", "q")
ABLATIONS = ("full", "noF", "noE", "noS")


@dataclass(frozen=True)
class TrustConfig:
    """``flags`` switch (imp, elite, lup, op_leader, vis, q) on or off; ``c_contrib`` gates contribution quality."""

    beta: float = 0.0
    c_contrib: int = 1
    flags: tuple[int, int, int, int, int, int] = (1, 1, 1, 1, 1, 1)
    weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.c_contrib not in (0, 1):
            raise ValueError("c_contrib must be 0 or 1")
        if len(self.flags) != 6 or any(f not in (0, 1) for f in self.flags):
            raise ValueError("flags must be six 0/1 values")
        if len(self.weights) != 6 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be six non-negative values")

    def with_beta(self, beta: float) -> "TrustConfig":
        return TrustConfig(beta, self.c_contrib, self.flags, self.weights)


@dataclass(frozen=True)
class Ablation:
    name: str
    trust: TrustConfig
    force_alpha_zero: bool = False

    def alpha(self, alpha: float) -> float:
        return 0.0 if self.force_alpha_zero else alpha


@dataclass
class IndicatorVector:
    imp: dict[str, float] = field(default_factory=dict)
    elite: dict[str, float] = field(default_factory=dict)
    lup: dict[str, float] = field(default_factory=dict)
    op_leader: dict[str, float] = field(default_factory=dict)
    vis: dict[str, float] = field(default_factory=dict)
    q: dict[str, float] = field(default_factory=dict)

    def as_tuple(self) -> tuple[dict[str, float], ...]:
        return tuple(getattr(self, name) for name in INDICATORS)


@dataclass
class TrustScores:
    mgr: dict[str, float]
    fcontr: dict[Pair, float]
    mft: dict[Pair, float]

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for u in sorted(self.mgr):
                fh.write(f"{u}\t{self.mgr[u]!r}\n")
            for u, i in sorted(self.mft):
                fh.write(f"{u}\t{i}\t{self.fcontr.get((u, i), 0.0)!r}\t{self.mft[(u, i)]!r}\n")


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _max_normalize_groups(values: Mapping[K, float], group_of) -> dict[K, float]:
    best: dict[Hashable, float] = defaultdict(float)
    for key, v in values.items():
        g = group_of(key)
        best[g] = max(best[g], v)
    return {key: _ratio(v, best[group_of(key)]) for key, v in values.items()}


def _item_of(key) -> Hashable:
    return key[1]


def contribution_quality_pos(appreciations: Mapping[K, int], item_of=_item_of) -> dict[K, float]:
    """Appreciations of each contribution divided by the best count on the same item.

    Keys are contribution identifiers; ``item_of(key)`` gives the item they belong
    to (default: ``key[1]``, matching ``(author_id, item_id, ...)`` tuples).
    """
    return _max_normalize_groups(appreciations, item_of)


def helpfulness(pos: int, neg: int) -> float:
    return _ratio(pos, pos + neg)


def contribution_quality_pn(votes: Mapping[K, tuple[int, int]], item_of=_item_of) -> dict[K, float]:
    """Helpfulness pos/(pos+neg) of each contribution relative to the most helpful one on its item."""
    helpful = {key: helpfulness(p, n) for key, (p, n) in votes.items()}
    return _max_normalize_groups(helpful, item_of)


def yelp_appreciations(c: Contribution) -> int:
    if c.kind == REVIEW:
        return c.useful + c.funny + c.cool
    if c.kind == TIP:
        return c.like
    raise ValueError(f"unknown contribution kind {c.kind!r}")


def endorsement_score(raw: Mapping[str, int]) -> dict[str, float]:
    best = max(raw.values(), default=0)
    return {u: _ratio(v, best) for u, v in raw.items()}


def visibility(compliments: Mapping[str, int], contributions: Mapping[str, int]) -> dict[str, float]:
    best = max(compliments.values(), default=0)
    out = {}
    for u, c in compliments.items():
        n = contributions.get(u, 0)
        out[u] = min(1.0, _ratio(c, best * n))
    return out


def contributor_quality(values: Mapping[K, float], users: Iterable[str], author_of=lambda key: key[0]) -> dict[str, float]:
    """Total feedback over a user's contributions relative to the best contributor."""
    totals = {u: 0 for u in users}
    for key, v in values.items():
        totals[author_of(key)] += v
    best = max(totals.values(), default=0)
    return {u: _ratio(t, best) for u, t in totals.items()}


def multi_dimensional_reputation(ind: IndicatorVector, cfg: TrustConfig) -> dict[str, float]:
    on = [(vals, w) for vals, f, w in zip(ind.as_tuple(), cfg.flags, cfg.weights) if f]
    if not on:
        raise ValueError("at least one reputation indicator must be switched on")
    den = sum(w for _, w in on)
    if den <= 0:
        raise ValueError("switched-on indicator weights sum to zero")
    users = set().union(*(vals.keys() for vals, _ in on))
    return {u: min(1.0, sum(w * vals.get(u, 0.0) for vals, w in on) / den) for u in sorted(users)}


def multi_faceted_trust(mgr: Mapping[str, float], fcontr: Mapping[Pair, float], pairs: Iterable[Pair],
                        cfg: TrustConfig) -> dict[Pair, float]:
    """beta * mgr_user + C * (1 - beta) * fContr_pair for every pair; missing fContr counts as 0."""
    b, c = cfg.beta, cfg.c_contrib
    # b + (1 - b) can land one ulp above 1
    return {(u, i): min(1.0, b * mgr[u] + c * (1.0 - b) * fcontr.get((u, i), 0.0)) for u, i in pairs}


def ablation_config(name: str, beta: float = 0.0) -> Ablation:
    if name == "full":
        return Ablation(name, TrustConfig(beta, 1, (1, 1, 1, 1, 1, 1)))
    if name == "noF":
        return Ablation(name, TrustConfig(beta, 0, (1, 1, 1, 1, 1, 0)))
    if name == "noE":
        return Ablation(name, TrustConfig(beta, 1, (1, 0, 0, 0, 0, 1)))
    if name == "noS":
        return Ablation(name, TrustConfig(beta, 1, (0, 1, 1, 1, 1, 1)), force_alpha_zero=True)
    raise ValueError(f"unknown ablation {name!r}; expected one of {ABLATIONS}")


# --------------------------------------------------------------------------- Yelp instantiation

def pair_feedback(d: Dataset) -> dict[Pair, int]:
    """Appreciations per (user, item): the review's plus any tip on the same item."""
    out: dict[Pair, int] = defaultdict(int)
    for c in d.contributions:
        out[(c.author_id, c.item_id)] += yelp_appreciations(c)
    return dict(out)


def contribution_quality(d: Dataset) -> dict[Pair, float]:
    """fContr for every (user, item) with a contribution, using the dataset's feedback schema."""
    if d.schema == POSITIVE_NEGATIVE:
        votes = {(c.author_id, c.item_id): (c.positive_votes or 0, c.negative_votes or 0)
                 for c in d.contributions if c.kind == REVIEW}
        return contribution_quality_pn(votes)
    return contribution_quality_pos(pair_feedback(d))


def compute_indicators(d: Dataset, pr: PageRankResult | None) -> IndicatorVector:
    users = sorted(d.users)
    n_contrib = defaultdict(int)
    for c in d.contributions:
        n_contrib[c.author_id] += 1
    compliments = {u: d.users[u].compliments for u in users}

    if d.schema == POSITIVE_NEGATIVE:
        q = contributor_quality(contribution_quality(d), users)
    else:
        per_contribution = {c.key: yelp_appreciations(c) for c in d.contributions}
        q = contributor_quality(per_contribution, users)

    imp = {u: (pr.importance[u] if pr is not None and u in pr.importance else 0.0) for u in users}
    return IndicatorVector(
        imp=imp,
        elite=endorsement_score({u: d.users[u].elite_years for u in users}),
        lup=endorsement_score(compliments),
        op_leader=endorsement_score({u: d.users[u].fan_count for u in users}),
        vis=visibility(compliments, n_contrib),
        q=q,
    )


def compute_trust(d: Dataset, ind: IndicatorVector, cfg: TrustConfig,
                  pairs: Iterable[Pair] | None = None) -> TrustScores:
    """mgr per user and fContr/mft per rated pair (all of the dataset's ratings by default)."""
    mgr = multi_dimensional_reputation(ind, cfg)
    fcontr = contribution_quality(d)
    if pairs is None:
        pairs = sorted(d.ratings())
    return TrustScores(mgr, fcontr, multi_faceted_trust(mgr, fcontr, pairs, cfg))
