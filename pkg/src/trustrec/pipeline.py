"""Algorithm wiring: turns a dataset plus configuration into fit functions for the harness."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property, partial
from typing import Mapping, Sequence

from .dataset import Dataset, Pair
from .factorization import (LOCABAL, LOCABALPLUS, MF, HyperParams, ModelParams, build_similarity,
                            locabal_plus_spec, locabal_spec, mf_spec, predict, train)
from .knn import FRIENDS, SIMILARITY, NeighborhoodSpec, UserKNN
from .mtm import (Ablation, IndicatorVector, ablation_config, compute_indicators, contribution_quality,
                  multi_dimensional_reputation, multi_faceted_trust)
from .trustgraph import PageRankResult, SocialGraph, build_graph, pagerank

U2UCF = "U2UCF"
U2USOCIAL = "U2USOCIAL"
ALGORITHMS = (MF, LOCABAL, LOCABALPLUS, U2UCF, U2USOCIAL)
ALGORITHM_LABELS = {MF: "MF", LOCABAL: "LOCABAL", LOCABALPLUS: "LOCABAL+", U2UCF: "U2UCF", U2USOCIAL: "U2USocial"}


def normalize_variant(name: str) -> str:
    key = name.upper().replace("+", "PLUS").replace("-", "").replace("_", "")
    for v in ALGORITHMS:
        if v == key:
            return v
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


@dataclass
class Pipeline:
    """Lazily computed shared state (graph, PageRank, indicators) plus one algorithm choice.

    Trust evidence comes from the whole dataset (feedback counts and friendships are
    side information); rating similarity only ever sees the training ratings passed to ``fit``.
    """

    dataset: Dataset
    variant: str = LOCABALPLUS
    ablation: str = "full"
    hp: HyperParams = field(default_factory=HyperParams)
    knn: NeighborhoodSpec = field(default_factory=NeighborhoodSpec)
    last_model: ModelParams | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.variant = normalize_variant(self.variant)
        ablation_config(self.ablation)

    @cached_property
    def graph(self) -> SocialGraph:
        return build_graph(self.dataset.friends, self.dataset.users)

    @cached_property
    def pagerank(self) -> PageRankResult:
        return pagerank(self.graph)

    @cached_property
    def indicators(self) -> IndicatorVector:
        return compute_indicators(self.dataset, self.pagerank)

    @cached_property
    def fcontr(self) -> dict[Pair, float]:
        return contribution_quality(self.dataset)

    def ablation_for(self, beta: float) -> Ablation:
        return ablation_config(self.ablation, beta)

    def effective_alpha(self, alpha: float) -> float:
        if self.variant == LOCABALPLUS:
            return self.ablation_for(0.0).alpha(alpha)
        return alpha if self.variant == LOCABAL else 0.0

    def grid(self, alphas: Sequence[float], betas: Sequence[float]) -> tuple[list[float], list[float]]:
        """The cells that are meaningful for this algorithm (unused axes collapse to 0)."""
        if self.variant == LOCABALPLUS:
            return sorted({self.effective_alpha(a) for a in alphas}), sorted(set(betas))
        if self.variant == LOCABAL:
            return sorted(set(alphas)), [0.0]
        return [0.0], [0.0]

    def echo(self, alpha: float, beta: float) -> tuple[str, float | None, float | None]:
        """(ablation, alpha, beta) as reported; parameters an algorithm does not use echo as None."""
        if self.variant == LOCABALPLUS:
            return self.ablation, self.effective_alpha(alpha), beta
        if self.variant == LOCABAL:
            return "-", alpha, None
        return "-", None, None

    @property
    def label(self) -> str:
        return ALGORITHM_LABELS[self.variant]

    def fit(self, ratings: Mapping[Pair, float], alpha: float = 0.0, beta: float = 0.0):
        if self.variant == U2UCF:
            return UserKNN(ratings, replace(self.knn, source=SIMILARITY))
        if self.variant == U2USOCIAL:
            return UserKNN(ratings, replace(self.knn, source=FRIENDS), self.dataset.friends)

        alpha = self.effective_alpha(alpha)
        hp = replace(self.hp, alpha=alpha)
        sim = None
        if self.variant == MF:
            spec = mf_spec()
        elif self.variant == LOCABAL:
            spec = locabal_spec(ratings, self.pagerank.importance)
            sim = build_similarity(ratings, self.graph) if alpha > 0 else None
        else:
            cfg = self.ablation_for(beta).trust
            mgr = multi_dimensional_reputation(self.indicators, cfg)
            mft = multi_faceted_trust(mgr, self.fcontr, ratings, cfg)
            spec = locabal_plus_spec(mft, mgr)
            sim = build_similarity(ratings, self.graph) if alpha > 0 else None
        model = train(ratings, spec, hp, sim)
        self.last_model = model
        return partial(predict, model)
