"""Directional study on synthetic data: grid-searched LOCABAL+ versus plain MF, one row per seed."""
from __future__ import annotations

from dataclasses import dataclass

from .dataset import kfold, split_holdout
from .evaluation import evaluate_final, grid_search
from .factorization import LOCABALPLUS, MF, HyperParams
from .pipeline import Pipeline
from .synth import SynthConfig, generate

# a reduced grid keeps ten seeds inside a few minutes on one core
STUDY_ALPHAS = (0.0, 0.1, 0.9)
STUDY_BETAS = (0.0, 0.3, 1.0)


@dataclass(frozen=True)
class StudyConfig:
    factors: int = 10
    lam: float = 1.0
    learning_rate: float = 0.005
    epochs: int = 200
    folds: int = 5
    k: int = 10
    test_fraction: float = 0.1
    alphas: tuple[float, ...] = STUDY_ALPHAS
    betas: tuple[float, ...] = STUDY_BETAS
    synth: SynthConfig = SynthConfig()


@dataclass(frozen=True)
class SeedOutcome:
    seed: int
    mf_map: float
    plus_map: float
    best_alpha: float
    best_beta: float

    @property
    def plus_wins(self) -> bool:
        return self.plus_map >= self.mf_map


def run_seed(seed: int, cfg: StudyConfig = StudyConfig()) -> SeedOutcome:
    d, _ = generate(SynthConfig(**{**cfg.synth.__dict__, "seed": seed}))
    ratings = d.ratings()
    plan = split_holdout(d, cfg.test_fraction, seed)
    train = {p: ratings[p] for p in plan.train}
    test = {p: ratings[p] for p in plan.test}
    hp = HyperParams(k=cfg.factors, lam=cfg.lam, learning_rate=cfg.learning_rate, epochs=cfg.epochs, seed=seed)

    mf = Pipeline(d, MF, hp=hp)
    mf_rep = evaluate_final(mf.fit, 0.0, 0.0, train, test, cfg.k)

    plus = Pipeline(d, LOCABALPLUS, "full", hp)
    res = grid_search(train, kfold(sorted(train), cfg.folds, seed + 1), plus.fit, cfg.alphas, cfg.betas, cfg.k)
    plus_rep = evaluate_final(plus.fit, res.best_alpha, res.best_beta, train, test, cfg.k)
    return SeedOutcome(seed, mf_rep.map, plus_rep.map, res.best_alpha, res.best_beta)


def run_study(seeds=range(10), cfg: StudyConfig = StudyConfig()) -> list[SeedOutcome]:
    return [run_seed(s, cfg) for s in seeds]
