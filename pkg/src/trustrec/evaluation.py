"""Top-k lists, @k metrics, cross-validated grid search and hold-out evaluation.

Ranking follows the rating-prediction protocol: a user's candidates are the items
they rated in the evaluation split, an item is recommended when its predicted
rating exceeds 3 and relevant when its true rating exceeds 3.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .dataset import Pair
from .factorization import TrainingDiverged

THRESHOLD = 3.0
ALPHA_GRID = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)
BETA_GRID = (0.0, 0.1, 0.3, 0.5, 0.7, 1.0)

REPORT_HEADER = ("algorithm", "ablation", "alpha", "beta", "k", "P", "R", "F1", "MAP", "RMSE", "MAE", "MRR", "UCov")
GRID_HEADER = ("alpha", "beta", "fold", "map")

Predictor = Callable[[str, str], float]


@dataclass(frozen=True)
class RankedList:
    user: str
    items: tuple[str, ...]
    scores: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.items)


def recommend(predictor: Predictor, u: str, test_items: Iterable[str], k: int) -> RankedList:
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = [(i, predictor(u, i)) for i in test_items]
    scored = [(i, s) for i, s in scored if s > THRESHOLD]
    scored.sort(key=lambda t: (-t[1], t[0]))
    scored = scored[:k]
    return RankedList(u, tuple(i for i, _ in scored), tuple(s for _, s in scored))


def user_scores(items: Sequence[str], relevant: set[str], k: int) -> tuple[float, float, float, float]:
    """(precision, recall, average precision, reciprocal rank) of one non-empty list.

    Recall and average precision are 0 for a user without relevant items.
    """
    items = list(items)[:k]
    hits = 0
    ap = 0.0
    rr = 0.0
    for pos, i in enumerate(items, 1):
        if i in relevant:
            hits += 1
            ap += hits / pos
            if rr == 0.0:
                rr = 1.0 / pos
    p = hits / len(items)
    r = hits / len(relevant) if relevant else 0.0
    ap = ap / len(relevant) if relevant else 0.0
    return p, r, ap, rr


@dataclass
class MetricsReport:
    p: float
    r: float
    f1: float
    map: float
    rmse: float
    mae: float
    mrr: float
    ucov: float
    k: int
    algorithm: str = ""
    ablation: str = "-"
    alpha: float | None = None
    beta: float | None = None
    n_users: int = 0
    n_covered: int = 0

    def row(self) -> list[str]:
        def num(v):
            return "-" if v is None else repr(float(v))
        return [self.algorithm, self.ablation or "-", num(self.alpha), num(self.beta), str(self.k),
                *(repr(float(v)) for v in (self.p, self.r, self.f1, self.map, self.rmse, self.mae, self.mrr, self.ucov))]


def write_report(reports: Iterable[MetricsReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for rep in reports:
            w.writerow(rep.row())


def metrics_at_k(lists: Mapping[str, RankedList], truth: Mapping[Pair, float], k: int,
                 users: Iterable[str] | None = None, predictions: Mapping[Pair, float] | None = None,
                 error_scope: str = "recommended") -> MetricsReport:
    """Aggregate P/R/F1/MAP/MRR/RMSE/MAE/UCov over per-user ranked lists.

    Users with an empty list count against UCov only. F1 combines the averaged P and R.
    ``error_scope="all"`` computes RMSE/MAE over every prediction in ``predictions``
    instead of the recommended items only.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    relevant: dict[str, set[str]] = {}
    for (u, i), r in truth.items():
        s = relevant.setdefault(u, set())
        if r > THRESHOLD:
            s.add(i)
    population = sorted(set(users) if users is not None else set(relevant))

    ps, rs, aps, rrs = [], [], [], []
    errs: list[float] = []
    for u in population:
        lst = lists.get(u)
        if lst is None or len(lst) == 0:
            continue
        if u not in relevant:
            raise ValueError(f"user {u!r} has a list but no ground-truth ratings")
        p, r, ap, rr = user_scores(lst.items, relevant[u], k)
        ps.append(p)
        rs.append(r)
        aps.append(ap)
        rrs.append(rr)
        if error_scope == "recommended":
            errs.extend(truth[(u, i)] - s for i, s in zip(lst.items[:k], lst.scores[:k]))
    if error_scope == "all":
        if predictions is None:
            raise ValueError("error_scope='all' needs predictions")
        errs = [truth[pair] - v for pair, v in sorted(predictions.items())]
    elif error_scope != "recommended":
        raise ValueError(f"unknown error scope {error_scope!r}")

    def mean(xs):
        return sum(xs) / len(xs) if xs else 0.0

    P, R = mean(ps), mean(rs)
    f1 = 2 * P * R / (P + R) if P + R > 0 else 0.0
    rmse = math.sqrt(mean([e * e for e in errs])) if errs else math.nan
    mae = mean([abs(e) for e in errs]) if errs else math.nan
    ucov = len(ps) / len(population) if population else 0.0
    return MetricsReport(P, R, f1, mean(aps), rmse, mae, mean(rrs), ucov, k,
                         n_users=len(population), n_covered=len(ps))


def evaluate_predictor(predictor: Predictor, pairs: Iterable[Pair], truth: Mapping[Pair, float], k: int,
                       error_scope: str = "recommended") -> MetricsReport:
    by_user: dict[str, list[str]] = {}
    for u, i in sorted(pairs):
        by_user.setdefault(u, []).append(i)
    lists = {u: recommend(predictor, u, items, k) for u, items in by_user.items()}
    sub_truth = {(u, i): truth[(u, i)] for u, items in by_user.items() for i in items}
    preds = None
    if error_scope == "all":
        preds = {(u, i): predictor(u, i) for u, items in by_user.items() for i in items}
    return metrics_at_k(lists, sub_truth, k, users=by_user, predictions=preds, error_scope=error_scope)


# --------------------------------------------------------------------------- grid search

# fit(train_ratings, alpha, beta) -> predictor
FitFn = Callable[[Mapping[Pair, float], float, float], Predictor]


@dataclass
class GridResult:
    best_alpha: float
    best_beta: float
    best_map: float
    cell_map: dict[tuple[float, float], float]
    rows: list[tuple[float, float, str, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(GRID_HEADER)
        for a, b, fold, m in self.rows:
            w.writerow([repr(float(a)), repr(float(b)), fold, repr(float(m))])
        return buf.getvalue()


def grid_search(ratings: Mapping[Pair, float], folds: Mapping[Pair, int], fit: FitFn,
                alphas: Sequence[float], betas: Sequence[float], k: int = 10) -> GridResult:
    """Mean validation MAP of every (alpha, beta) cell over the folds; best cell wins,
    ties going to the lower alpha, then the lower beta.

    A cell whose training diverges scores -inf. A single-cell grid is returned
    without cross-validation, with one placeholder row (fold ``-``, MAP ``nan``).
    """
    cells = sorted({(float(a), float(b)) for a in alphas for b in betas})
    if not cells:
        raise ValueError("empty grid")
    if len(cells) == 1:
        a, b = cells[0]
        return GridResult(a, b, math.nan, {cells[0]: math.nan}, [(a, b, "-", math.nan)])

    n_folds = max(folds.values()) + 1
    splits = []
    for f in range(n_folds):
        train = {p: r for p, r in ratings.items() if folds[p] != f}
        valid = sorted(p for p in ratings if folds[p] == f)
        splits.append((train, valid))

    rows = []
    cell_map = {}
    for a, b in cells:
        maps = []
        for f, (train, valid) in enumerate(splits):
            try:
                predictor = fit(train, a, b)
                m = evaluate_predictor(predictor, valid, ratings, k).map
            except TrainingDiverged:
                m = -math.inf
            maps.append(m)
            rows.append((a, b, str(f), m))
        cell_map[(a, b)] = sum(maps) / len(maps)

    best = cells[0]
    for c in cells[1:]:
        if cell_map[c] > cell_map[best]:
            best = c
    return GridResult(best[0], best[1], cell_map[best], cell_map, rows)


def evaluate_final(fit: FitFn, alpha: float, beta: float, train: Mapping[Pair, float],
                   test: Mapping[Pair, float], k: int = 10, error_scope: str = "recommended") -> MetricsReport:
    """Train the chosen configuration on the full training split and score the held-out split."""
    if not test:
        raise ValueError("empty split")
    predictor = fit(train, alpha, beta)
    return evaluate_predictor(predictor, test, test, k, error_scope)
