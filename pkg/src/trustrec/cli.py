"""Command-line driver: ingest -> trust -> train -> grid search -> evaluation.

Configuration is a flat ``key = value`` file (``#`` starts a comment); command-line
flags override it. Example::

    data = data/yelp-hotel
    tags = Hotels, Hostels, Resorts
    min_ratings = 10
    variant = LOCABALPLUS
    ablation = full
    alpha = 0, 0.1, 0.3, 0.5, 0.7, 0.9
    beta = 0, 0.1, 0.3, 0.5, 0.7, 1.0
    factors = 50
    seed = 0
    out = runs/hotel
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .dataset import DatasetError, Dataset, SplitPlan, filter_dataset, load_dataset, split_holdout, write_dataset
from .evaluation import ALPHA_GRID, BETA_GRID, evaluate_final, grid_search, write_report
from .factorization import LOCABAL, LOCABALPLUS, HyperParams, TrainingDiverged
from .knn import NeighborhoodSpec
from .mtm import compute_trust
from .pipeline import Pipeline, normalize_variant
from .synth import SynthConfig, generate

log = logging.getLogger("trustrec")


@dataclass
class RunConfig:
    data: str = ""
    schema: str = "positive-only"
    min_ratings: int = 0
    tags: tuple[str, ...] = ()
    count_on: str = "filtered"
    variant: str = "LOCABALPLUS"
    ablation: str = "full"
    alpha: tuple[float, ...] = ALPHA_GRID
    beta: tuple[float, ...] = BETA_GRID
    k: int = 10
    factors: int = 50
    lam: float = 0.1
    learning_rate: float = 0.005
    epochs: int = 200
    init_scale: float = 0.1
    neighbors: int = 40
    test_fraction: float = 0.1
    folds: int = 5
    error_scope: str = "recommended"
    seed: int = 0
    out: str = "out"

    def validate(self) -> None:
        if not self.data:
            raise ValueError("no dataset path configured (data = ...)")
        if not Path(self.data).is_dir():
            raise ValueError(f"dataset directory {self.data!r} does not exist")
        if not self.alpha or not self.beta:
            raise ValueError("alpha and beta grids must be non-empty")
        normalize_variant(self.variant)

    def hyperparams(self) -> HyperParams:
        return HyperParams(k=self.factors, lam=self.lam, learning_rate=self.learning_rate,
                           epochs=self.epochs, seed=self.seed, init_scale=self.init_scale)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _coerce(name: str, raw: str):
    ftype = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    if name in ("alpha", "beta"):
        return _floats(raw)
    if name == "tags":
        return tuple(t.strip() for t in raw.split(",") if t.strip())
    if ftype == "int":
        return int(raw)
    if ftype == "float":
        return float(raw)
    return raw


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    known = {f.name for f in dataclasses.fields(RunConfig)}
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            updates[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: bad value for {key!r}: {exc}") from None
    return dataclasses.replace(cfg, **updates)


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"), cfg)
    overrides = {}
    for name in ("data", "seed", "ablation", "variant", "k", "out", "schema"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    for name in ("alpha", "beta"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = _floats(v)
    return dataclasses.replace(cfg, **overrides)


# --------------------------------------------------------------------------- commands

def load_filtered(cfg: RunConfig) -> Dataset:
    d = load_dataset(cfg.data, cfg.schema)
    return filter_dataset(d, cfg.min_ratings, cfg.tags, cfg.count_on)


def cmd_ingest(cfg: RunConfig) -> dict[str, float]:
    stats = load_filtered(cfg).stats()
    for key, v in stats.items():
        print(f"{key}\t{v!r}" if isinstance(v, float) else f"{key}\t{v}")
    return stats


def _pipeline(cfg: RunConfig, d: Dataset) -> Pipeline:
    return Pipeline(d, cfg.variant, cfg.ablation, cfg.hyperparams(), NeighborhoodSpec(k_neighbors=cfg.neighbors))


def _split(cfg: RunConfig, d: Dataset) -> tuple[SplitPlan, dict, dict]:
    plan = split_holdout(d, cfg.test_fraction, cfg.seed).with_folds(cfg.folds, cfg.seed + 1)
    ratings = d.ratings()
    return plan, {p: ratings[p] for p in plan.train}, {p: ratings[p] for p in plan.test}


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_trust(cfg: RunConfig) -> Path:
    d = load_filtered(cfg)
    pl = _pipeline(cfg, d)
    out = _outdir(cfg)
    pl.pagerank.dump(out / "pagerank.tsv")
    scores = compute_trust(d, pl.indicators, pl.ablation_for(cfg.beta[0]).trust)
    scores.dump(out / "trust.tsv")
    return out


def cmd_train(cfg: RunConfig) -> Path:
    d = load_filtered(cfg)
    pl = _pipeline(cfg, d)
    plan, train, _ = _split(cfg, d)
    out = _outdir(cfg)
    (out / "split.tsv").write_text(plan.serialize(), encoding="utf-8")
    pl.fit(train, cfg.alpha[0], cfg.beta[0])
    if pl.last_model is None:
        log.info("%s has no latent model to dump", pl.label)
    else:
        pl.last_model.dump(out / "model.txt")
    return out


def _grid(cfg: RunConfig, pl: Pipeline, plan: SplitPlan, train: dict):
    alphas, betas = pl.grid(cfg.alpha, cfg.beta)
    log.info("grid search %s over %d x %d cells", pl.label, len(alphas), len(betas))
    return grid_search(train, plan.folds, pl.fit, alphas, betas, cfg.k)


def cmd_grid(cfg: RunConfig) -> Path:
    d = load_filtered(cfg)
    pl = _pipeline(cfg, d)
    plan, train, _ = _split(cfg, d)
    out = _outdir(cfg)
    res = _grid(cfg, pl, plan, train)
    (out / "grid.csv").write_text(res.to_csv(), encoding="utf-8")
    print(f"best alpha={res.best_alpha!r} beta={res.best_beta!r} MAP={res.best_map!r}")
    return out


def write_config_echo(pl: Pipeline, rep, path: Path) -> None:
    """Resolved settings of the reported configuration, one ``key = value`` per line."""
    lines = [f"algorithm = {rep.algorithm}", f"ablation = {rep.ablation}",
             f"alpha = {'-' if rep.alpha is None else repr(rep.alpha)}",
             f"beta = {'-' if rep.beta is None else repr(rep.beta)}"]
    if pl.variant == LOCABALPLUS:
        trust = pl.ablation_for(rep.beta).trust
        lines += [f"C{j} = {f}" for j, f in enumerate(trust.flags, 1)]
        lines.append(f"C = {trust.c_contrib}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _final(cfg: RunConfig, pl: Pipeline, alpha: float, beta: float, train: dict, test: dict, out: Path):
    rep = evaluate_final(pl.fit, alpha, beta, train, test, cfg.k, cfg.error_scope)
    rep.algorithm = pl.label
    rep.ablation, rep.alpha, rep.beta = pl.echo(alpha, beta)
    write_report([rep], out / "report.csv")
    write_config_echo(pl, rep, out / "config.txt")
    if pl.last_model is not None:
        pl.last_model.dump(out / "model.txt")
    return rep


def cmd_eval(cfg: RunConfig) -> Path:
    d = load_filtered(cfg)
    pl = _pipeline(cfg, d)
    plan, train, test = _split(cfg, d)
    out = _outdir(cfg)
    _final(cfg, pl, pl.effective_alpha(cfg.alpha[0]), cfg.beta[0], train, test, out)
    return out


def cmd_run(cfg: RunConfig) -> Path:
    """Split, trust dumps, grid search on the training split, then the held-out evaluation."""
    d = load_filtered(cfg)
    pl = _pipeline(cfg, d)
    plan, train, test = _split(cfg, d)
    out = _outdir(cfg)
    (out / "split.tsv").write_text(plan.serialize(), encoding="utf-8")
    if pl.variant in (LOCABAL, LOCABALPLUS):
        pl.pagerank.dump(out / "pagerank.tsv")
    if pl.variant == LOCABALPLUS:
        scores = compute_trust(d, pl.indicators, pl.ablation_for(cfg.beta[0]).trust, plan.train)
        scores.dump(out / "trust.tsv")
    res = _grid(cfg, pl, plan, train)
    (out / "grid.csv").write_text(res.to_csv(), encoding="utf-8")
    rep = _final(cfg, pl, res.best_alpha, res.best_beta, train, test, out)
    log.info("%s alpha=%s beta=%s MAP=%.4f", pl.label, rep.alpha, rep.beta, rep.map)
    return out


def cmd_synth(out: str, seed: int, n_users: int, n_items: int, noisy_fraction: float) -> Path:
    d, noisy = generate(SynthConfig(n_users=n_users, n_items=n_items, noisy_fraction=noisy_fraction, seed=seed))
    write_dataset(d, out)
    Path(out, "noisy_users.txt").write_text("".join(f"{u}\n" for u in sorted(noisy)), encoding="utf-8")
    return Path(out)


# --------------------------------------------------------------------------- argument parsing

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustrec", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--data", help="dataset directory")
        p.add_argument("--schema", choices=("positive-only", "positive-negative"))
        p.add_argument("--seed", type=int)
        p.add_argument("--variant", help="MF, LOCABAL, LOCABALPLUS, U2UCF or U2USOCIAL")
        p.add_argument("--ablation", choices=("full", "noF", "noE", "noS"))
        p.add_argument("--alpha", help="one value or a comma-separated grid")
        p.add_argument("--beta", help="one value or a comma-separated grid")
        p.add_argument("--k", type=int, help="list length for @k metrics")
        p.add_argument("--out", help="output directory")

    for name, text in [("ingest", "load, filter and print dataset statistics"),
                       ("trust", "write pagerank.tsv and trust.tsv"),
                       ("train", "train the first (alpha, beta) on the training split, dump model.txt"),
                       ("grid", "cross-validated grid search on the training split, write grid.csv"),
                       ("eval", "train the first (alpha, beta) and score the held-out split"),
                       ("run", "full protocol: split, trust, grid search, held-out evaluation")]:
        common(sub.add_parser(name, help=text))

    p = sub.add_parser("synth", help="write a synthetic dataset with planted noisy raters")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--items", type=int, default=200)
    p.add_argument("--noisy-fraction", type=float, default=0.3)
    return parser


COMMANDS = {"ingest": cmd_ingest, "trust": cmd_trust, "train": cmd_train, "grid": cmd_grid,
            "eval": cmd_eval, "run": cmd_run}


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            cmd_synth(args.out, args.seed, args.users, args.items, args.noisy_fraction)
            return 0
        cfg = build_config(args)
        cfg.validate()
        COMMANDS[args.command](cfg)
    except (DatasetError, ValueError, OSError, TrainingDiverged) as exc:
        print(f"trustrec {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
