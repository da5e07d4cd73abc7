"""Synthetic directional study: grid-searched LOCABAL+ against plain MF over several seeds.

Writes one CSV row per seed and prints the win count.

    python3 scripts/run_directional_study.py --seeds 10 --out study.csv
"""
import argparse
import csv
import sys
import time

from trustrec.study import StudyConfig, run_seed


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--factors", type=int, default=StudyConfig.factors)
    ap.add_argument("--epochs", type=int, default=StudyConfig.epochs)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args(argv)

    cfg = StudyConfig(factors=args.factors, epochs=args.epochs)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["seed", "mf_map", "locabal_plus_map", "best_alpha", "best_beta", "seconds"])
    wins = 0
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        t0 = time.perf_counter()
        o = run_seed(seed, cfg)
        wins += o.plus_wins
        w.writerow([seed, repr(o.mf_map), repr(o.plus_map), repr(o.best_alpha), repr(o.best_beta),
                    f"{time.perf_counter() - t0:.1f}"])
        fh.flush()
    if fh is not sys.stdout:
        fh.close()
    print(f"LOCABAL+ >= MF on MAP in {wins}/{args.seeds} seeds", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
