"""Fit query-count exponents for every walk and print the speedup table.

    python scripts/scaling_table.py --trials 2000 --seed 0 --out scaling
"""

import argparse
from pathlib import Path

from qwsimplex import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-list", default="16,32,64,128,256")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--metric", choices=experiments.QUANTUM_METRICS, default="peak")
    ap.add_argument("--out", default=None, help="directory for per-kind CSV files")
    args = ap.parse_args()
    ms = [int(m) for m in args.m_list.split(",")]
    results = {}
    for kind in experiments.SCALING_KINDS:
        res = experiments.run_scaling(kind, ms, args.trials, args.seed, metric=args.metric)
        results[kind] = res
        print(f"{kind:<18} exponent {res.exponent:6.3f}  r^2 {res.r_squared:.4f}")
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / f"scaling_{kind}.csv").write_text(res.to_csv())
    print()
    print(experiments.speedup_table(results), end="")


if __name__ == "__main__":
    main()
