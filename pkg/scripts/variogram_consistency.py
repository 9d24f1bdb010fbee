"""Error of the empirical variogram of exact Pareto samples as n grows.

    python scripts/variogram_consistency.py --seeds 20 --jobs 4
"""

import argparse

import numpy as np

from hrmodels.config import make_rng
from hrmodels.graphs import cycle_graph
from hrmodels.pareto import empirical_variogram, sample_pareto
from hrmodels.varalg import model_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    gamma, _ = model_point(cycle_graph(args.d), make_rng(0))
    gamma = 3 * gamma / np.max(gamma)
    print(f"d={args.d}, Gamma from a cycle model point scaled to max 3")
    print("n        median-rel-err  q90-rel-err  mean-acceptance")
    for n in args.sizes:
        errs, acc = [], []
        for s in range(args.seeds):
            smp = sample_pareto(gamma, n, seed=s, jobs=args.jobs)
            errs.append(np.max(np.abs(empirical_variogram(smp) - gamma)) / np.max(gamma))
            acc.append(smp.acceptance)
        print(f"{n:<8d} {np.median(errs):.4g}  {np.quantile(errs, 0.9):.4g}  {np.mean(acc):.3f}")


if __name__ == "__main__":
    main()
