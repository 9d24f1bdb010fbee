"""Count completions of random K_{2,n} data and how many are real or strictly CND.

    python scripts/k2n_root_census.py --n-max 6 --seeds 20
"""

import argparse
from collections import Counter

from hrmodels.degree import emld_k2n_numeric


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0, help="first seed")
    args = ap.parse_args()

    print("n  roots  real-roots histogram        strictly-CND histogram")
    for n in range(2, args.n_max + 1):
        reps = [emld_k2n_numeric(n, args.seed + s) for s in range(args.seeds)]
        roots = Counter(r.emld for r in reps)
        real = Counter(r.details["real_roots"] for r in reps)
        cnd = Counter(r.details["strictly_cnd_roots"] for r in reps)
        print(f"{n}  {dict(roots)}  {dict(sorted(real.items()))}  {dict(sorted(cnd.items()))}")


if __name__ == "__main__":
    main()
