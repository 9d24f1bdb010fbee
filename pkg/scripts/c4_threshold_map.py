"""Map which rank-one 4-cycle samples c(1, x2, x3, -(1+x2+x3)) admit a strictly CND completion.

Prints a character grid over (x2, x3): '+' completion exists, '.' none,
' ' degenerate sample. Optionally saves the grid as CSV.

    python scripts/c4_threshold_map.py --size 41 --extent 3
"""

import argparse

import numpy as np

from hrmodels.errors import DegenerateSample, DegenerateData
from hrmodels.threshold import EXISTS_CND, cycle4_rank1_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=41)
    ap.add_argument("--extent", type=float, default=3.0)
    ap.add_argument("--csv", help="write 1/0/nan grid here")
    args = ap.parse_args()

    axis = np.linspace(-args.extent, args.extent, args.size)
    grid = np.full((args.size, args.size), np.nan)
    for i, x3 in enumerate(axis[::-1]):
        for j, x2 in enumerate(axis):
            try:
                grid[i, j] = cycle4_rank1_experiment(x2, x3).outcome == EXISTS_CND
            except (DegenerateSample, DegenerateData, np.linalg.LinAlgError):
                pass
    for i, x3 in enumerate(axis[::-1]):
        row = "".join(" " if np.isnan(v) else "+" if v else "." for v in grid[i])
        print(f"{x3:6.2f} {row}")
    print(f"fraction with completion: {np.nanmean(grid):.3f}")
    if args.csv:
        np.savetxt(args.csv, grid, delimiter=",", fmt="%g")


if __name__ == "__main__":
    main()
