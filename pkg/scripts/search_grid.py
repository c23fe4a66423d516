"""Optimum of every preset over a small (n, k) grid, as TSV.

    python3 scripts/search_grid.py --k 3 --n-max 9
"""

import argparse

from intfam import search
from intfam.core import binom


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n-min", type=int)
    ap.add_argument("--n-max", type=int, default=9)
    ap.add_argument("--seconds", type=float, default=600)
    args = ap.parse_args()
    k = args.k
    print("n\tk\tpreset\toptimum\texpected\tclasses\tstatus\tnodes\tseconds")
    for n in range(args.n_min or 2 * k + 1, args.n_max + 1):
        if binom(n, k) > search.UNIVERSE_LIMIT:
            break
        for name in search.PRESETS:
            r = search.solve(search.preset(name, n, k), seconds=args.seconds)
            exp = search.expected_optimum(name, n, k)
            print(f"{n}\t{k}\t{name}\t{r.optimum}\t{exp}\t{len(r.witnesses)}\t{r.status}\t{r.nodes}\t{r.seconds:.1f}",
                  flush=True)


if __name__ == "__main__":
    main()
