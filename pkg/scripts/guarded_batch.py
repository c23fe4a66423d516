"""Run guarded stabilization on random subfamilies of templates and tally the outcomes.

    python3 scripts/guarded_batch.py --runs 400 --seed 5
"""

import argparse
import collections
import random

from intfam import shifting
from intfam.constructions import build
from intfam.core import Params, random_intersecting, random_permutation, relabel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--keep-min", type=float, default=0.6)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    tally = collections.Counter()
    for _ in range(args.runs):
        n = rng.choice([9, 10])
        source = rng.choice(["J3", "FP", "random"])
        if source == "J3":
            base = build("J", Params(n, 4), i=3)
        elif source == "FP":
            base = build("FP", Params(n, 4))
        else:
            base = random_intersecting(n, 4, rng)
        keep = rng.uniform(args.keep_min, 1.0)
        fam = relabel(base.with_masks([m for m in base if rng.random() < keep]), random_permutation(n, rng))
        if shifting.hypothesis_failures(fam):
            tally["input outside hypotheses"] += 1
            continue
        try:
            _, _, log = shifting.guarded_stabilize(fam)
            tally["ok, cases " + (",".join(str(e.case) for e in log.case_events) or "none")] += 1
        except shifting.GuardedShiftError as exc:
            tally["refused: " + str(exc).split(" at ")[0]] += 1
    for key, count in sorted(tally.items()):
        print(f"{count:5d}  {key}")


if __name__ == "__main__":
    main()
