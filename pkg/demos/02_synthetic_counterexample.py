"""The linear counterexample: where Adam walks the wrong way.

Losses are f_t(x) = slope_t * x on the interval [-1, 1], with a rare big
positive slope (1010, probability 1%) against a common -10.  The expected
slope is +0.2, so the best fixed point is x = -1.  Adam's second moment
forgets the rare spikes and drifts to +1; the monotone variants remember
them and head to -1, C-Adam a bit faster than AMSGrad.

Run with --full for the full 5e6 iterations (a few seconds with the
compiled kernel); default is 5e5 so the trend is visible quickly.
Run directories land in runs/synthetic/<optimizer>/ for the plot scripts.
"""

import argparse
import dataclasses

from cadam.harness import preset, run

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true", help="use the published 5e6 iterations")
parser.add_argument("--seed", type=int, default=7)
args = parser.parse_args()

iterations = 5_000_000 if args.full else 500_000

print(f"T = {iterations}, seed = {args.seed}\n")
for optimizer in ("sgd", "adam", "amsgrad", "cadam"):
    manifest = dataclasses.replace(preset("synthetic", optimizer, seed=args.seed),
                                   iterations=iterations)
    result = run(manifest, f"runs/synthetic/{optimizer}")
    s = result.summary
    settle = s["settle_iteration"] or "never"
    print(f"{optimizer:8s} final_x={s['final_x']:+.4f} "
          f"avg_regret={s['avg_regret']:.4f} settled_at={settle}")

print("""
Reading the numbers: adam's final x sits at the wrong edge (+1) and its
average regret stays bounded away from zero -- the non-convergence in
action.  amsgrad and cadam approach -1; check runs/synthetic/*/trace.csv
for the full trajectories (the frontend/ package renders them).
""")
