"""C-Adam_V2: flooring the moment maximum with epsilon0.

When all recent gradients are small, C-Adam's moment maximum is small
too, the effective step size balloons, and the iterate oscillates.
C-Adam_V2 floors the maximum at epsilon0.  A grid sweep shows the
trade-off: small floors change nothing, moderate floors damp early
oscillation and cut the regret, absurd floors freeze the optimizer.

The sweep helper makes no claim about how to pick epsilon0 a priori --
that needs validation data, which is the variant's practical weakness.
"""

import argparse
import dataclasses

from cadam.harness import SweepSpec, preset, run, sweep
from cadam.oco import LinearLossProblem, run_oco

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true")
parser.add_argument("--seed", type=int, default=7)
args = parser.parse_args()

iterations = 5_000_000 if args.full else 1_000_000
base = dataclasses.replace(preset("synthetic", "cadam-v2", seed=args.seed),
                           iterations=iterations)

reference = run(dataclasses.replace(base, optimizer="cadam"), "runs/eps0/cadam")
print(f"cadam reference: avg_regret={reference.summary['avg_regret']:.4f} "
      f"settled_at={reference.summary['settle_iteration']}\n")

rows = sweep(SweepSpec(base=base, axis="epsilon0",
                       values=(1e-4, 1e-2, 1.0, 100.0, 1e4, 1e5)), "runs/eps0/grid")
for row in rows:
    print(f"eps0={row['value']:>8g} final_x={row['final_x']:+.4f} "
          f"avg_regret={row['avg_regret']:.4f} settled_at={row['settle_iteration']}")

print("\nFloors below the typical moment scale reproduce cadam exactly;\n"
      "a floor near the spike scale (~1e2..1e4 here) trades a slightly\n"
      "slower start for visibly lower regret.")
