"""Evaluating the regret bound on a real run.

The deterministic counterexample (rare slope every 101st round) satisfies
every precondition of the regret bound: step sizes alpha/sqrt(t), a
bounded box, delta = beta1/sqrt(beta2) < 1.  We run C-Adam with full
history retention and compare the realized regret against the bound's
right-hand side, term by term.
"""

import dataclasses

from cadam.harness import preset, run

for T in (1_000, 10_000):
    manifest = dataclasses.replace(preset("synthetic-det", "cadam", seed=0),
                                   iterations=T, theorem_check=True,
                                   trace_stride=max(1, T // 100))
    result = run(manifest, f"runs/bound/T{T}")
    b = result.summary["bound_report"]
    print(f"T = {T}")
    print(f"  realized regret   {b['realized_regret']:.1f}")
    print(f"  term1 (final moment)        {b['term1']:.4g}")
    print(f"  term2 (momentum carryover)  {b['term2']:.4g}")
    print(f"  zeta * max(K1, K2)          {b['zeta'] * max(b['k1'], b['k2']):.4g}")
    print(f"  K1 = {b['k1']:.4g}   K2 = {b['k2']:.4g}   lambda_inf = {b['lambda_inf']:.4g}")
    print(f"  zeta*K1 vs its resolved form: {b['zeta'] * b['k1']:.6g} "
          f"vs {b['zeta_k1_direct']:.6g} (identical by algebra)")
    print(f"  RHS               {b['rhs']:.4g}")
    print(f"  bound holds       {result.summary['bound_holds']}")
    print(f"  fraction of frozen-moment steps: {b['case1_fraction']:.3f}\n")

print("The bound is sound but loose by design -- its value is the worst case\n"
      "over every gradient sequence with the same column norms.")
