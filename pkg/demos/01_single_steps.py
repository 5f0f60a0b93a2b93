"""Anatomy of a single update for each rule.

All five optimizers start from x = 0 with zero moments and receive the
same gradient g = 1.  Watch what each one does with its second moment:
Adam bias-corrects it, AMSGrad takes a running max, C-Adam blends the
running moment with that max, C-Adam_V2 additionally floors the max.
"""

import numpy as np

from cadam import Hyperparams, Variant, init_state, step

h = Hyperparams(alpha0=0.5, alpha_schedule="constant", beta1=0.9,
                beta2=0.99, epsilon=1e-8, epsilon0=1.0)

print(f"hyperparameters: alpha={h.alpha0} beta1={h.beta1} beta2={h.beta2} "
      f"eps={h.epsilon} eps0={h.epsilon0}\n")

for variant in Variant:
    state = init_state(variant, [0.0])
    state, out = step(state, h, np.array([1.0]))
    lam = "-" if out.lam is None else f"{out.lam[0]:.3f}"
    print(f"{variant.value:9s} m={state.m[0]:+.4f} v={state.v[0]:.6f} "
          f"v_aux={state.v_aux[0]:.6f} lambda={lam} "
          f"proposed_x={out.proposed_x[0]:+.6f} lr_eff={out.effective_lr[0]:.4f}")

print("""
Notes:
 * adam divides by the bias-corrected sqrt(v/(1-beta2^t)), so its first
   step is a near-full step of size alpha;
 * amsgrad and cadam agree on the very first step (the running moment was
   zero, so lambda = 0 and the max is just v);
 * cadam-v2's floor eps0=1 swallows the tiny v=0.01, damping the step by
   a factor of 10.
""")

# a second step with a *smaller* gradient separates the families
print("second step with g = 0.1 (lambda = 1 means 'keep the old moment'):")
for variant in Variant:
    state = init_state(variant, [0.0])
    state, _ = step(state, h, np.array([1.0]))
    state, out = step(state, h, np.array([0.1]))
    lam = "-" if out.lam is None else f"{out.lam[0]:.3f}"
    print(f"{variant.value:9s} v={state.v[0]:.6f} v_aux={state.v_aux[0]:.6f} lambda={lam}")
