"""The five update rules: SGD, Adam, AMSGrad, C-Adam and C-Adam_V2.

Each step is a pure transition ``(state, gradient) -> (state', outcome)``.
The outcome carries the *proposed* (pre-projection) parameter point; callers
clamp it onto the feasible set themselves (see :mod:`cadam.projection`).

Conventions shared by all variants:

* epsilon sits inside the square root: the denominator is ``sqrt(v + eps)``,
  not ``sqrt(v) + eps``.  This changes behaviour for very small v and is
  deliberate.
* C-Adam's second moment is the convex combination
  ``v_aux' = lambda * v_aux + (1 - lambda) * max(v_aux, v)`` with
  ``lambda = v_aux / max(v_aux, v)``; the raw v recursion underneath is
  selected by ``Hyperparams.decay_base`` (see its docstring).
* Decay-rate powers used for bias correction are maintained as running
  products in the state, so a step depends only on (state, gradient) and is
  bit-reproducible across equivalent execution paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    ConfigInvalid,
    DimMismatch,
    NonFiniteGradient,
    NonFiniteState,
    ThresholdUnset,
)
from .vecmath import Vector, as_vector


class Variant(str, Enum):
    SGD = "sgd"
    ADAM = "adam"
    AMSGRAD = "amsgrad"
    CADAM = "cadam"
    CADAM_V2 = "cadam-v2"


#: Variants whose running second moment is provably non-decreasing.
MONOTONE_VARIANTS = (Variant.AMSGRAD, Variant.CADAM, Variant.CADAM_V2)


@dataclass(frozen=True)
class Hyperparams:
    """Scalar knobs shared by every variant.

    ``alpha_schedule`` is either ``"constant"`` (alpha_t = alpha0) or
    ``"inv_sqrt"`` (alpha_t = alpha0 / sqrt(t)); ``beta1_schedule`` is
    ``"constant"`` or ``"decaying"`` (beta1_t = beta1 * beta1_decay**(t-1)).
    ``epsilon0`` is the second-moment floor used only by C-Adam_V2.

    ``decay_base`` selects what the AMSGrad / C-Adam family's v recursion
    decays: ``"raw_v"`` (v_t = beta2 * v_{t-1} + ..., the closed form
    (1-beta2) * sum beta2^(t-j) g_j^2 that the convergence analysis and
    the moment-bound diagnostics assume) or ``"running_max"``
    (v_t = beta2 * v_aux_{t-1} + ..., taking the monotone running moment
    as the base).  The running-max form inflates the moment towards
    (1-beta2)^-1 * max g^2 and stalls long runs, so raw_v is the default;
    the alternative is kept for comparison.
    """

    alpha0: float = 0.001
    alpha_schedule: str = "constant"
    beta1: float = 0.9
    beta1_schedule: str = "constant"
    beta1_decay: float = 0.999
    beta2: float = 0.999
    epsilon: float = 1e-8
    epsilon0: float = 0.0
    decay_base: str = "raw_v"

    def __post_init__(self):
        if self.alpha0 < 0:
            raise ConfigInvalid("alpha0 must be >= 0")
        if not 0.0 <= self.beta1 < 1.0:
            raise ConfigInvalid("beta1 must be in [0, 1)")
        if not 0.0 < self.beta2 < 1.0:
            raise ConfigInvalid("beta2 must be in (0, 1)")
        if self.epsilon <= 0.0:
            raise ConfigInvalid("epsilon must be > 0")
        if self.epsilon0 < 0.0:
            raise ConfigInvalid("epsilon0 must be >= 0")
        if not 0.0 < self.beta1_decay <= 1.0:
            raise ConfigInvalid("beta1_decay must be in (0, 1]")
        if self.alpha_schedule not in ("constant", "inv_sqrt"):
            raise ConfigInvalid(f"alpha_schedule: unknown value {self.alpha_schedule!r}")
        if self.beta1_schedule not in ("constant", "decaying"):
            raise ConfigInvalid(f"beta1_schedule: unknown value {self.beta1_schedule!r}")
        if self.decay_base not in ("running_max", "raw_v"):
            raise ConfigInvalid(f"decay_base: unknown value {self.decay_base!r}")

    @property
    def delta(self) -> float:
        """beta1 / sqrt(beta2); must be < 1 for the moment-bound diagnostics."""
        return self.beta1 / math.sqrt(self.beta2)

    def alpha_at(self, t: int) -> float:
        if self.alpha_schedule == "inv_sqrt":
            return self.alpha0 / math.sqrt(t)
        return self.alpha0


@dataclass
class OptimizerState:
    """Per-parameter moments plus the step counter.

    ``v_aux`` is the variant-specific running second moment (vhat for
    AMSGrad, vtilde for the C-Adam family); it stays zero for SGD/Adam.
    ``beta1_pow``/``beta2_pow`` hold beta1**t / beta2**t as running
    products; ``rho_pow`` holds beta1_decay**(t-1) for the decaying
    beta1 schedule.
    """

    variant: Variant
    x: Vector
    m: Vector
    v: Vector
    v_aux: Vector
    t: int = 0
    beta1_pow: float = 1.0
    beta2_pow: float = 1.0
    rho_pow: float = 1.0

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class StepOutcome:
    """Proposed (pre-projection) point plus per-coordinate step diagnostics."""

    proposed_x: Vector
    effective_lr: Vector
    lam: Vector | None = None  # per-coordinate lambda, C-Adam family only


def init_state(variant: Variant | str, x0) -> OptimizerState:
    """Fresh state at t = 0 with zero moments."""
    x = as_vector(x0).copy()
    variant = Variant(variant)
    zeros = np.zeros_like(x)
    return OptimizerState(variant=variant, x=x, m=zeros.copy(), v=zeros.copy(),
                          v_aux=zeros.copy(), t=0)


def _beta1_t(h: Hyperparams, rho_pow: float) -> float:
    if h.beta1_schedule == "decaying":
        return h.beta1 * rho_pow
    return h.beta1


def _check_gradient(state: OptimizerState, g: Vector) -> None:
    if g.shape != state.x.shape:
        raise DimMismatch(f"gradient dim {g.shape[0]} vs parameter dim {state.dim}")
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradient("gradient contains NaN or infinity")


def _check_state_finite(state: OptimizerState, proposed: Vector) -> None:
    for name, arr in (("m", state.m), ("v", state.v), ("v_aux", state.v_aux),
                      ("proposed_x", proposed)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteState(f"{name} became non-finite at t={state.t}")


def step_sgd(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    if state.variant is not Variant.SGD:
        raise ConfigInvalid(f"step_sgd called on variant {state.variant}")
    g = as_vector(g)
    _check_gradient(state, g)
    t_next = state.t + 1
    alpha_t = h.alpha_at(t_next)
    proposed = state.x - alpha_t * g
    new = replace(state, t=t_next, x=state.x.copy())
    _check_state_finite(new, proposed)
    lr = np.full_like(state.x, alpha_t)
    return new, StepOutcome(proposed_x=proposed, effective_lr=lr)


def step_adam(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    """Bias-corrected update: x - alpha_t * mbar / sqrt(vbar + eps)."""
    if state.variant is not Variant.ADAM:
        raise ConfigInvalid(f"step_adam called on variant {state.variant}")
    g = as_vector(g)
    _check_gradient(state, g)
    t_next = state.t + 1
    beta1_t = _beta1_t(h, state.rho_pow)
    alpha_t = h.alpha_at(t_next)

    m_new = beta1_t * state.m + (1.0 - beta1_t) * g
    v_new = h.beta2 * state.v + (1.0 - h.beta2) * (g * g)
    beta1_pow = state.beta1_pow * h.beta1
    beta2_pow = state.beta2_pow * h.beta2
    m_bar = m_new / (1.0 - beta1_pow)
    v_bar = v_new / (1.0 - beta2_pow)
    denom = np.sqrt(v_bar + h.epsilon)
    proposed = state.x - alpha_t * m_bar / denom

    new = OptimizerState(variant=state.variant, x=state.x.copy(), m=m_new, v=v_new,
                         v_aux=state.v_aux.copy(), t=t_next,
                         beta1_pow=beta1_pow, beta2_pow=beta2_pow,
                         rho_pow=state.rho_pow * h.beta1_decay)
    _check_state_finite(new, proposed)
    return new, StepOutcome(proposed_x=proposed, effective_lr=alpha_t / denom)


def step_amsgrad(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    """Running-max update, no bias correction: x - alpha_t * m / sqrt(vhat + eps)."""
    if state.variant is not Variant.AMSGRAD:
        raise ConfigInvalid(f"step_amsgrad called on variant {state.variant}")
    g = as_vector(g)
    _check_gradient(state, g)
    t_next = state.t + 1
    beta1_t = _beta1_t(h, state.rho_pow)
    alpha_t = h.alpha_at(t_next)

    m_new = beta1_t * state.m + (1.0 - beta1_t) * g
    base = state.v_aux if h.decay_base == "running_max" else state.v
    v_new = h.beta2 * base + (1.0 - h.beta2) * (g * g)
    v_aux_new = np.maximum(v_new, state.v_aux)
    denom = np.sqrt(v_aux_new + h.epsilon)
    proposed = state.x - alpha_t * m_new / denom

    new = OptimizerState(variant=state.variant, x=state.x.copy(), m=m_new, v=v_new,
                         v_aux=v_aux_new, t=t_next,
                         beta1_pow=state.beta1_pow * h.beta1,
                         beta2_pow=state.beta2_pow * h.beta2,
                         rho_pow=state.rho_pow * h.beta1_decay)
    _check_state_finite(new, proposed)
    return new, StepOutcome(proposed_x=proposed, effective_lr=alpha_t / denom)


def _cadam_core(state: OptimizerState, h: Hyperparams, g: Vector, floor: float):
    """Shared C-Adam / C-Adam_V2 transition; `floor` is 0 for plain C-Adam."""
    t_next = state.t + 1
    beta1_t = _beta1_t(h, state.rho_pow)
    alpha_t = h.alpha_at(t_next)

    m_new = beta1_t * state.m + (1.0 - beta1_t) * g
    base = state.v_aux if h.decay_base == "running_max" else state.v
    v_new = h.beta2 * base + (1.0 - h.beta2) * (g * g)
    cap = np.maximum(state.v_aux, v_new)
    if floor > 0.0:
        cap = np.maximum(cap, floor)
    # lambda = v_aux / cap, with the 0/0 coordinate defined as 1 (both
    # candidate values are 0 there, and 1 matches the frozen-moment case).
    lam = np.ones_like(cap)
    nz = cap > 0.0
    lam[nz] = state.v_aux[nz] / cap[nz]
    v_aux_new = (1.0 - lam) * cap + lam * state.v_aux
    # rounding can push the convex combination an ulp outside [v_aux, cap];
    # clamp so the sandwich and monotonicity invariants hold exactly
    v_aux_new = np.minimum(np.maximum(v_aux_new, state.v_aux), cap)
    denom = np.sqrt(v_aux_new + h.epsilon)
    proposed = state.x - alpha_t * m_new / denom

    new = OptimizerState(variant=state.variant, x=state.x.copy(), m=m_new, v=v_new,
                         v_aux=v_aux_new, t=t_next,
                         beta1_pow=state.beta1_pow * h.beta1,
                         beta2_pow=state.beta2_pow * h.beta2,
                         rho_pow=state.rho_pow * h.beta1_decay)
    _check_state_finite(new, proposed)
    return new, StepOutcome(proposed_x=proposed, effective_lr=alpha_t / denom, lam=lam)


def step_cadam(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    """Convex-combination update between the running moment and its new max."""
    if state.variant is not Variant.CADAM:
        raise ConfigInvalid(f"step_cadam called on variant {state.variant}")
    g = as_vector(g)
    _check_gradient(state, g)
    return _cadam_core(state, h, g, floor=0.0)


def step_cadam_v2(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    """C-Adam with the max floored at epsilon0, damping small-moment oscillation."""
    if state.variant is not Variant.CADAM_V2:
        raise ConfigInvalid(f"step_cadam_v2 called on variant {state.variant}")
    if h.epsilon0 <= 0.0:
        raise ThresholdUnset("cadam-v2 requires epsilon0 > 0")
    g = as_vector(g)
    _check_gradient(state, g)
    return _cadam_core(state, h, g, floor=h.epsilon0)


_STEP_FNS = {
    Variant.SGD: step_sgd,
    Variant.ADAM: step_adam,
    Variant.AMSGRAD: step_amsgrad,
    Variant.CADAM: step_cadam,
    Variant.CADAM_V2: step_cadam_v2,
}


def step(state: OptimizerState, h: Hyperparams, g) -> tuple[OptimizerState, StepOutcome]:
    """Dispatch on the state's variant."""
    return _STEP_FNS[state.variant](state, h, g)
