"""Runtime evaluation of the optimizers' theoretical invariants.

Three families of quantities live here:

* ``check_psi`` -- the per-coordinate increment of sqrt(v)/alpha_t between
  consecutive steps.  Nonnegativity of this increment is exactly what the
  monotone variants (AMSGrad, C-Adam, C-Adam_V2) guarantee and Adam does not.
* ``moment_bound_margin`` -- slack in the Cauchy-Schwarz bound
  |m_t| <= (1-beta1)/sqrt(1-beta2) * sqrt(v_t / (1-delta^2)), evaluated
  against the raw (Adam-style) second-moment recursion.
* ``regret_bound_rhs`` -- the full right-hand side of the C-Adam regret
  bound, assembled from a retained per-step moment/gradient history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DeltaNotLessThanOne,
    HistoryTooLarge,
    UnboundedDomain,
    VariantMismatch,
)
from .optim import MONOTONE_VARIANTS, Hyperparams, OptimizerState, Variant
from .projection import FeasibleBox
from .vecmath import Vector


@dataclass
class StepTrace:
    """One per-iteration diagnostic record (a row of the trace CSV)."""

    t: int
    loss: float
    grad_norm_inf: float
    lr_eff_min: float
    lr_eff_max: float
    avg_regret: float | None = None
    x0: float | None = None
    x_snapshot: Vector | None = None
    m_norm_inf: float | None = None
    v_norm_inf: float | None = None
    vaux_norm_inf: float | None = None
    psi_min: float | None = None
    lambda_min: float | None = None
    lambda_max: float | None = None
    case_tag: str | None = None  # "case1" | "case2" | "mixed"


@dataclass
class RunHistory:
    """Per-step gradient and running-moment history for offline bound checks.

    Arrays are (T, d).  ``lambda_max_strict`` is the largest lambda
    strictly below 1 seen on any coordinate-step (None if none occurred);
    ``case1_fraction`` is the fraction of coordinate-steps with lambda = 1.
    """

    gradients: np.ndarray
    v_aux: np.ndarray
    lambda_max_strict: float | None = None
    case1_fraction: float = 0.0

    # raise rather than silently eat memory on huge runs
    CAP: int = field(default=20_000_000, repr=False)

    @staticmethod
    def check_size(t: int, dim: int, cap: int = 20_000_000) -> None:
        if t * dim > cap:
            raise HistoryTooLarge(f"T*d = {t * dim} exceeds the {cap} cap")


@dataclass(frozen=True)
class BoundReport:
    """Evaluated components of the regret-bound right-hand side."""

    T: int
    omega_inf: float
    term1: float
    term2: float
    zeta: float
    k1: float
    k2: float
    lambda_inf: float
    case1_fraction: float
    rhs: float
    #: zeta*K1 re-derived directly from the frozen-moment case display;
    #: algebraically identical to zeta*k1 and reported for cross-checking.
    zeta_k1_direct: float
    realized_regret: float | None = None

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "omega_inf": self.omega_inf,
            "term1": self.term1,
            "term2": self.term2,
            "zeta": self.zeta,
            "k1": self.k1,
            "k2": self.k2,
            "lambda_inf": self.lambda_inf,
            "case1_fraction": self.case1_fraction,
            "rhs": self.rhs,
            "zeta_k1_direct": self.zeta_k1_direct,
            "realized_regret": self.realized_regret,
        }


def second_moment_view(state: OptimizerState) -> Vector:
    """The moment that scales the update: v_aux for monotone variants, v for Adam."""
    if state.variant in MONOTONE_VARIANTS:
        return state.v_aux
    if state.variant is Variant.ADAM:
        return state.v
    raise VariantMismatch("SGD has no second moment")


def check_psi(prev_state: OptimizerState, next_state: OptimizerState,
              h: Hyperparams) -> float:
    """min_i [ sqrt(v_t[i])/alpha_t - sqrt(v_{t-1}[i])/alpha_{t-1} ].

    Guaranteed >= 0 for the monotone variants; for Adam the value is
    returned as-is (its sign is exactly what can go wrong).  The t = 1
    predecessor term is 0 since moments start at zero.
    """
    if next_state.t != prev_state.t + 1:
        raise VariantMismatch("states are not consecutive")
    v_next = second_moment_view(next_state)
    v_prev = second_moment_view(prev_state)
    scaled_next = np.sqrt(v_next) / h.alpha_at(next_state.t)
    if prev_state.t == 0:
        scaled_prev = np.zeros_like(scaled_next)
    else:
        scaled_prev = np.sqrt(v_prev) / h.alpha_at(prev_state.t)
    return float(np.min(scaled_next - scaled_prev))


def moment_bound_coeff(h: Hyperparams) -> float:
    """(1-beta1)/sqrt(1-beta2) with the delta < 1 precondition enforced."""
    if h.delta >= 1.0:
        raise DeltaNotLessThanOne(f"delta = {h.delta} >= 1")
    return (1.0 - h.beta1) / math.sqrt(1.0 - h.beta2)


def moment_bound_margin(m: Vector, v: Vector, h: Hyperparams) -> float:
    """min_i [ coeff * sqrt(v[i]/(1-delta^2)) - |m[i]| ].

    ``m`` is the usual beta1-EMA of gradients and ``v`` the *raw*
    beta2-EMA of squared gradients, both from zero initial state with a
    constant beta1; the Cauchy-Schwarz argument makes the margin
    nonnegative on every reachable state.
    """
    coeff = moment_bound_coeff(h)
    one_minus_d2 = 1.0 - h.delta ** 2
    bound = coeff * np.sqrt(v / one_minus_d2)
    return float(np.min(bound - np.abs(m)))


def _harmonic_log_factor(T: int) -> float:
    return math.sqrt(1.0 + math.log(T))


def regret_bound_rhs(history: RunHistory, h: Hyperparams, box: FeasibleBox,
                     realized_regret: float | None = None) -> BoundReport:
    """Assemble the regret-bound RHS from a retained run history.

    Requires alpha_t = alpha0/sqrt(t), delta < 1 and a bounded box.  The
    lambda_inf factor is taken over coordinate-steps with lambda < 1 only
    (frozen-moment steps have lambda = 1 and belong to the other case);
    if the whole trace froze, lambda_inf defaults to the neutral 1.
    """
    if h.alpha_schedule != "inv_sqrt":
        raise ValueError("bound requires the inv_sqrt step-size schedule")
    if h.delta >= 1.0:
        raise DeltaNotLessThanOne(f"delta = {h.delta} >= 1")
    if not box.is_bounded:
        raise UnboundedDomain("bound requires a finite-diameter feasible set")

    grads = np.asarray(history.gradients, dtype=np.float64)
    vaux = np.asarray(history.v_aux, dtype=np.float64)
    T, d = grads.shape
    RunHistory.check_size(T, d, history.CAP)
    omega = box.diameter_inf
    beta1, beta2, alpha = h.beta1, h.beta2, h.alpha0
    delta = h.delta

    alpha_T = h.alpha_at(T)
    sqrt_vaux = np.sqrt(vaux)
    term1 = omega ** 2 / (2.0 * alpha_T * (1.0 - beta1)) * float(np.sum(sqrt_vaux[-1]))

    ts = np.arange(1, T + 1, dtype=np.float64)
    if h.beta1_schedule == "decaying":
        beta1_ts = beta1 * h.beta1_decay ** (ts - 1.0)
    else:
        beta1_ts = np.full(T, beta1)
    alpha_ts = alpha / np.sqrt(ts)
    per_step = np.sum(sqrt_vaux, axis=1) * beta1_ts / alpha_ts
    term2 = omega ** 2 / (1.0 - beta1) ** 2 * float(np.sum(per_step))

    col_norms = float(np.sum(np.sqrt(np.sum(grads * grads, axis=0))))
    zeta = alpha * _harmonic_log_factor(T) / ((1.0 - delta) * math.sqrt(1.0 - beta2)) * col_norms

    k1 = 1.0 / (1.0 - beta1)
    # the same product written as the frozen-moment case resolves it
    zeta_k1_direct = (alpha * math.sqrt((1.0 + math.log(T)) * beta2)
                      / ((1.0 - beta1) * (math.sqrt(beta2) - beta1) * math.sqrt(1.0 - beta2))
                      * col_norms)

    if history.lambda_max_strict is None:
        lambda_inf = 1.0
    else:
        lambda_inf = 1.0 / math.sqrt(1.0 - history.lambda_max_strict)
    k2 = (1.0 - beta1) ** 2 * lambda_inf / ((1.0 - math.sqrt(beta2)) * (1.0 + delta))

    rhs = term1 + term2 + zeta * max(k1, k2)
    return BoundReport(T=T, omega_inf=omega, term1=term1, term2=term2, zeta=zeta,
                       k1=k1, k2=k2, lambda_inf=lambda_inf,
                       case1_fraction=history.case1_fraction, rhs=rhs,
                       zeta_k1_direct=zeta_k1_direct, realized_regret=realized_regret)


# ---------------------------------------------------------------------------
# Randomized invariant sweeps (shared by `cadam check` and the test suite).
# Coordinates evolve independently in every variant, so a d-dimensional run
# exercises d independent scalar trajectories per step.
# ---------------------------------------------------------------------------

@dataclass
class SweepReport:
    steps_checked: int
    psi_min: float
    moment_margin_min: float
    domination_ok: bool
    sandwich_ok: bool
    lambda_range_ok: bool

    @property
    def passed(self) -> bool:
        return (self.psi_min >= -1e-12 and self.moment_margin_min >= -1e-12
                and self.domination_ok and self.sandwich_ok and self.lambda_range_ok)


def run_invariant_sweep(seed: int = 0, dim: int = 1000, steps: int = 400,
                        n_hyper: int = 3) -> SweepReport:
    """Random gradient traces through all monotone variants at once.

    Checks, per coordinate-step: psi >= 0 for each monotone variant, the
    moment bound margin on the raw recursion, lambda in [0, 1], the
    C-Adam sandwich v_aux_prev <= v_aux <= max(v_aux_prev, v), and
    C-Adam's domination by AMSGrad's running max.
    """
    from .optim import init_state, step  # local import to avoid cycle at import time

    rng = np.random.default_rng(seed)
    psi_min = math.inf
    margin_min = math.inf
    domination_ok = True
    sandwich_ok = True
    lambda_ok = True
    total = 0

    for k in range(n_hyper):
        beta1 = float(rng.uniform(0.0, 0.95))
        beta2 = float(rng.uniform(max(0.5, beta1 ** 2 + 0.01), 0.9999))
        h = Hyperparams(alpha0=float(rng.uniform(0.01, 1.0)),
                        alpha_schedule="inv_sqrt" if k % 2 else "constant",
                        beta1=beta1, beta2=beta2, epsilon=1e-8, epsilon0=1e-3)
        if h.delta >= 1.0:
            continue
        states = {v: init_state(v, np.zeros(dim)) for v in MONOTONE_VARIANTS}
        m_raw = np.zeros(dim)
        v_raw = np.zeros(dim)
        for t in range(1, steps + 1):
            g = rng.standard_normal(dim) * 10.0 ** rng.integers(-2, 3)
            prev_aux = {v: s.v_aux.copy() for v, s in states.items()}
            outs = {}
            for v in MONOTONE_VARIANTS:
                s_new, out = step(states[v], h, g)
                outs[v] = out
                scaled_next = np.sqrt(s_new.v_aux) / h.alpha_at(t)
                if t > 1:
                    scaled_prev = np.sqrt(prev_aux[v]) / h.alpha_at(t - 1)
                else:
                    scaled_prev = np.zeros(dim)
                psi_min = min(psi_min, float(np.min(scaled_next - scaled_prev)))
                states[v] = s_new
            m_raw = h.beta1 * m_raw + (1.0 - h.beta1) * g
            v_raw = h.beta2 * v_raw + (1.0 - h.beta2) * (g * g)
            margin_min = min(margin_min, moment_bound_margin(m_raw, v_raw, h))
            lam = outs[Variant.CADAM].lam
            lambda_ok &= bool(np.all(lam >= 0.0) and np.all(lam <= 1.0))
            cad = states[Variant.CADAM]
            cap = np.maximum(prev_aux[Variant.CADAM], cad.v)
            sandwich_ok &= bool(np.all(cad.v_aux >= prev_aux[Variant.CADAM])
                                and np.all(cad.v_aux <= cap))
            domination_ok &= bool(np.all(cad.v_aux <= states[Variant.AMSGRAD].v_aux))
            total += dim
    return SweepReport(steps_checked=total, psi_min=psi_min,
                       moment_margin_min=margin_min, domination_ok=domination_ok,
                       sandwich_ok=sandwich_ok, lambda_range_ok=lambda_ok)
