"""Online convex optimization loop and the synthetic linear counterexample.

At each round t the algorithm holds an iterate x_t inside the box, pays
``f_t(x_t) = slope_t * x_t``, hands the gradient (= slope) to the
optimizer, and projects the proposed point back onto the box.  A rare
large positive slope (1010 with probability 0.01, against -10 otherwise)
makes the expected loss increasing in x, so the optimum sits at the lower
box edge -- the classical setting where Adam drifts to the opposite edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .diagnostics import RunHistory, StepTrace, second_moment_view
from .errors import ConfigInvalid, NonFiniteState
from .optim import Hyperparams, Variant, init_state, step
from .projection import FeasibleBox, project


@dataclass(frozen=True)
class LinearLossProblem:
    """f_t(x) = slope_t * x on a box, slopes drawn per round.

    ``mode`` is "stochastic" (rare slope with probability p, one PRNG draw
    per round) or "deterministic" (rare slope exactly when t mod period == 1).
    """

    c_rare: float = 1010.0
    c_common: float = -10.0
    p: float = 0.01
    mode: str = "stochastic"
    seed: int = 0
    period: int = 101
    box: FeasibleBox = field(default_factory=lambda: FeasibleBox.symmetric(1))

    def __post_init__(self):
        if self.mode not in ("stochastic", "deterministic"):
            raise ConfigInvalid(f"mode: unknown value {self.mode!r}")
        if self.mode == "stochastic":
            if not 0.0 < self.p <= 1.0:
                raise ConfigInvalid("p must be in (0, 1]")
            mean = self.p * self.c_rare + (1.0 - self.p) * self.c_common
        else:
            if self.period < 2:
                raise ConfigInvalid("period must be >= 2")
            mean = (self.c_rare + (self.period - 1) * self.c_common) / self.period
        if mean <= 0.0:
            raise ConfigInvalid(
                f"expected slope {mean} <= 0: optimum would not sit at the lower edge")
        if not self.box.is_bounded or self.box.lower.shape[0] != 1:
            raise ConfigInvalid("box must be a bounded 1-D interval")


def sample_loss(prob: LinearLossProblem, t: int, rng: np.random.Generator | None = None) -> float:
    """Slope of round t; consumes exactly one draw per call in stochastic mode."""
    if t < 1:
        raise ConfigInvalid("round index t must be >= 1")
    if prob.mode == "deterministic":
        return prob.c_rare if t % prob.period == 1 else prob.c_common
    if rng is None:
        raise ConfigInvalid("stochastic mode needs a PRNG stream")
    return prob.c_rare if rng.random() < prob.p else prob.c_common


def generate_slopes(prob: LinearLossProblem, T: int) -> np.ndarray:
    """The full slope sequence for rounds 1..T.

    Stochastic slopes come from PCG64 seeded with ``prob.seed``; drawing
    them in bulk consumes the stream exactly as per-round draws would.
    """
    if prob.mode == "deterministic":
        ts = np.arange(1, T + 1)
        return np.where(ts % prob.period == 1, prob.c_rare, prob.c_common).astype(np.float64)
    rng = np.random.default_rng(prob.seed)
    return np.where(rng.random(T) < prob.p, prob.c_rare, prob.c_common).astype(np.float64)


@dataclass
class RegretTracker:
    """Cumulative loss against the best fixed point in hindsight.

    For linear losses on a box the realized slope sum is a sufficient
    statistic: the comparator minimum is -|sum of slopes|.
    """

    cumulative_loss: float = 0.0
    slope_sum: float = 0.0
    t: int = 0

    def update(self, slope: float, x: float) -> float:
        loss = slope * x
        self.cumulative_loss += loss
        self.slope_sum += slope
        self.t += 1
        return loss

    @property
    def comparator_min(self) -> float:
        return -abs(self.slope_sum)

    @property
    def regret(self) -> float:
        return self.cumulative_loss - self.comparator_min


def average_regret(tracker: RegretTracker) -> float:
    if tracker.t < 1:
        raise ConfigInvalid("average regret needs at least one round")
    return tracker.regret / tracker.t


@dataclass
class LinearRunResult:
    trace: list[StepTrace]
    final_x: float
    tracker: RegretTracker
    variant: Variant
    psi_min: float | None
    moment_margin_min: float | None
    #: first step index after which |x - hit_target| <= hit_tol holds for good
    settle_iteration: int | None
    lambda_max_strict: float | None
    case1_fraction: float | None
    history: RunHistory | None = None

    @property
    def avg_regret(self) -> float:
        return average_regret(self.tracker)


_VARIANT_CODES = {
    Variant.SGD: _kernels.SGD,
    Variant.ADAM: _kernels.ADAM,
    Variant.AMSGRAD: _kernels.AMSGRAD,
    Variant.CADAM: _kernels.CADAM,
    Variant.CADAM_V2: _kernels.CADAM_V2,
}
_CASE_NAMES = {_kernels.CASE_NONE: None, _kernels.CASE1: "case1", _kernels.CASE2: "case2"}


def run_oco(prob: LinearLossProblem, variant: Variant | str, h: Hyperparams, T: int,
            x0: float = 0.0, stride: int = 1000, collect_history: bool = False,
            use_kernel: bool = True, hit_target: float = -1.0,
            hit_tol: float = 0.05) -> LinearRunResult:
    """Run one optimizer for T rounds of the linear problem.

    ``use_kernel`` selects the compiled scalar loop; the fallback drives
    the generic numpy step functions and produces bit-identical output.
    """
    if T < 1:
        raise ConfigInvalid("T must be >= 1")
    variant = Variant(variant)
    lo = float(prob.box.lower[0])
    hi = float(prob.box.upper[0])
    if not lo <= x0 <= hi:
        raise ConfigInvalid(f"x0 = {x0} outside the box [{lo}, {hi}]")
    slopes = generate_slopes(prob, T)
    if collect_history:
        RunHistory.check_size(T, 1)
        hist_g = np.empty(T)
        hist_vaux = np.empty(T)
    else:
        hist_g = np.empty(1)
        hist_vaux = np.empty(1)

    margin_enabled = (variant is not Variant.SGD and h.beta1_schedule == "constant"
                      and h.delta < 1.0)
    if margin_enabled:
        margin_coeff = (1.0 - h.beta1) / math.sqrt(1.0 - h.beta2)
        margin_od2 = 1.0 - h.delta ** 2
    else:
        margin_coeff = 0.0
        margin_od2 = 1.0

    fn = _kernels.linear_run_compiled if use_kernel else _kernels._linear_run
    (row_t, row_loss, row_avg, row_x, row_psi, row_lam, row_lr, row_grad,
     row_m, row_v, row_vaux, row_case,
     x, m, v, vaux, b1pow, b2pow, rhopow,
     cumloss, slope_sum, psi_min, margin_min,
     lam_strict_max, case1_count, last_outside, status) = fn(
        _VARIANT_CODES[variant], slopes, float(x0), lo, hi,
        h.alpha0, h.alpha_schedule == "inv_sqrt",
        h.beta1, h.beta1_schedule == "decaying", h.beta1_decay, h.beta2,
        h.epsilon, h.epsilon0, h.decay_base == "running_max",
        margin_coeff, margin_od2, margin_enabled,
        hit_target, hit_tol, stride,
        hist_g, hist_vaux, collect_history)
    if status != 0:
        raise NonFiniteState(f"run diverged to non-finite values at t={status}")

    is_cadam = variant in (Variant.CADAM, Variant.CADAM_V2)
    trace = []
    for i in range(row_t.shape[0]):
        lam_i = float(row_lam[i]) if is_cadam else None
        trace.append(StepTrace(
            t=int(row_t[i]), loss=float(row_loss[i]),
            grad_norm_inf=float(row_grad[i]),
            lr_eff_min=float(row_lr[i]), lr_eff_max=float(row_lr[i]),
            avg_regret=float(row_avg[i]), x0=float(row_x[i]),
            m_norm_inf=float(row_m[i]), v_norm_inf=float(row_v[i]),
            vaux_norm_inf=float(row_vaux[i]),
            psi_min=float(row_psi[i]) if variant is not Variant.SGD else None,
            lambda_min=lam_i, lambda_max=lam_i,
            case_tag=_CASE_NAMES[int(row_case[i])] if is_cadam else None))

    tracker = RegretTracker(cumulative_loss=float(cumloss),
                            slope_sum=float(slope_sum), t=T)
    history = None
    if collect_history:
        history = RunHistory(
            gradients=hist_g.reshape(T, 1), v_aux=hist_vaux.reshape(T, 1),
            lambda_max_strict=float(lam_strict_max) if lam_strict_max >= 0.0 else None,
            case1_fraction=case1_count / T if is_cadam else 0.0)
    return LinearRunResult(
        trace=trace, final_x=float(x), tracker=tracker, variant=variant,
        psi_min=float(psi_min) if variant is not Variant.SGD else None,
        moment_margin_min=float(margin_min) if margin_enabled else None,
        settle_iteration=int(last_outside) + 1 if last_outside < T else None,
        lambda_max_strict=float(lam_strict_max) if (is_cadam and lam_strict_max >= 0.0) else None,
        case1_fraction=case1_count / T if is_cadam else None,
        history=history)


@dataclass
class ProjectedRunResult:
    losses: np.ndarray
    final_x: np.ndarray
    history: RunHistory | None


def run_projected(loss_grad_fn, variant: Variant | str, h: Hyperparams, T: int,
                  box: FeasibleBox, x0, collect_history: bool = False) -> ProjectedRunResult:
    """Generic projected OCO loop over arbitrary per-round losses.

    ``loss_grad_fn(t, x) -> (loss, grad)`` supplies round t's loss at the
    current iterate.  With ``collect_history`` the per-step gradients and
    running second moments are retained for the offline bound check.
    """
    variant = Variant(variant)
    state = init_state(variant, x0)
    d = state.dim
    losses = np.empty(T)
    hist_g = np.empty((T, d)) if collect_history else None
    hist_vaux = np.empty((T, d)) if collect_history else None
    if collect_history:
        RunHistory.check_size(T, d)
    lam_strict = -1.0
    case1 = 0
    coord_steps = 0
    for t in range(1, T + 1):
        loss, g = loss_grad_fn(t, state.x)
        losses[t - 1] = loss
        state, out = step(state, h, g)
        weights = np.zeros(d)
        if variant is not Variant.SGD:
            weights = np.sqrt(second_moment_view(state))
        state.x = project(out.proposed_x, weights, box)
        if out.lam is not None:
            strict = out.lam[out.lam < 1.0]
            if strict.size:
                lam_strict = max(lam_strict, float(np.max(strict)))
            case1 += int(np.sum(out.lam == 1.0))
            coord_steps += d
        if collect_history:
            hist_g[t - 1] = g
            hist_vaux[t - 1] = second_moment_view(state) if variant is not Variant.SGD else 0.0
    history = None
    if collect_history:
        history = RunHistory(gradients=hist_g, v_aux=hist_vaux,
                             lambda_max_strict=lam_strict if lam_strict >= 0.0 else None,
                             case1_fraction=case1 / coord_steps if coord_steps else 0.0)
    return ProjectedRunResult(losses=losses, final_x=state.x.copy(), history=history)


def run_oco_reference(prob: LinearLossProblem, variant: Variant | str, h: Hyperparams,
                      T: int, x0: float = 0.0) -> tuple[np.ndarray, RegretTracker]:
    """Drive the generic numpy step functions round by round.

    Returns the full iterate trajectory (x after each of the T steps) and
    the regret tracker.  Exists so tests can pin the fast kernel to the
    canonical implementation bit-for-bit.
    """
    variant = Variant(variant)
    slopes = generate_slopes(prob, T)
    state = init_state(variant, [x0])
    tracker = RegretTracker()
    xs = np.empty(T)
    weights = np.zeros(1)
    for t in range(1, T + 1):
        g = slopes[t - 1]
        tracker.update(g, float(state.x[0]))
        state, out = step(state, h, np.array([g]))
        if variant is not Variant.SGD:
            weights = np.sqrt(second_moment_view(state))
        state.x = project(out.proposed_x, weights, prob.box)
        xs[t - 1] = state.x[0]
    return xs, tracker
