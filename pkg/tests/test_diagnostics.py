import math

import numpy as np
import pytest

from cadam.diagnostics import (
    RunHistory,
    check_psi,
    moment_bound_margin,
    regret_bound_rhs,
    run_invariant_sweep,
    second_moment_view,
)
from cadam.errors import (
    DeltaNotLessThanOne,
    HistoryTooLarge,
    UnboundedDomain,
    VariantMismatch,
)
from cadam.oco import LinearLossProblem, run_oco
from cadam.optim import Hyperparams, Variant, init_state, step
from cadam.projection import FeasibleBox

H_CONST = Hyperparams(alpha0=0.5, alpha_schedule="constant", beta1=0.9,
                      beta2=0.99, epsilon=1e-8)
H_SQRT = Hyperparams(alpha0=0.5, alpha_schedule="inv_sqrt", beta1=0.9,
                     beta2=0.99, epsilon=1e-8)


def drive(variant, h, grads):
    state = init_state(variant, np.zeros(len(grads[0])))
    pairs = []
    for g in grads:
        new, out = step(state, h, np.asarray(g, dtype=np.float64))
        new.x = out.proposed_x
        pairs.append((state, new))
        state = new
    return pairs


def test_psi_zero_on_frozen_step_constant_alpha():
    # a big gradient then a tiny one freezes the C-Adam moment: psi = 0 exactly
    pairs = drive(Variant.CADAM, H_CONST, [[10.0], [1e-8]])
    assert check_psi(*pairs[1], H_CONST) == 0.0


def test_psi_nonnegative_for_cadam_constant_alpha():
    rng = np.random.default_rng(0)
    grads = rng.standard_normal((500, 4)) * 3.0
    for prev, new in drive(Variant.CADAM, H_CONST, grads):
        assert check_psi(prev, new, H_CONST) >= 0.0


def test_psi_negative_for_adam_on_crafted_trace():
    # large then small gradients shrink Adam's raw v: the increment goes negative
    grads = [[10.0]] + [[0.01]] * 20
    psis = [check_psi(p, n, H_CONST) for p, n in drive(Variant.ADAM, H_CONST, grads)]
    assert min(psis) < 0.0


def test_psi_requires_consecutive_states_and_a_second_moment():
    pairs = drive(Variant.CADAM, H_CONST, [[1.0], [1.0]])
    with pytest.raises(VariantMismatch):
        check_psi(pairs[0][0], pairs[1][1], H_CONST)  # skipped a step
    sgd_pairs = drive(Variant.SGD, H_CONST, [[1.0]])
    with pytest.raises(VariantMismatch):
        check_psi(*sgd_pairs[0], H_CONST)


def test_moment_bound_margin_single_step_frozen_value():
    h = Hyperparams(alpha0=0.5, beta1=0.9, beta2=0.99, epsilon=1e-8)
    m = np.array([0.9 * 0.0 + (1 - 0.9) * 1.0])
    v = np.array([0.99 * 0.0 + (1 - 0.99) * 1.0])
    # oracle: coeff * sqrt(v / (1 - delta^2)) - |m|, evaluated independently
    delta = 0.9 / math.sqrt(0.99)
    bound = (1 - 0.9) / math.sqrt(1 - 0.99) * math.sqrt(v[0] / (1 - delta ** 2))
    expected = bound - m[0]
    assert expected == pytest.approx(0.1345207879911715, abs=1e-14)
    assert moment_bound_margin(m, v, h) == pytest.approx(expected, abs=1e-15)
    assert moment_bound_margin(m, v, h) >= 0.1  # bound clears |m| comfortably


def test_moment_bound_margin_zero_history():
    h = Hyperparams(alpha0=0.5, beta1=0.9, beta2=0.99, epsilon=1e-8)
    assert moment_bound_margin(np.zeros(3), np.zeros(3), h) == 0.0


def test_moment_bound_margin_randomized_sweep():
    rng = np.random.default_rng(1)
    # 10^3 independent coordinates for 10^4 steps
    d, T = 1000, 10_000
    h = Hyperparams(alpha0=0.1, beta1=0.9, beta2=0.99, epsilon=1e-8)
    m = np.zeros(d)
    v = np.zeros(d)
    worst = math.inf
    for _ in range(T):
        g = rng.standard_normal(d) * 10.0 ** rng.integers(-2, 3)
        m = h.beta1 * m + (1 - h.beta1) * g
        v = h.beta2 * v + (1 - h.beta2) * g * g
        worst = min(worst, moment_bound_margin(m, v, h))
    assert worst >= -1e-12


def test_moment_bound_needs_delta_below_one():
    h = Hyperparams(alpha0=0.1, beta1=0.9, beta2=0.5, epsilon=1e-8)
    assert h.delta > 1.0
    with pytest.raises(DeltaNotLessThanOne):
        moment_bound_margin(np.zeros(1), np.zeros(1), h)


def test_second_moment_view():
    s = init_state(Variant.ADAM, [0.0])
    assert second_moment_view(s) is s.v
    s = init_state(Variant.CADAM, [0.0])
    assert second_moment_view(s) is s.v_aux
    with pytest.raises(VariantMismatch):
        second_moment_view(init_state(Variant.SGD, [0.0]))


# ---------------------------------------------------------------------------
# regret bound RHS
# ---------------------------------------------------------------------------

def manual_rhs(grads, vaux, h, omega, lambda_max_strict):
    """Independent evaluation of every bound component from first principles."""
    T, d = grads.shape
    delta = h.beta1 / math.sqrt(h.beta2)
    alpha_T = h.alpha0 / math.sqrt(T)
    term1 = omega ** 2 / (2 * alpha_T * (1 - h.beta1)) * np.sum(np.sqrt(vaux[-1]))
    term2 = 0.0
    for t in range(1, T + 1):
        alpha_t = h.alpha0 / math.sqrt(t)
        term2 += h.beta1 * np.sum(np.sqrt(vaux[t - 1])) / alpha_t
    term2 *= omega ** 2 / (1 - h.beta1) ** 2
    col_norms = sum(math.sqrt(np.sum(grads[:, i] ** 2)) for i in range(d))
    zeta = h.alpha0 * math.sqrt(1 + math.log(T)) / ((1 - delta) * math.sqrt(1 - h.beta2)) * col_norms
    k1 = 1 / (1 - h.beta1)
    lam_inf = 1.0 if lambda_max_strict is None else 1 / math.sqrt(1 - lambda_max_strict)
    k2 = (1 - h.beta1) ** 2 * lam_inf / ((1 - math.sqrt(h.beta2)) * (1 + delta))
    return term1, term2, zeta, k1, k2, term1 + term2 + zeta * max(k1, k2)


def test_bound_rhs_single_step_hand_computation():
    # one C-Adam step from zero on g = 1: v_aux = (1-beta2), lambda = 0
    h = H_SQRT
    grads = np.array([[1.0]])
    vaux = np.array([[0.01]])
    hist = RunHistory(gradients=grads, v_aux=vaux, lambda_max_strict=0.0,
                      case1_fraction=0.0)
    box = FeasibleBox.symmetric(1)
    report = regret_bound_rhs(hist, h, box, realized_regret=1.0)
    t1, t2, zeta, k1, k2, rhs = manual_rhs(grads, vaux, h, 2.0, 0.0)
    assert report.term1 == pytest.approx(t1, rel=1e-12)
    assert report.term2 == pytest.approx(t2, rel=1e-12)
    assert report.zeta == pytest.approx(zeta, rel=1e-12)
    assert report.k1 == pytest.approx(k1, rel=1e-12)
    assert report.k2 == pytest.approx(k2, rel=1e-12)
    assert report.rhs == pytest.approx(rhs, rel=1e-12)
    assert report.term1 == pytest.approx(4.0, rel=1e-12)  # 4/(2*0.5*0.1)*0.1
    assert report.term2 == pytest.approx(72.0, rel=1e-12)  # 400*0.9*0.1/0.5
    assert report.realized_regret <= report.rhs
    assert np.isfinite(report.rhs) and report.rhs >= 0.0


def test_bound_rhs_zero_beta1_kills_middle_term():
    h = Hyperparams(alpha0=0.5, alpha_schedule="inv_sqrt", beta1=0.0,
                    beta2=0.99, epsilon=1e-8)
    hist = RunHistory(gradients=np.ones((5, 2)), v_aux=np.full((5, 2), 0.3),
                      lambda_max_strict=None)
    report = regret_bound_rhs(hist, h, FeasibleBox.symmetric(2))
    assert report.term2 == 0.0
    assert report.lambda_inf == 1.0


def test_bound_rhs_matches_manual_on_random_history():
    rng = np.random.default_rng(2)
    grads = rng.standard_normal((50, 3))
    vaux = np.maximum.accumulate(rng.random((50, 3)), axis=0)
    hist = RunHistory(gradients=grads, v_aux=vaux, lambda_max_strict=0.7)
    report = regret_bound_rhs(hist, H_SQRT, FeasibleBox.symmetric(3))
    t1, t2, zeta, k1, k2, rhs = manual_rhs(grads, vaux, H_SQRT, 2.0, 0.7)
    assert report.rhs == pytest.approx(rhs, rel=1e-10)


def test_zeta_k1_forms_agree():
    # zeta*K1 and its explicitly resolved constant are the same expression
    hist = RunHistory(gradients=np.ones((20, 1)), v_aux=np.full((20, 1), 0.5),
                      lambda_max_strict=0.5)
    report = regret_bound_rhs(hist, H_SQRT, FeasibleBox.symmetric(1))
    assert report.zeta * report.k1 == pytest.approx(report.zeta_k1_direct, rel=1e-12)


@pytest.mark.parametrize("T", [1000, 10_000, 100_000])
def test_bound_holds_on_deterministic_run(T):
    prob = LinearLossProblem(mode="deterministic", period=101)
    res = run_oco(prob, "cadam", H_SQRT, T, collect_history=True)
    report = regret_bound_rhs(res.history, H_SQRT, prob.box,
                              realized_regret=res.tracker.regret)
    assert report.realized_regret <= report.rhs


def test_lambda_inf_monotone_in_prefix():
    prob = LinearLossProblem(mode="stochastic", seed=11)
    lam_infs = []
    for T in (200, 500, 1000, 2000):
        res = run_oco(prob, "cadam", H_SQRT, T, collect_history=True)
        report = regret_bound_rhs(res.history, H_SQRT, prob.box)
        lam_infs.append(report.lambda_inf)
    assert lam_infs == sorted(lam_infs)


def test_bound_rhs_preconditions():
    hist = RunHistory(gradients=np.ones((5, 1)), v_aux=np.ones((5, 1)))
    with pytest.raises(UnboundedDomain):
        regret_bound_rhs(hist, H_SQRT, FeasibleBox.unbounded())
    with pytest.raises(ValueError):
        regret_bound_rhs(hist, H_CONST, FeasibleBox.symmetric(1))
    bad_delta = Hyperparams(alpha0=0.5, alpha_schedule="inv_sqrt", beta1=0.9,
                            beta2=0.5, epsilon=1e-8)
    with pytest.raises(DeltaNotLessThanOne):
        regret_bound_rhs(hist, bad_delta, FeasibleBox.symmetric(1))


def test_history_size_cap():
    with pytest.raises(HistoryTooLarge):
        RunHistory.check_size(30_000_000, 1)


def test_invariant_sweep_smoke():
    report = run_invariant_sweep(seed=3, dim=100, steps=50)
    assert report.passed
    assert report.psi_min >= 0.0
    assert report.steps_checked >= 100 * 50
