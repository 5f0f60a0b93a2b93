import numpy as np
import pytest

from cadam.errors import ConfigInvalid
from cadam.oco import (
    LinearLossProblem,
    RegretTracker,
    average_regret,
    generate_slopes,
    run_oco,
    run_oco_reference,
    sample_loss,
)
from cadam.optim import Hyperparams, Variant

H = Hyperparams(alpha0=0.5, alpha_schedule="inv_sqrt", beta1=0.9, beta2=0.99,
                epsilon=1e-8, epsilon0=1.0)


def test_deterministic_slope_schedule():
    prob = LinearLossProblem(mode="deterministic", period=101)
    assert sample_loss(prob, 1) == 1010.0
    for t in range(2, 102):
        assert sample_loss(prob, t) == -10.0
    assert sample_loss(prob, 102) == 1010.0


def test_degenerate_probability_always_rare():
    prob = LinearLossProblem(mode="stochastic", p=1.0, seed=3)
    rng = np.random.default_rng(3)
    assert all(sample_loss(prob, t, rng) == 1010.0 for t in range(1, 200))


def test_seeded_stream_reproducible():
    prob = LinearLossProblem(mode="stochastic", seed=42)
    a = generate_slopes(prob, 5000)
    b = generate_slopes(prob, 5000)
    np.testing.assert_array_equal(a, b)


def test_bulk_slopes_match_per_round_draws():
    prob = LinearLossProblem(mode="stochastic", seed=9)
    bulk = generate_slopes(prob, 2000)
    rng = np.random.default_rng(prob.seed)
    seq = np.array([sample_loss(prob, t, rng) for t in range(1, 2001)])
    np.testing.assert_array_equal(bulk, seq)


def test_problem_validation():
    with pytest.raises(ConfigInvalid):
        LinearLossProblem(mode="stochastic", p=0.0)
    with pytest.raises(ConfigInvalid):
        LinearLossProblem(mode="deterministic", period=1)
    with pytest.raises(ConfigInvalid):
        # expected slope must stay positive for the lower-edge optimum
        LinearLossProblem(mode="stochastic", p=0.001)
    with pytest.raises(ConfigInvalid):
        LinearLossProblem(mode="sometimes")


def test_regret_single_round_hand_computation():
    tr = RegretTracker()
    tr.update(-10.0, -1.0)
    assert tr.cumulative_loss == 10.0
    assert tr.comparator_min == -10.0
    assert tr.regret == 20.0
    assert average_regret(tr) == 20.0


def test_regret_pinned_iterate_is_constant_average():
    tr = RegretTracker()
    for _ in range(50):
        tr.update(-10.0, -1.0)
    assert average_regret(tr) == pytest.approx(20.0)


def test_zero_regret_when_iterate_matches_comparator():
    tr = RegretTracker()
    tr.update(5.0, -1.0)
    assert tr.regret == 0.0
    assert average_regret(tr) == 0.0


def test_average_regret_needs_rounds():
    with pytest.raises(ConfigInvalid):
        average_regret(RegretTracker())


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("mode", ["stochastic", "deterministic"])
def test_kernel_matches_reference_bitwise(variant, mode):
    T = 4000
    prob = LinearLossProblem(mode=mode, seed=13)
    res = run_oco(prob, variant, H, T, stride=1, use_kernel=True)
    xs_ref, tracker_ref = run_oco_reference(prob, variant, H, T)
    xs_kernel = np.array([r.x0 for r in res.trace])
    np.testing.assert_array_equal(xs_kernel, xs_ref)
    assert res.tracker.cumulative_loss == tracker_ref.cumulative_loss
    assert res.tracker.slope_sum == tracker_ref.slope_sum


def test_python_fallback_matches_kernel():
    prob = LinearLossProblem(mode="stochastic", seed=5)
    a = run_oco(prob, "cadam", H, 3000, stride=1, use_kernel=True)
    b = run_oco(prob, "cadam", H, 3000, stride=1, use_kernel=False)
    np.testing.assert_array_equal([r.x0 for r in a.trace], [r.x0 for r in b.trace])


def test_iterates_stay_in_box():
    prob = LinearLossProblem(mode="stochastic", seed=2)
    for variant in ["adam", "amsgrad", "cadam"]:
        res = run_oco(prob, variant, H, 20000, stride=7)
        xs = np.array([r.x0 for r in res.trace])
        assert np.all(xs >= -1.0) and np.all(xs <= 1.0)


def test_regret_nonnegative_along_trace():
    prob = LinearLossProblem(mode="stochastic", seed=4)
    for variant in ["sgd", "adam", "amsgrad", "cadam"]:
        res = run_oco(prob, variant, H, 10000, stride=11)
        for row in res.trace:
            assert row.avg_regret >= -1e-9


def test_psi_nonnegative_for_monotone_variants():
    prob = LinearLossProblem(mode="stochastic", seed=6)
    for variant in ["amsgrad", "cadam", "cadam-v2"]:
        res = run_oco(prob, variant, H, 50000)
        assert res.psi_min >= 0.0


def test_trace_stride_and_row_count():
    prob = LinearLossProblem(mode="deterministic")
    res = run_oco(prob, "cadam", H, 1000, stride=100)
    assert [r.t for r in res.trace] == list(range(100, 1001, 100))
    res = run_oco(prob, "cadam", H, 1050, stride=100)
    assert [r.t for r in res.trace][-1] == 1050  # final row always present


def test_lambda_columns_only_for_cadam_family():
    prob = LinearLossProblem(mode="deterministic")
    res = run_oco(prob, "amsgrad", H, 100, stride=10)
    assert all(r.lambda_min is None for r in res.trace)
    res = run_oco(prob, "cadam", H, 100, stride=10)
    assert all(0.0 <= r.lambda_min <= 1.0 for r in res.trace)
    assert all(r.case_tag in ("case1", "case2") for r in res.trace)


def test_x0_outside_box_rejected():
    prob = LinearLossProblem(mode="deterministic")
    with pytest.raises(ConfigInvalid):
        run_oco(prob, "cadam", H, 10, x0=2.0)


def test_history_collection_shapes():
    prob = LinearLossProblem(mode="deterministic")
    res = run_oco(prob, "cadam", H, 500, collect_history=True)
    assert res.history.gradients.shape == (500, 1)
    assert res.history.v_aux.shape == (500, 1)
    assert 0.0 <= res.history.case1_fraction <= 1.0
