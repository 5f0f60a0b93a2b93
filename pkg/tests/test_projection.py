import numpy as np
import pytest

from cadam.errors import ConfigInvalid, DimMismatch, NegativeWeight
from cadam.projection import FeasibleBox, project


def grid_argmin(y, w, lo, hi, res):
    """Brute-force minimizer of sum_i w_i (x_i - y_i)^2 over a product grid."""
    axes = [np.arange(lo, hi + res / 2, res) for _ in y]
    grids = np.meshgrid(*axes, indexing="ij")
    obj = np.zeros_like(grids[0])
    for i in range(len(y)):
        obj += w[i] * (grids[i] - y[i]) ** 2
    idx = np.unravel_index(int(np.argmin(obj)), obj.shape)
    return np.array([axes[i][idx[i]] for i in range(len(y))])


def box(dim, radius=1.0):
    return FeasibleBox.symmetric(dim, radius)


def test_clamp_to_upper_bound():
    out = project([1.7], [0.3], box(1))
    np.testing.assert_array_equal(out, [1.0])


def test_interior_point_fixed():
    out = project([0.2], [2.0], box(1))
    np.testing.assert_array_equal(out, [0.2])


def test_three_dim_example_against_grid_oracle():
    y = np.array([-3.0, 0.5, 2.0])
    w = np.array([1.0, 2.0, 3.0])
    expected = np.array([-1.0, 0.5, 1.0])
    np.testing.assert_array_equal(project(y, w, box(3)), expected)
    oracle = grid_argmin(y, w, -1.0, 1.0, 0.01)
    assert np.max(np.abs(oracle - expected)) <= 0.01 + 1e-12


@pytest.mark.parametrize("dim,res", [(1, 1e-3), (2, 1e-3), (3, 2e-2)])
def test_random_grid_oracle_agreement(dim, res):
    rng = np.random.default_rng(dim)
    for _ in range(5):
        y = rng.uniform(-2.5, 2.5, size=dim)
        w = rng.uniform(0.1, 5.0, size=dim)
        clamp = project(y, w, box(dim))
        oracle = grid_argmin(y, w, -1.0, 1.0, res)
        assert np.max(np.abs(clamp - oracle)) <= res + 1e-12


def test_idempotence_and_containment():
    rng = np.random.default_rng(7)
    b = box(6)
    for _ in range(100):
        y = rng.uniform(-3, 3, size=6)
        w = rng.uniform(0, 4, size=6)
        p1 = project(y, w, b)
        assert np.all(p1 >= b.lower) and np.all(p1 <= b.upper)
        np.testing.assert_array_equal(project(p1, w, b), p1)


def test_weight_invariance():
    rng = np.random.default_rng(8)
    b = box(4)
    for _ in range(50):
        y = rng.uniform(-3, 3, size=4)
        w1 = rng.uniform(0.01, 10, size=4)
        w2 = rng.uniform(0.01, 10, size=4)
        np.testing.assert_array_equal(project(y, w1, b), project(y, w2, b))


def test_zero_weight_still_clamps():
    np.testing.assert_array_equal(project([2.0, -2.0], [0.0, 0.0], box(2)), [1.0, -1.0])


def test_unbounded_identity():
    y = np.array([5.0, -7.0])
    out = project(y, [1.0, 1.0], FeasibleBox.unbounded())
    np.testing.assert_array_equal(out, y)
    assert FeasibleBox.unbounded().diameter_inf == np.inf


def test_diameter():
    b = FeasibleBox(lower=[-1.0, 0.0], upper=[1.0, 0.5])
    assert b.diameter_inf == 2.0


def test_errors():
    with pytest.raises(NegativeWeight):
        project([0.0], [-1e-9], box(1))
    with pytest.raises(DimMismatch):
        project([0.0, 0.0], [1.0], box(2))
    with pytest.raises(DimMismatch):
        project([0.0, 0.0], [1.0, 1.0], box(3))
    with pytest.raises(ConfigInvalid):
        FeasibleBox(lower=[1.0], upper=[-1.0])
    with pytest.raises(ConfigInvalid):
        FeasibleBox(lower=[np.inf], upper=[np.inf])
