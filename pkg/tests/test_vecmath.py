import numpy as np
import pytest

from cadam.errors import DimMismatch, NegativeElement
from cadam.vecmath import (
    as_vector,
    dot,
    elementwise_max,
    elementwise_sqrt,
    norm_l2,
    norm_linf,
)


def test_sqrt_perfect_squares():
    np.testing.assert_array_equal(elementwise_sqrt(as_vector([0, 1, 4])), [0, 1, 2])


def test_sqrt_identity():
    np.testing.assert_array_equal(elementwise_sqrt(as_vector([1.0])), [1.0])


def test_sqrt_scalar_hand_value():
    # 0.1**2 = 0.01, so sqrt recovers 0.1 exactly up to rounding
    out = elementwise_sqrt(as_vector([0.01]))
    assert abs(out[0] - 0.1) <= 1e-17


def test_sqrt_negative_raises():
    with pytest.raises(NegativeElement):
        elementwise_sqrt(as_vector([1.0, -1e-30]))


def test_max_componentwise():
    np.testing.assert_array_equal(
        elementwise_max(as_vector([1, 5]), as_vector([3, 2])), [3, 5])
    np.testing.assert_array_equal(
        elementwise_max(as_vector([0, 0]), as_vector([0, 0])), [0, 0])
    np.testing.assert_array_equal(
        elementwise_max(as_vector([-1, 2]), as_vector([-1, 2])), [-1, 2])


def test_max_dim_mismatch():
    with pytest.raises(DimMismatch):
        elementwise_max(as_vector([1, 2]), as_vector([1, 2, 3]))


def test_norms_and_dot():
    assert norm_l2(as_vector([3, 4])) == 5.0
    assert norm_linf(as_vector([-7, 2])) == 7.0
    assert dot(as_vector([1, 2]), as_vector([3, 4])) == 11.0
    with pytest.raises(DimMismatch):
        dot(as_vector([1]), as_vector([1, 2]))


def test_vector_validation():
    with pytest.raises(DimMismatch):
        as_vector([])
    with pytest.raises(DimMismatch):
        as_vector([[1, 2], [3, 4]])
    assert as_vector(3.0).shape == (1,)


def test_max_dominates_both_operands():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.standard_normal(17)
        b = rng.standard_normal(17)
        m = elementwise_max(a, b)
        assert np.all(m >= a) and np.all(m >= b)


def test_sqrt_of_square_is_abs():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1000) * 10.0 ** rng.integers(-8, 8, size=1000)
    recovered = elementwise_sqrt(x * x)
    rel = np.abs(recovered - np.abs(x)) / np.abs(x)
    assert np.max(rel) <= 1e-15


def test_norm_inequalities():
    rng = np.random.default_rng(2)
    for _ in range(50):
        d = int(rng.integers(1, 40))
        v = rng.standard_normal(d) * 10.0 ** rng.integers(-3, 4)
        linf, l2 = norm_linf(v), norm_l2(v)
        assert linf <= l2 * (1 + 1e-15)
        assert l2 <= np.sqrt(d) * linf * (1 + 1e-15)


def test_sum_is_order_independent():
    # the reductions are exactly rounded, so permutations change nothing
    rng = np.random.default_rng(3)
    v = rng.standard_normal(500) * 10.0 ** rng.integers(-10, 10, size=500)
    assert norm_l2(v) == norm_l2(v[::-1])
    assert dot(v, v) == dot(v[::-1], v[::-1])
