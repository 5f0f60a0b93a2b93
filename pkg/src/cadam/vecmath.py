"""Dense float64 vector arithmetic with pinned-down semantics.

Vectors are 1-D float64 numpy arrays. Reductions (sums, norms, dot products)
go through :func:`math.fsum`, which returns the exactly rounded sum and is
therefore independent of element order -- strictly stronger than fixing a
summation order, and what makes trace files reproducible across platforms.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimMismatch, NegativeElement

Vector = np.ndarray


def as_vector(values) -> Vector:
    """Coerce to a 1-D float64 array of length >= 1."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if v.size < 1:
        raise DimMismatch("vectors must have dim >= 1")
    return v


def check_same_dim(a: Vector, b: Vector) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"dim {a.shape[0]} vs {b.shape[0]}")


def elementwise_sqrt(v: Vector) -> Vector:
    """Entrywise square root; negative entries signal corrupted moment state."""
    if np.any(v < 0.0):
        i = int(np.argmax(v < 0.0))
        raise NegativeElement(f"element {i} is negative: {v[i]}")
    return np.sqrt(v)


def elementwise_max(a: Vector, b: Vector) -> Vector:
    check_same_dim(a, b)
    return np.maximum(a, b)


def norm_l2(v: Vector) -> float:
    return math.sqrt(math.fsum(np.square(v, dtype=np.float64)))


def norm_linf(v: Vector) -> float:
    return float(np.max(np.abs(v)))


def dot(a: Vector, b: Vector) -> float:
    check_same_dim(a, b)
    return math.fsum(a * b)


def fsum(values) -> float:
    """Exactly rounded sum (order independent)."""
    return math.fsum(values)
