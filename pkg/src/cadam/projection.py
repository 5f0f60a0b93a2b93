"""Weighted projection onto box feasible sets.

For a diagonal weight matrix the objective ``||diag(w)^(1/2) (x - y)||``
separates across coordinates, so the argmin over a box is coordinatewise
clamping regardless of the (nonnegative) weights.  Zero-weight coordinates
make the argmin non-unique; we clamp those too, which keeps the map
continuous in the weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid, DimMismatch, NegativeWeight
from .vecmath import Vector, as_vector


@dataclass(frozen=True)
class FeasibleBox:
    """Per-coordinate bounds; ``lower is None`` marks the unbounded set."""

    lower: Vector | None
    upper: Vector | None

    def __post_init__(self):
        if (self.lower is None) != (self.upper is None):
            raise ConfigInvalid("box: lower and upper must both be set or both be None")
        if self.lower is not None:
            lo, up = as_vector(self.lower), as_vector(self.upper)
            object.__setattr__(self, "lower", lo)
            object.__setattr__(self, "upper", up)
            if lo.shape != up.shape:
                raise DimMismatch("box: lower and upper dims differ")
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
                raise ConfigInvalid("box: bounds must be finite (use unbounded() instead)")
            if np.any(lo > up):
                raise ConfigInvalid("box: lower > upper on some coordinate")

    @classmethod
    def unbounded(cls) -> "FeasibleBox":
        return cls(lower=None, upper=None)

    @classmethod
    def symmetric(cls, dim: int, radius: float = 1.0) -> "FeasibleBox":
        return cls(lower=-radius * np.ones(dim), upper=radius * np.ones(dim))

    @property
    def is_bounded(self) -> bool:
        return self.lower is not None

    @property
    def diameter_inf(self) -> float:
        """Sup-norm diameter; infinity for the unbounded set."""
        if not self.is_bounded:
            return math.inf
        return float(np.max(self.upper - self.lower))

    def contains(self, x: Vector) -> bool:
        if not self.is_bounded:
            return True
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def project(y, weights, box: FeasibleBox) -> Vector:
    """argmin over the box of ``sum_i w_i (x_i - y_i)^2``, i.e. clamping."""
    y = as_vector(y)
    w = as_vector(weights)
    if y.shape != w.shape:
        raise DimMismatch(f"point dim {y.shape[0]} vs weights dim {w.shape[0]}")
    if np.any(w < 0.0):
        raise NegativeWeight("projection weights must be >= 0")
    if not box.is_bounded:
        return y.copy()
    if box.lower.shape != y.shape:
        raise DimMismatch(f"point dim {y.shape[0]} vs box dim {box.lower.shape[0]}")
    return np.clip(y, box.lower, box.upper)
