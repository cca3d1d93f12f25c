"""Convex loss families with evaluation, subgradient selection, and variability terms.

Variants:
  * ``Hinge(z, y)``     -- max(1 - y <z, x>, 0), y in {-1, +1}
  * ``Absolute(z, y)``  -- |<z, x> - y|
  * ``Square(z, y)``    -- 1/2 (<z, x> - y)^2
  * ``Quad1D(y)``       -- 1/4 (x - y)^2, one-dimensional
  * ``Linear(g, s)``    -- s <g, x>, s >= 0

The square loss carries the 1/2 factor so that its standard proximal closed
form x - eta (<z,x> - y) z / (1 + eta ||z||^2) is exact. At non-differentiable
points the subgradient of minimum Euclidean norm is returned (0 at the hinge
margin and at the absolute-loss kink).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geometry import Ball, MirrorSetup, _as_vector


def _check_feature_vector(z: np.ndarray, name: str = "z") -> np.ndarray:
    z = _as_vector(z)
    if not np.all(np.isfinite(z)):
        raise ValueError(f"{name} must be finite")
    if float(np.linalg.norm(z)) == 0.0:
        raise ValueError(f"{name} must be nonzero")
    return z


class Loss:
    """Base class for the tagged convex loss variants."""

    dim: int

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_dim(self, x) -> np.ndarray:
        x = _as_vector(x)
        if x.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: loss has dim {self.dim}, point has dim {x.shape[0]}")
        return x


@dataclass(frozen=True, eq=False)
class Hinge(Loss):
    z: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "z", _check_feature_vector(self.z))
        if self.y not in (-1, 1):
            raise ValueError(f"hinge label must be -1 or +1, got {self.y}")
        object.__setattr__(self, "y", float(self.y))

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    def value(self, x) -> float:
        x = self._check_dim(x)
        return max(1.0 - self.y * float(self.z @ x), 0.0)

    def subgradient(self, x) -> np.ndarray:
        x = self._check_dim(x)
        margin = self.y * float(self.z @ x)
        if margin < 1.0:
            return -self.y * self.z
        return np.zeros(self.dim)


@dataclass(frozen=True, eq=False)
class Absolute(Loss):
    z: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "z", _check_feature_vector(self.z))
        object.__setattr__(self, "y", float(self.y))

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    def value(self, x) -> float:
        x = self._check_dim(x)
        return abs(float(self.z @ x) - self.y)

    def subgradient(self, x) -> np.ndarray:
        x = self._check_dim(x)
        r = float(self.z @ x) - self.y
        if r == 0.0:
            return np.zeros(self.dim)
        return math.copysign(1.0, r) * self.z


@dataclass(frozen=True, eq=False)
class Square(Loss):
    z: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "z", _check_feature_vector(self.z))
        object.__setattr__(self, "y", float(self.y))

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    def value(self, x) -> float:
        x = self._check_dim(x)
        r = float(self.z @ x) - self.y
        return 0.5 * r * r

    def subgradient(self, x) -> np.ndarray:
        x = self._check_dim(x)
        return (float(self.z @ x) - self.y) * self.z


@dataclass(frozen=True, eq=False)
class Quad1D(Loss):
    y: float

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise ValueError("target must be finite")
        object.__setattr__(self, "y", float(self.y))

    @property
    def dim(self) -> int:
        return 1

    def value(self, x) -> float:
        x = self._check_dim(x)
        r = float(x[0]) - self.y
        return 0.25 * r * r

    def subgradient(self, x) -> np.ndarray:
        x = self._check_dim(x)
        return np.array([0.5 * (float(x[0]) - self.y)])


@dataclass(frozen=True, eq=False)
class Linear(Loss):
    g: np.ndarray
    s: float = 1.0

    def __post_init__(self):
        g = _as_vector(self.g)
        if not np.all(np.isfinite(g)):
            raise ValueError("g must be finite")
        object.__setattr__(self, "g", g)
        if not (math.isfinite(self.s) and self.s >= 0):
            raise ValueError(f"scale must be >= 0, got {self.s}")
        object.__setattr__(self, "s", float(self.s))

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def value(self, x) -> float:
        x = self._check_dim(x)
        return self.s * float(self.g @ x)

    def subgradient(self, x) -> np.ndarray:
        self._check_dim(x)
        return self.s * self.g


def evaluate(loss: Loss, x) -> float:
    """Evaluate the loss at a point; errors on dimension mismatch."""
    return loss.value(x)


def subgradient(loss: Loss, x) -> np.ndarray:
    """One valid subgradient at x (minimum-norm element at kinks)."""
    return loss.subgradient(x)


def losses_equal(a: Loss, b: Loss) -> bool:
    """Structural equality of two loss instances."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Quad1D):
        return a.y == b.y
    if isinstance(a, Linear):
        return a.s == b.s and np.array_equal(a.g, b.g)
    return a.y == b.y and np.array_equal(a.z, b.z)


def _affine_difference(curr: Loss, prev: Loss) -> Optional[Tuple[np.ndarray, float]]:
    """Coefficients (a, b) with curr(x) - prev(x) = <a, x> + b, when affine."""
    if isinstance(curr, Quad1D) and isinstance(prev, Quad1D):
        slope = np.array([(prev.y - curr.y) / 2.0])
        intercept = (curr.y**2 - prev.y**2) / 4.0
        return slope, intercept
    if isinstance(curr, Linear) and isinstance(prev, Linear):
        return curr.s * curr.g - prev.s * prev.g, 0.0
    if isinstance(curr, Square) and isinstance(prev, Square) and np.array_equal(curr.z, prev.z):
        return (prev.y - curr.y) * curr.z, (curr.y**2 - prev.y**2) / 2.0
    return None


def pairwise_variability_term(curr: Loss, prev: Loss, setup: MirrorSetup) -> float:
    """max_{x in V} curr(x) - prev(x), one summand of the temporal variability.

    Affine differences are maximized in closed form at a ball extreme point;
    all other pairs on a bounded domain fall back to the grid maximizer in
    :mod:`implicit_online.oracle` (d <= 2).
    """
    if curr.dim != prev.dim:
        raise ValueError(f"dimension mismatch: {curr.dim} vs {prev.dim}")
    if losses_equal(curr, prev):
        return 0.0
    affine = _affine_difference(curr, prev)
    if affine is not None:
        slope, intercept = affine
        slope_norm = float(np.linalg.norm(slope))
        if isinstance(setup.domain, Ball):
            return setup.domain.radius * slope_norm + intercept
        if slope_norm == 0.0:
            return intercept
        raise ValueError("variability undefined: affine difference unbounded on unconstrained domain")
    if not isinstance(setup.domain, Ball):
        raise ValueError("variability undefined: need a bounded domain for this loss pair")
    from .oracle import pairwise_variability_grid

    return pairwise_variability_grid(curr, prev, setup)
