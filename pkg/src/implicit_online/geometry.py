"""Euclidean mirror-map geometry: Bregman divergence, feasible domains, projections.

Only the squared-L2 mirror map psi(x) = 1/2 ||x||_2^2 is implemented, for which
the Bregman divergence is B(u, x) = 1/2 ||u - x||_2^2 and psi is exactly
1-strongly convex, so B(u, x) >= 1/2 ||u - x||^2 holds with equality. The
domain is either all of R^d or an origin-centered L2 ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Unconstrained:
    """Feasible set V = R^d."""


@dataclass(frozen=True)
class Ball:
    """Origin-centered L2 ball V = {x : ||x||_2 <= radius}."""

    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")


Domain = Union[Unconstrained, Ball]


@dataclass(frozen=True)
class MirrorSetup:
    """Mirror map tag plus feasible domain.

    ``bregman_diameter_sq`` is max_{u,x in V} B(u, x): 2 r^2 for a ball of
    radius r (attained at antipodal boundary points), +inf when unconstrained.
    """

    domain: Domain = field(default_factory=Unconstrained)
    psi: str = "euclidean"

    def __post_init__(self):
        if self.psi != "euclidean":
            raise ValueError(f"unsupported mirror map: {self.psi!r}")

    @staticmethod
    def ball(radius: float) -> "MirrorSetup":
        return MirrorSetup(domain=Ball(radius))

    @staticmethod
    def unconstrained() -> "MirrorSetup":
        return MirrorSetup(domain=Unconstrained())

    @property
    def is_bounded(self) -> bool:
        return isinstance(self.domain, Ball)

    @property
    def radius(self) -> float:
        """Ball radius; +inf for the unconstrained domain."""
        if isinstance(self.domain, Ball):
            return self.domain.radius
        return math.inf

    @property
    def bregman_diameter_sq(self) -> float:
        if isinstance(self.domain, Ball):
            return 2.0 * self.domain.radius**2
        return math.inf


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got array with shape {v.shape}")
    return v


def bregman(setup: MirrorSetup, u, x) -> float:
    """B(u, x) = 1/2 ||u - x||_2^2 for the Euclidean mirror map."""
    u = _as_vector(u)
    x = _as_vector(x)
    if u.shape != x.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {x.shape}")
    d = u - x
    return 0.5 * float(d @ d)


def project(setup: MirrorSetup, x) -> np.ndarray:
    """Euclidean projection onto the feasible set."""
    x = _as_vector(x)
    if isinstance(setup.domain, Ball):
        nrm = float(np.linalg.norm(x))
        r = setup.domain.radius
        if nrm > r:
            return x * (r / nrm)
    return x


def contains(setup: MirrorSetup, x, tol: float = 1e-12) -> bool:
    """Feasibility test with an absolute tolerance on the ball constraint."""
    x = _as_vector(x)
    if isinstance(setup.domain, Ball):
        return float(np.linalg.norm(x)) <= setup.domain.radius + tol
    return True


def bregman_diameter_sq(setup: MirrorSetup) -> float:
    """max_{u,x in V} B(u, x); +inf for the unconstrained domain."""
    return setup.bregman_diameter_sq


def sample_point(setup: MirrorSetup, rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Random feasible point: uniform in the ball, or Gaussian with the given scale."""
    g = rng.standard_normal(dim)
    if isinstance(setup.domain, Ball):
        r = setup.domain.radius
        nrm = float(np.linalg.norm(g))
        if nrm == 0.0:
            return np.zeros(dim)
        u = rng.uniform() ** (1.0 / dim)
        return g * (r * u / nrm)
    return g * scale
