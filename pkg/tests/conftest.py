"""Shared instance generators for the prox / learner test suites."""

import numpy as np
import pytest

from implicit_online import Absolute, Hinge, Linear, MirrorSetup, Quad1D, Square
from implicit_online.geometry import sample_point

FAMILIES = ("hinge", "absolute", "square", "quad1d", "linear")


def random_loss(rng: np.random.Generator, family: str, dim: int):
    if family == "quad1d":
        return Quad1D(y=float(rng.normal() * 5.0))
    if family == "linear":
        g = rng.normal(size=dim)
        g /= np.linalg.norm(g)
        return Linear(g=g, s=float(rng.uniform(0.0, 3.0)))
    z = rng.normal(size=dim)
    while np.linalg.norm(z) < 1e-3:
        z = rng.normal(size=dim)
    if family == "hinge":
        return Hinge(z=z, y=int(rng.choice([-1, 1])))
    if family == "absolute":
        return Absolute(z=z, y=float(rng.normal() * 2.0))
    return Square(z=z, y=float(rng.normal() * 2.0))


def random_instance(rng: np.random.Generator, family: str, bounded: bool):
    """One prox test instance: (loss, x_t in V, eta in [1e-3, 1e3], setup)."""
    dim = 1 if family == "quad1d" else int(rng.integers(1, 4))
    if bounded:
        setup = MirrorSetup.ball(float(rng.uniform(0.5, 2.0)))
    else:
        setup = MirrorSetup.unconstrained()
    loss = random_loss(rng, family, dim)
    x_t = sample_point(setup, rng, dim, scale=2.0)
    eta = float(10.0 ** rng.uniform(-3.0, 3.0))
    return loss, x_t, eta, setup


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
