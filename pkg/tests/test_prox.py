import math

import numpy as np
import pytest

from implicit_online import (
    Hinge,
    Linear,
    MirrorSetup,
    Quad1D,
    Square,
    bregman,
    implicit_step,
    solve_ball_alpha,
    subgradient,
)
from implicit_online.geometry import contains, sample_point
from implicit_online.oracle import prox_oracle
from implicit_online.prox import _closed_form

from conftest import FAMILIES, random_instance


def test_hinge_examples():
    setup = MirrorSetup.unconstrained()
    res = implicit_step(Hinge(z=np.array([1.0, 0.0]), y=1), np.zeros(2), 10.0, setup)
    np.testing.assert_allclose(res.x_next, [1.0, 0.0], atol=1e-12)
    assert res.alpha == 0.0
    # zero loss: prox is the identity
    res = implicit_step(Hinge(z=np.array([1.0, 0.0]), y=1), np.array([2.0, 0.0]), 3.7, setup)
    np.testing.assert_allclose(res.x_next, [2.0, 0.0])


def test_square_ball_example():
    res = implicit_step(Square(z=np.array([1.0]), y=10.0), np.zeros(1), 1.0, MirrorSetup.ball(1.0))
    np.testing.assert_allclose(res.x_next, [1.0], atol=1e-10)
    assert res.alpha == pytest.approx(8.0, abs=1e-8)


def test_quad_example():
    res = implicit_step(Quad1D(y=100.0), np.zeros(1), 1.0, MirrorSetup.unconstrained())
    np.testing.assert_allclose(res.x_next, [100.0 / 3.0], rtol=1e-14)


def test_linear_ball_example():
    loss = Linear(g=np.array([1.0, 0.0]), s=1.0)
    res = implicit_step(loss, np.zeros(2), 3.0, MirrorSetup.ball(1.0))
    np.testing.assert_allclose(res.x_next, [-1.0, 0.0], atol=1e-10)
    assert res.alpha == pytest.approx(2.0, abs=1e-8)


def test_solve_ball_alpha_direct():
    loss = Square(z=np.array([1.0]), y=10.0)
    alpha, x_next, iters = solve_ball_alpha(lambda v, e: _closed_form(loss, v, e), np.zeros(1), 1.0, 1.0)
    assert alpha == pytest.approx(8.0, abs=1e-8)
    np.testing.assert_allclose(x_next, [1.0], atol=1e-10)
    assert iters > 0
    with pytest.raises(ValueError, match="feasible"):
        # Quad1D with y=100 from 0 at eta=1 lands at 100/3 < 75: not a valid call
        loss2 = Quad1D(y=100.0)
        solve_ball_alpha(lambda v, e: _closed_form(loss2, v, e), np.zeros(1), 1.0, 75.0)


def test_eta_validation():
    with pytest.raises(ValueError, match="eta"):
        implicit_step(Quad1D(y=1.0), np.zeros(1), 0.0, MirrorSetup.unconstrained())
    with pytest.raises(ValueError, match="eta"):
        implicit_step(Quad1D(y=1.0), np.zeros(1), -2.0, MirrorSetup.unconstrained())


def test_infinite_eta_limits():
    unconstrained = MirrorSetup.unconstrained()
    ball = MirrorSetup.ball(75.0)
    # nearest loss minimizer, then ball-constrained
    res = implicit_step(Quad1D(y=100.0), np.zeros(1), math.inf, unconstrained)
    np.testing.assert_allclose(res.x_next, [100.0])
    assert res.alpha == 0.0
    res = implicit_step(Quad1D(y=100.0), np.zeros(1), math.inf, ball)
    np.testing.assert_allclose(res.x_next, [75.0])
    assert res.alpha == math.inf
    # hyperplane projection for the square loss
    res = implicit_step(Square(z=np.array([2.0, 0.0]), y=1.0), np.array([0.0, 0.3]), math.inf, unconstrained)
    np.testing.assert_allclose(res.x_next, [0.5, 0.3])
    assert res.alpha == 0.0
    # linear loss: unbounded without a ball
    with pytest.raises(ValueError, match="prox unbounded"):
        implicit_step(Linear(g=np.array([1.0, 0.0]), s=1.0), np.zeros(2), math.inf, unconstrained)
    res = implicit_step(Linear(g=np.array([1.0, 0.0]), s=1.0), np.zeros(2), math.inf, MirrorSetup.ball(2.0))
    np.testing.assert_allclose(res.x_next, [-2.0, 0.0])
    # zero-scale linear loss: minimum displacement keeps x_t
    res = implicit_step(Linear(g=np.array([1.0, 0.0]), s=0.0), np.array([0.1, 0.2]), math.inf, ball)
    np.testing.assert_allclose(res.x_next, [0.1, 0.2])


def test_infinite_eta_hyperplane_ball_intersection(rng):
    # zero-loss set clips the ball: result has zero loss, lies on the ball, and
    # is the closest such point along the feasible slice
    ball = MirrorSetup.ball(1.0)
    loss = Square(z=np.array([1.0, 0.0]), y=0.8)
    x_t = np.array([-0.2, 0.9])
    res = implicit_step(loss, x_t, math.inf, ball)
    assert loss.value(res.x_next) <= 1e-18
    assert np.linalg.norm(res.x_next) <= 1.0 + 1e-12
    # brute force over the zero-loss slice
    ys = np.linspace(-0.6, 0.6, 200001)
    pts = np.column_stack([np.full_like(ys, 0.8), ys])
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
    dists = np.linalg.norm(pts - x_t, axis=1)
    np.testing.assert_allclose(res.x_next, pts[np.argmin(dists)], atol=1e-4)


def test_prox_matches_oracle_random(rng):
    for family in FAMILIES:
        for k in range(120):
            loss, x_t, eta, setup = random_instance(rng, family, bounded=k % 2 == 0)
            res = implicit_step(loss, x_t, eta, setup)
            ref = prox_oracle(loss, x_t, eta, setup)
            gap = float(np.max(np.abs(res.x_next - ref)))
            assert gap <= 1e-6, f"{family}: prox/oracle gap {gap:.2e}"


def test_prox_properties_random(rng):
    # Per-instance properties of the implicit update: loss decrease, delta sign,
    # optimality residual, monotone operator, gradient shrinkage, per-step bound.
    for family in FAMILIES:
        for k in range(120):
            loss, x_t, eta, setup = random_instance(rng, family, bounded=k % 2 == 0)
            res = implicit_step(loss, x_t, eta, setup)
            assert contains(setup, res.x_next, tol=1e-12)
            assert res.alpha >= 0.0
            g = subgradient(loss, x_t)
            assert loss.value(res.x_next) <= loss.value(x_t) + 1e-9
            delta = loss.value(x_t) - loss.value(res.x_next) - bregman(setup, res.x_next, x_t) / eta
            assert delta >= -1e-9
            us = np.array([sample_point(setup, rng, loss.dim, scale=2.0) for _ in range(100)])
            resid = (us - res.x_next) @ (eta * res.g_prime + res.x_next - x_t)
            assert float(resid.min()) >= -1e-8
            assert float((res.g_prime - g) @ (res.x_next - x_t)) >= -1e-9
            assert np.linalg.norm(res.g_prime) <= np.linalg.norm(g) + 1e-9
            gn, gpn = float(np.linalg.norm(g)), float(np.linalg.norm(res.g_prime))
            assert delta <= eta * gn * min(2.0 * gpn, gn / 2.0) + 1e-9


def test_g_prime_is_valid_subgradient(rng):
    for family in FAMILIES:
        for k in range(60):
            loss, x_t, eta, setup = random_instance(rng, family, bounded=k % 3 == 0)
            res = implicit_step(loss, x_t, eta, setup)
            fx = loss.value(res.x_next)
            for _ in range(20):
                v = rng.normal(size=loss.dim) * 3.0
                assert loss.value(v) >= fx + float(res.g_prime @ (v - res.x_next)) - 1e-7


def test_alpha_zero_iff_unconstrained_point_feasible(rng):
    for family in FAMILIES:
        for _ in range(80):
            loss, x_t, eta, setup = random_instance(rng, family, bounded=True)
            res = implicit_step(loss, x_t, eta, setup)
            free = _closed_form(loss, x_t, eta)
            feasible = np.linalg.norm(free) <= setup.domain.radius + 1e-12
            assert (res.alpha == 0.0) == feasible
