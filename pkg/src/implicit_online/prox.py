"""Implicit (proximal) update: argmin_{x in V} B(x, x_t) + eta * loss(x).

Unconstrained closed forms for every loss variant, plus the ball-constrained
solution obtained by substituting x_t/(alpha+1) for x_t and eta/(alpha+1) for
eta in the same closed form and bisecting for the smallest multiplier
alpha >= 0 that puts the iterate on the ball.

``eta=math.inf`` is the zero-inverse-rate sentinel: the update returns the
loss minimizer nearest to x_t (the limit of the closed forms), constrained to
the feasible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Ball, MirrorSetup, _as_vector
from .losses import Absolute, Hinge, Linear, Loss, Quad1D, Square

# Absolute slack used when deciding that the unconstrained point is feasible.
FEASIBILITY_TOL = 1e-12

_ALPHA_MAX = 2.0**60
_MAX_BISECT = 400


@dataclass(frozen=True)
class ProxResult:
    """Implicit-update output.

    ``g_prime`` is the subgradient of the loss at ``x_next`` that satisfies
    the first-order optimality condition: for finite eta it is recovered
    exactly as (x_t - (1+alpha) x_next) / eta; for the infinite-eta sentinel
    it is the analytic subgradient at ``x_next``. ``alpha`` is the ball
    constraint multiplier (0 when the unconstrained point is feasible; +inf
    for the infinite-eta sentinel when the constraint is active, where the
    finite-eta multiplier has no limit). ``iterations`` counts bisection steps.
    """

    x_next: np.ndarray
    g_prime: np.ndarray
    alpha: float
    iterations: int


def _closed_form(loss: Loss, v: np.ndarray, eta: float) -> np.ndarray:
    """Unconstrained minimizer of B(x, v) + eta * loss(x)."""
    if isinstance(loss, Hinge):
        zz = float(loss.z @ loss.z)
        slack = max(1.0 - loss.y * float(loss.z @ v), 0.0)
        return v + min(eta, slack / zz) * loss.y * loss.z
    if isinstance(loss, Absolute):
        zz = float(loss.z @ loss.z)
        r = float(loss.z @ v) - loss.y
        if r == 0.0:
            return v.copy()
        return v - min(eta, abs(r) / zz) * math.copysign(1.0, r) * loss.z
    if isinstance(loss, Square):
        zz = float(loss.z @ loss.z)
        r = float(loss.z @ v) - loss.y
        return v - eta * r * loss.z / (1.0 + eta * zz)
    if isinstance(loss, Quad1D):
        return v - (eta / (2.0 + eta)) * (v - loss.y)
    if isinstance(loss, Linear):
        return v - eta * loss.s * loss.g
    raise TypeError(f"unsupported loss type: {type(loss).__name__}")


def _project_hyperplane_ball(x_t: np.ndarray, z: np.ndarray, target: float, radius: float) -> np.ndarray:
    """Nearest point to x_t with <z, x> = target and ||x|| <= radius.

    Requires |target| <= radius * ||z|| so the intersection is non-empty.
    """
    zz = float(z @ z)
    base = (target / zz) * z
    w = x_t - (float(z @ x_t) / zz) * z
    w_norm = float(np.linalg.norm(w))
    budget_sq = radius**2 - target**2 / zz
    budget = math.sqrt(max(budget_sq, 0.0))
    if w_norm <= budget or w_norm == 0.0:
        return base + w
    return base + w * (budget / w_norm)


def _limit_minimizer(loss: Loss, x_t: np.ndarray, setup: MirrorSetup) -> tuple[np.ndarray, float]:
    """Loss minimizer nearest x_t (eta -> inf limit); returns (point, alpha)."""
    ball = setup.domain if isinstance(setup.domain, Ball) else None
    if isinstance(loss, Quad1D):
        p = np.array([loss.y])
        if ball is not None and abs(loss.y) > ball.radius:
            return np.array([math.copysign(ball.radius, loss.y)]), math.inf
        return p, 0.0
    if isinstance(loss, Linear):
        if loss.s == 0.0 or float(np.linalg.norm(loss.g)) == 0.0:
            return x_t.copy(), 0.0
        if ball is None:
            raise ValueError("prox unbounded: linear loss with infinite eta on an unconstrained domain")
        return -ball.radius * loss.g / float(np.linalg.norm(loss.g)), math.inf
    if isinstance(loss, (Square, Absolute)):
        z, y = loss.z, loss.y
        znorm = float(np.linalg.norm(z))
        p = x_t - ((float(z @ x_t) - y) / znorm**2) * z
        if ball is None or float(np.linalg.norm(p)) <= ball.radius + FEASIBILITY_TOL:
            return p, 0.0
        if abs(y) <= ball.radius * znorm:
            return _project_hyperplane_ball(x_t, z, y, ball.radius), math.inf
        return math.copysign(1.0, y) * ball.radius * z / znorm, math.inf
    if isinstance(loss, Hinge):
        z, y = loss.z, loss.y
        znorm = float(np.linalg.norm(z))
        if y * float(z @ x_t) >= 1.0:
            return x_t.copy(), 0.0
        p = x_t + ((1.0 - y * float(z @ x_t)) / znorm**2) * y * z
        if ball is None or float(np.linalg.norm(p)) <= ball.radius + FEASIBILITY_TOL:
            return p, 0.0
        if ball.radius * znorm >= 1.0:
            return _project_hyperplane_ball(x_t, z, 1.0 / y, ball.radius), math.inf
        return ball.radius * y * z / znorm, math.inf
    raise TypeError(f"unsupported loss type: {type(loss).__name__}")


def solve_ball_alpha(
    closed_form: Callable[[np.ndarray, float], np.ndarray],
    x_t: np.ndarray,
    eta: float,
    radius: float,
) -> tuple[float, np.ndarray, int]:
    """Smallest alpha > 0 with ||closed_form(x_t/(1+a), eta/(1+a))|| = radius.

    Preconditions: the alpha = 0 point violates the ball constraint. The norm
    residual is checked to be non-increasing over the doubling bracket, then
    bisected well below the 1e-10 * radius contract so downstream optimality
    residuals stay clean.
    """

    def residual(alpha: float) -> float:
        x = closed_form(x_t / (1.0 + alpha), eta / (1.0 + alpha))
        return float(np.linalg.norm(x)) - radius

    lo, f_lo = 0.0, residual(0.0)
    if f_lo <= 0.0:
        raise ValueError("alpha search invoked but the alpha=0 point is feasible")
    hi = 1.0
    iters = 0
    while residual(hi) > 0.0:
        hi *= 2.0
        iters += 1
        if hi > _ALPHA_MAX:
            raise RuntimeError(
                f"ball multiplier bracket not found below {_ALPHA_MAX:g}; residual {residual(_ALPHA_MAX):.3e}"
            )
    lo = hi / 2.0 if hi > 1.0 else 0.0
    probes = [residual(lo + k * (hi - lo) / 8.0) for k in range(9)]
    if any(probes[k + 1] > probes[k] + 1e-9 * max(1.0, radius) for k in range(8)):
        raise RuntimeError("ball multiplier residual is not non-increasing over the bracket")

    tol = 1e-13 * max(radius, 1.0)
    while iters < _MAX_BISECT:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = residual(mid)
        iters += 1
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi) and abs(f_mid) <= tol:
            break
    else:
        raise RuntimeError(f"alpha bisection did not converge; residual {residual(hi):.3e}")

    alpha = hi  # feasible side of the bracket
    x_next = closed_form(x_t / (1.0 + alpha), eta / (1.0 + alpha))
    if abs(float(np.linalg.norm(x_next)) - radius) > 1e-10 * radius:
        raise RuntimeError(f"alpha search residual too large: {float(np.linalg.norm(x_next)) - radius:.3e}")
    return alpha, x_next, iters


def implicit_step(loss: Loss, x_t, eta: float, setup: MirrorSetup) -> ProxResult:
    """Exact minimizer of B(x, x_t) + eta * loss(x) over the feasible set V.

    ``eta`` must be positive; ``math.inf`` selects the nearest-loss-minimizer
    limit used by the zero-inverse-rate step of the adaptive learner.
    """
    x_t = loss._check_dim(_as_vector(x_t))
    if not (eta > 0.0):
        raise ValueError(f"eta must be positive (or math.inf), got {eta}")

    if math.isinf(eta):
        x_next, alpha = _limit_minimizer(loss, x_t, setup)
        if isinstance(setup.domain, Ball):
            nrm = float(np.linalg.norm(x_next))
            if nrm > setup.domain.radius:
                x_next = x_next * (setup.domain.radius / nrm)
        return ProxResult(x_next=x_next, g_prime=loss.subgradient(x_next), alpha=alpha, iterations=0)

    x0 = _closed_form(loss, x_t, eta)
    if isinstance(setup.domain, Ball):
        r = setup.domain.radius
        n0 = float(np.linalg.norm(x0))
        if n0 <= r + FEASIBILITY_TOL:
            if n0 > r:
                x0 = x0 * (r / n0)
            alpha, iters = 0.0, 0
        else:
            alpha, x0, iters = solve_ball_alpha(lambda v, e: _closed_form(loss, v, e), x_t, eta, r)
    else:
        alpha, iters = 0.0, 0

    g_prime = (x_t - (1.0 + alpha) * x0) / eta
    return ProxResult(x_next=x0, g_prime=g_prime, alpha=alpha, iterations=iters)
