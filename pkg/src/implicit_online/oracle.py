"""Brute-force test oracles, independent of the production closed forms.

``prox_oracle`` minimizes B(x, x_t) + eta * loss(x) numerically: every loss
variant here is 1-D or linear-prediction, so the minimizer lies in
span{x_t, z} and the search reduces to a golden-section scan along the
prediction direction, with the orthogonal coordinate eliminated exactly on
ball domains. The reduction fact itself is asserted by a residual check.

None of this module is imported on the production prox path; the losses
module pulls in only the grid variability maximizer as a documented fallback.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import Ball, MirrorSetup, _as_vector, project
from .losses import Absolute, Hinge, Linear, Loss, Quad1D, Square

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _objective(loss: Loss, x_t: np.ndarray, eta: float):
    def obj(x: np.ndarray) -> float:
        d = x - x_t
        return 0.5 * float(d @ d) + eta * loss.value(x)

    return obj


def _golden(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section argmin of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _expand_bracket(f, scale: float) -> tuple[float, float]:
    """Symmetric bracket [-w, w] grown until both ends exceed the center value."""
    w = max(scale, 1.0)
    f0 = f(0.0)
    for _ in range(200):
        if f(-w) > f0 and f(w) > f0:
            return -w, w
        w *= 2.0
    raise RuntimeError("oracle bracket expansion failed: objective appears unbounded")


def _prediction_loss(loss: Loss):
    """Scalar loss on the prediction p = <z, x>, and the direction z."""
    if isinstance(loss, Hinge):
        return loss.z, lambda p: max(1.0 - loss.y * p, 0.0)
    if isinstance(loss, Absolute):
        return loss.z, lambda p: abs(p - loss.y)
    if isinstance(loss, Square):
        return loss.z, lambda p: 0.5 * (p - loss.y) ** 2
    if isinstance(loss, Linear):
        return loss.g, lambda p: loss.s * p
    raise TypeError("oracle unsupported: not a linear-prediction loss")


def _assert_reduction(loss: Loss, x_t: np.ndarray, x_star: np.ndarray, eta: float, setup: MirrorSetup, z: np.ndarray):
    """Spot-check that leaving span{x_t, z} does not improve the objective."""
    d = x_t.shape[0]
    if d < 3:
        return
    obj = _objective(loss, x_t, eta)
    basis = [z / np.linalg.norm(z)]
    if np.linalg.norm(x_t) > 0:
        w = x_t - (x_t @ basis[0]) * basis[0]
        if np.linalg.norm(w) > 1e-12 * np.linalg.norm(x_t):
            basis.append(w / np.linalg.norm(w))
    probe = np.zeros(d)
    for i in range(d):
        probe[:] = 0.0
        probe[i] = 1.0
        for b in basis:
            probe -= (probe @ b) * b
        if np.linalg.norm(probe) > 1e-8:
            break
    else:
        return
    w = probe / np.linalg.norm(probe)
    eps = 1e-5 * max(1.0, float(np.linalg.norm(x_star)))
    f0 = obj(x_star)
    for s in (eps, -eps):
        if obj(project(setup, x_star + s * w)) < f0 - 1e-9 * max(1.0, abs(f0)):
            raise RuntimeError("oracle reduction check failed: minimizer moved off span{x_t, z}")


def prox_oracle(loss: Loss, x_t, eta: float, setup: MirrorSetup, tol: float = 1e-10) -> np.ndarray:
    """Numeric minimizer of B(x, x_t) + eta * loss(x) over V, to ``tol`` in argument."""
    x_t = loss._check_dim(_as_vector(x_t))
    if not (eta > 0.0) or math.isinf(eta):
        raise ValueError("prox_oracle requires finite positive eta")
    ball = setup.domain if isinstance(setup.domain, Ball) else None

    if isinstance(loss, Quad1D):
        xt = float(x_t[0])
        phi = lambda v: 0.5 * (v - xt) ** 2 + 0.25 * eta * (v - loss.y) ** 2
        if ball is not None:
            v = _golden(phi, -ball.radius, ball.radius, tol)
        else:
            scale = max(abs(xt), abs(loss.y), 1.0)
            lo, hi = _expand_bracket(lambda a: phi(xt + a), scale)
            v = xt + _golden(lambda a: phi(xt + a), lo, hi, tol)
            # one exact Newton step: phi is a strict quadratic
            v = v - (v - xt + 0.5 * eta * (v - loss.y)) / (1.0 + 0.5 * eta)
        return np.array([v])

    z, f_pred = _prediction_loss(loss)
    znorm = float(np.linalg.norm(z))

    if ball is None:
        p0 = float(z @ x_t)
        phi = lambda a: 0.5 * a * a + eta * f_pred(p0 + a * znorm)
        scale = max(abs(p0 - getattr(loss, "y", 0.0)) / znorm, eta * getattr(loss, "s", 1.0) * znorm, 1.0)
        lo, hi = _expand_bracket(phi, scale)
        a = _golden(phi, lo, hi, tol)
        if isinstance(loss, Square):
            a = a - (a + eta * znorm * (p0 + a * znorm - loss.y)) / (1.0 + eta * znorm**2)
        elif isinstance(loss, Linear):
            a = -eta * loss.s * znorm
        x_star = x_t + (a / znorm) * z
        _assert_reduction(loss, x_t, x_star, eta, setup, z)
        return x_star

    # Ball domain: coordinates (c1, c2) in an orthonormal basis of span{z, x_t};
    # for fixed c1 the best feasible c2 is b0 clipped to +-sqrt(r^2 - c1^2).
    r = ball.radius
    u1 = z / znorm
    w = x_t - float(x_t @ u1) * u1
    wn = float(np.linalg.norm(w))
    u2 = w / wn if wn > 1e-14 * max(1.0, float(np.linalg.norm(x_t))) else None
    a0 = float(x_t @ u1)
    b0 = wn if u2 is not None else 0.0

    def phi_ball(c1: float) -> float:
        slack = math.sqrt(max(r * r - c1 * c1, 0.0))
        c2 = min(max(b0, -slack), slack)
        return 0.5 * ((c1 - a0) ** 2 + (c2 - b0) ** 2) + eta * f_pred(c1 * znorm)

    c1 = _golden(phi_ball, -r, r, tol)
    slack = math.sqrt(max(r * r - c1 * c1, 0.0))
    c2 = min(max(b0, -slack), slack)
    x_star = c1 * u1 + (c2 * u2 if u2 is not None else 0.0)
    _assert_reduction(loss, x_t, x_star, eta, setup, z)
    return x_star


def _values_on_points(loss: Loss, pts: np.ndarray) -> np.ndarray:
    """Vectorized loss values on an (n, d) array of points."""
    if isinstance(loss, Quad1D):
        return 0.25 * (pts[:, 0] - loss.y) ** 2
    if isinstance(loss, Hinge):
        return np.maximum(1.0 - loss.y * (pts @ loss.z), 0.0)
    if isinstance(loss, Absolute):
        return np.abs(pts @ loss.z - loss.y)
    if isinstance(loss, Square):
        return 0.5 * (pts @ loss.z - loss.y) ** 2
    if isinstance(loss, Linear):
        return loss.s * (pts @ loss.g)
    raise TypeError(f"unsupported loss type: {type(loss).__name__}")


def _domain_grid(setup: MirrorSetup, dim: int, points_per_dim: int) -> np.ndarray:
    if not isinstance(setup.domain, Ball):
        raise ValueError("grid oracle requires a bounded domain")
    if dim > 2:
        raise ValueError(f"grid oracle supports d <= 2, got d = {dim}")
    r = setup.domain.radius
    axis = np.linspace(-r, r, points_per_dim)
    if dim == 1:
        return axis[:, None]
    xx, yy = np.meshgrid(axis, axis)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return pts[np.linalg.norm(pts, axis=1) <= r]


def pairwise_variability_grid(curr: Loss, prev: Loss, setup: MirrorSetup, points_per_dim: int | None = None) -> float:
    """Grid maximum of curr - prev over the ball (lower-bounds the true max)."""
    if points_per_dim is None:
        points_per_dim = 10_001 if curr.dim == 1 else 641
    pts = _domain_grid(setup, curr.dim, points_per_dim)
    return float(np.max(_values_on_points(curr, pts) - _values_on_points(prev, pts)))


def vt_grid_oracle(losses: Sequence[Loss], setup: MirrorSetup, points_per_dim: int = 10_001) -> float:
    """Grid evaluation of the temporal variability sum (d <= 2, bounded domain).

    With P points per dimension and an L-Lipschitz pairwise difference the
    per-term error is at most L * diameter / (P - 1).
    """
    if not losses:
        return 0.0
    dim = losses[0].dim
    if any(l.dim != dim for l in losses):
        raise ValueError("dimension mismatch in loss sequence")
    pts = _domain_grid(setup, dim, points_per_dim)
    total = 0.0
    prev_vals = _values_on_points(losses[0], pts)
    for loss in losses[1:]:
        vals = _values_on_points(loss, pts)
        total += float(np.max(vals - prev_vals))
        prev_vals = vals
    return total


class RecurrenceCheck(NamedTuple):
    holds: bool
    delta_final: float
    bound: float


def adahedge_recurrence_check(a: Sequence[float], b: float, c: float) -> RecurrenceCheck:
    """Drive the worst case of the adaptive-rate recurrence and test its bound.

    Builds Delta_1 = 0, Delta_{t+1} = Delta_t + min(b a_t, c a_t^2 / (2 Delta_t))
    (the second arm is skipped while Delta_t = 0, i.e. min(x, y/0) = x) and
    checks Delta_{T+1} <= sqrt((b^2 + c) * sum a_t^2).
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("sequence terms must be non-negative")
    if not (b > 0 and c > 0):
        raise ValueError("b and c must be positive")
    delta = 0.0
    for at in a:
        at = float(at)
        if delta == 0.0:
            delta += b * at
        else:
            delta += min(b * at, c * at * at / (2.0 * delta))
    bound = math.sqrt((b * b + c) * float(a @ a))
    return RecurrenceCheck(holds=bool(delta <= bound + 1e-12 * max(1.0, bound)), delta_final=delta, bound=bound)


def finite_diff_subgradient_check(loss: Loss, x, h: float = 1e-6) -> float:
    """Max coordinate error between a central-difference gradient and the subgradient."""
    x = loss._check_dim(_as_vector(x))
    g = loss.subgradient(x)
    err = 0.0
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        fd = (loss.value(x + e) - loss.value(x - e)) / (2.0 * h)
        err = max(err, abs(fd - float(g[i])))
    return err
