"""Online learner state machines under a single predict/observe protocol.

Algorithms:
  * ``ogd``            -- projected subgradient steps with rate beta / sqrt(t)
  * ``adaogd``         -- rate beta / sqrt(sum of squared gradient norms)
  * ``implicit_decay`` -- implicit update with rate beta / sqrt(t)
  * ``implicit_const`` -- implicit update with a fixed rate
  * ``adaimplicit``    -- implicit update with inverse rate lambda_t that
                          accumulates delta_t / beta^2, starting from 0
  * ``doubling``       -- implicit update with per-epoch rate beta/(L sqrt(2^i)),
                          restarting to the initial point and halving the rate
                          whenever the accumulated delta budget is exhausted

delta_t = loss(x_t) - loss(x_{t+1}) - B(x_{t+1}, x_t) / eta_t is non-negative
for every implicit update and drives both adaptive schemes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import geometry
from .geometry import MirrorSetup, _as_vector
from .losses import Loss, subgradient
from .prox import implicit_step

ALGORITHMS = ("ogd", "adaogd", "implicit_decay", "implicit_const", "adaimplicit", "doubling")


@dataclass(frozen=True)
class LearnerConfig:
    """Algorithm selection plus hyperparameters.

    ``beta=None`` requests the theoretical default sqrt(max Bregman divergence)
    for ``adaimplicit`` (requires a bounded domain); every other algorithm
    needs an explicit beta. ``eta_const`` applies to ``implicit_const`` only
    and ``lipschitz_L`` to ``doubling`` only.
    """

    algorithm: str
    setup: MirrorSetup
    x_init: np.ndarray
    beta: Optional[float] = None
    eta_const: Optional[float] = None
    lipschitz_L: Optional[float] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        x0 = _as_vector(self.x_init)
        if not geometry.contains(self.setup, x0):
            raise ValueError("x_init lies outside the feasible set")
        object.__setattr__(self, "x_init", x0)
        if self.beta is None:
            if self.algorithm == "adaimplicit":
                if not self.setup.is_bounded:
                    raise ValueError("theoretical beta default needs a bounded domain")
            else:
                raise ValueError(f"beta is required for algorithm {self.algorithm!r}")
        elif not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.algorithm == "implicit_const" and not (self.eta_const and self.eta_const > 0):
            raise ValueError("implicit_const requires eta_const > 0")
        if self.algorithm == "doubling":
            if not (self.lipschitz_L and math.isfinite(self.lipschitz_L) and self.lipschitz_L > 0):
                raise ValueError("doubling requires a finite lipschitz_L > 0")

    def resolved_beta(self) -> float:
        if self.beta is not None:
            return self.beta
        return math.sqrt(self.setup.bregman_diameter_sq)


@dataclass(frozen=True)
class StepRecord:
    """Per-round telemetry.

    ``rate`` is the eta actually used (math.inf is the zero-inverse-rate
    sentinel of the adaptive scheme and of the skipped zero-gradient step of
    adaogd). ``delta_t`` is recorded for every algorithm but is guaranteed
    non-negative only for the implicit ones.
    """

    t: int
    x_t: np.ndarray
    loss_value: float
    rate: float
    delta_t: float
    g_norm: float
    g_prime_norm: float
    epoch: int = 0
    restarted: bool = False


@dataclass
class Trace:
    """Full run history: T records plus the final iterate x_{T+1}."""

    records: List[StepRecord]
    x_final: np.ndarray
    config: LearnerConfig

    def __len__(self) -> int:
        return len(self.records)


class Learner:
    """Single-owner sequential state machine for one online run."""

    def __init__(self, config: LearnerConfig):
        self.config = config
        self.x = config.x_init.copy()
        self.t = 1
        self.lam = 0.0
        self.grad_sq_sum = 0.0
        self.epoch = 0
        self.S = 0.0
        self.beta = config.resolved_beta()
        if config.algorithm == "doubling":
            self.eta_epoch = self.beta / config.lipschitz_L
        else:
            self.eta_epoch = math.nan
        self.restarts = 0

    def predict(self) -> np.ndarray:
        """Current iterate x_t (no mutation)."""
        return self.x.copy()

    def observe(self, loss: Loss) -> StepRecord:
        """Consume one loss, advance the state, and return the step telemetry."""
        algo = self.config.algorithm
        setup = self.config.setup
        x_t = self.x
        loss_value = loss.value(x_t)
        g = subgradient(loss, x_t)
        g_norm = float(np.linalg.norm(g))
        epoch = self.epoch
        restarted = False

        if algo in ("ogd", "adaogd"):
            if algo == "ogd":
                rate = self.beta / math.sqrt(self.t)
                x_next = geometry.project(setup, x_t - rate * g)
            else:
                self.grad_sq_sum += g_norm**2
                if self.grad_sq_sum > 0.0:
                    rate = self.beta / math.sqrt(self.grad_sq_sum)
                    x_next = geometry.project(setup, x_t - rate * g)
                else:
                    rate = math.inf
                    x_next = x_t.copy()
            g_prime_norm = float(np.linalg.norm(subgradient(loss, x_next)))
            delta = loss_value - loss.value(x_next) - geometry.bregman(setup, x_next, x_t) / rate
        elif algo == "implicit_decay" or algo == "implicit_const":
            rate = self.beta / math.sqrt(self.t) if algo == "implicit_decay" else self.config.eta_const
            res = implicit_step(loss, x_t, rate, setup)
            x_next = res.x_next
            g_prime_norm = float(np.linalg.norm(res.g_prime))
            delta = loss_value - loss.value(x_next) - geometry.bregman(setup, x_next, x_t) / rate
        elif algo == "adaimplicit":
            # lam can only dip below 0 by float cancellation; treat as the 0 sentinel
            rate = math.inf if self.lam <= 0.0 else 1.0 / self.lam
            res = implicit_step(loss, x_t, rate, setup)
            x_next = res.x_next
            g_prime_norm = float(np.linalg.norm(res.g_prime))
            delta = loss_value - loss.value(x_next) - self.lam * geometry.bregman(setup, x_next, x_t)
            self.lam += delta / self.beta**2
        elif algo == "doubling":
            L = self.config.lipschitz_L
            rate = self.eta_epoch
            res = implicit_step(loss, x_t, rate, setup)
            x_prox = res.x_next
            g_prime_norm = float(np.linalg.norm(res.g_prime))
            delta = loss_value - loss.value(x_prox) - geometry.bregman(setup, x_prox, x_t) / rate
            self.S += delta
            if self.S >= rate * L**2 * 2.0**self.epoch:
                self.epoch += 1
                self.eta_epoch = self.beta / (L * math.sqrt(2.0**self.epoch))
                self.S = 0.0
                self.restarts += 1
                restarted = True
                x_next = self.config.x_init.copy()
            else:
                x_next = x_prox
        else:  # pragma: no cover - guarded by LearnerConfig
            raise ValueError(f"unknown algorithm {algo!r}")

        record = StepRecord(
            t=self.t,
            x_t=x_t.copy(),
            loss_value=loss_value,
            rate=rate,
            delta_t=delta,
            g_norm=g_norm,
            g_prime_norm=g_prime_norm,
            epoch=epoch,
            restarted=restarted,
        )
        self.x = x_next
        self.t += 1
        return record


def run(config: LearnerConfig, losses: Sequence[Loss]) -> Trace:
    """Deterministic full-horizon run; identical inputs give identical traces."""
    if len(losses) == 0:
        raise ValueError("empty sequence")
    dim = losses[0].dim
    if any(l.dim != dim for l in losses):
        raise ValueError("dimension mismatch in loss sequence")
    if config.x_init.shape[0] != dim:
        raise ValueError(f"x_init has dim {config.x_init.shape[0]}, losses have dim {dim}")
    learner = Learner(config)
    records = [learner.observe(loss) for loss in losses]
    return Trace(records=records, x_final=learner.predict(), config=config)
