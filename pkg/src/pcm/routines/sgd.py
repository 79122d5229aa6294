"""Projected SGD along one coordinate with an open-loop stopping time.

Default (theory) mode uses ``eta_t = mu / (1 + nu t)`` with
``mu = mu0 alpha / (2 g_max^2)``, ``nu = mu0 alpha^2 / (4 g_max^2)`` and stops
after ``ceil(2 beta g_max^2 / (alpha^2 eps))`` steps. The practical mode used
for the classification experiment swaps in a constant step ``mu0`` and a
stopping time ``ceil(scale / eps)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..objectives import Restriction
from .base import BUDGET, PRECISION, RoutineOutcome, untouched


def _ceil(v: float) -> int:
    # absorb float noise when the exact value is an integer
    r = round(v)
    if abs(v - r) <= 1e-12 * max(1.0, abs(v)):
        return int(r)
    return math.ceil(v)


def sgd_termination(eps: float, alpha: float, beta: float, g_max: float) -> int:
    """Stopping time ``ceil(2 beta g_max^2 / (alpha^2 eps))``."""
    for name, v in (("eps", eps), ("alpha", alpha), ("beta", beta), ("g_max", g_max)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return _ceil(2.0 * beta * g_max**2 / (alpha**2 * eps))


def update_mu0(mu0: float, gamma: float) -> float:
    return gamma * mu0


@dataclass(frozen=True)
class SgdConfig:
    mu0: float
    alpha: float
    beta: float
    g_max: float
    constant_step: bool = False
    termination_scale: float | None = None

    def __post_init__(self):
        if not (self.mu0 > 0 and self.alpha > 0 and self.beta > 0 and self.g_max > 0):
            raise ValueError("mu0, alpha, beta and g_max must all be positive")
        if self.termination_scale is not None and not self.termination_scale > 0:
            raise ValueError("termination_scale must be positive")

    @property
    def mu(self) -> float:
        return self.mu0 * self.alpha / (2.0 * self.g_max**2)

    @property
    def nu(self) -> float:
        return self.mu0 * self.alpha**2 / (4.0 * self.g_max**2)

    def step(self, t: int) -> float:
        if self.constant_step:
            return self.mu0
        return self.mu / (1.0 + self.nu * t)

    def termination(self, eps: float) -> int:
        if self.termination_scale is not None:
            if not eps > 0:
                raise ValueError("eps must be positive")
            return _ceil(self.termination_scale / eps)
        return sgd_termination(eps, self.alpha, self.beta, self.g_max)


def run_sgd(
    restriction: Restriction,
    start: float,
    eps: float,
    config: SgdConfig,
    budget: int,
    rng: np.random.Generator,
    record_losses: bool = True,
) -> RoutineOutcome:
    """Run ``min(tau(eps), budget)`` projected SGD steps from ``start``."""
    if budget <= 0:
        return untouched(start)
    tau = config.termination(eps)
    n = min(tau, int(budget))
    lo, hi = restriction.lo, restriction.hi
    x = min(max(float(start), lo), hi)
    tokens = restriction.draw(rng, n).tolist()
    sample = restriction.scalar_sampler()
    queries = np.empty(n)
    if config.constant_step:
        eta = config.mu0
        for t in range(n):
            queries[t] = x
            x -= eta * sample(x, tokens[t])
            x = lo if x < lo else (hi if x > hi else x)
    else:
        mu, nu = config.mu, config.nu
        for t in range(n):
            queries[t] = x
            x -= mu / (1.0 + nu * t) * sample(x, tokens[t])
            x = lo if x < lo else (hi if x > hi else x)
    losses = restriction.value(queries) if record_losses else None
    return RoutineOutcome(x, n, queries, losses, BUDGET if n < tau else PRECISION)


class SgdRoutine:
    """SGD routine for the PCM loop; ``mu0`` arrives per iteration."""

    def __init__(self, constant_step: bool = False, termination_scale: float | None = None, record_losses: bool = True):
        self.constant_step = constant_step
        self.termination_scale = termination_scale
        self.record_losses = record_losses

    def config(self, restriction: Restriction, mu0: float) -> SgdConfig:
        return SgdConfig(
            mu0, restriction.alpha, restriction.beta, restriction.g_max, self.constant_step, self.termination_scale
        )

    def run(self, restriction, start, eps, mu0, budget, rng):
        return run_sgd(restriction, start, eps, self.config(restriction, mu0), budget, rng, self.record_losses)

    def __repr__(self):
        return f"SgdRoutine(constant_step={self.constant_step}, termination_scale={self.termination_scale})"
