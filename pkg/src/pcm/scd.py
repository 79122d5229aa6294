"""Online projected stochastic coordinate descent (the baseline).

Every step draws a coordinate uniformly, takes one noisy partial-gradient
step of size ``eta_t`` along it and projects back onto the box, so the
algorithm switches coordinates at every one of its ``T`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import PcmRun, _initial_point, draw_coordinates
from .objectives import CompositeObjective
from .rng import stream


@dataclass(frozen=True)
class ScdConfig:
    """Step-size schedule, ``t = 1, 2, ...``.

    ``kind="piecewise"``: ``eta_t = c1 / ceil(t / c2)``;
    ``kind="harmonic"``: ``eta_t = a / (b + t)``.
    """

    kind: str = "piecewise"
    c1: float = 5.0
    c2: float = 10_000.0
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "piecewise":
            if not (self.c1 > 0 and self.c2 > 0):
                raise ValueError("c1 and c2 must be positive")
        elif self.kind == "harmonic":
            if not (self.a > 0 and self.b > -1):
                raise ValueError("need a > 0 and b > -1 so that eta_t > 0 for t >= 1")
        else:
            raise ValueError(f"unknown step-size kind {self.kind!r}")

    @classmethod
    def harmonic(cls, a: float, b: float) -> "ScdConfig":
        return cls(kind="harmonic", a=a, b=b)

    def step(self, t: int) -> float:
        if t < 1:
            raise ValueError("steps are numbered from t = 1")
        if self.kind == "piecewise":
            return self.c1 / math.ceil(t / self.c2)
        return self.a / (self.b + t)


def run_scd(
    objective: CompositeObjective,
    config: ScdConfig,
    T: int,
    seed: int,
    x0=None,
    record_iterates: bool = False,
    record_sampled_loss: bool = False,
) -> PcmRun:
    """``T`` steps of projected SCD; the record has one iteration per step."""
    if T < 1:
        raise ValueError("T must be at least 1")
    coord_rng = stream(seed, "coords")
    noise_rng = stream(seed, "noise", 0)
    loss_rng = stream(seed, "loss") if record_sampled_loss else None
    d = objective.dim
    lo, hi = objective.domain.lo, objective.domain.hi
    cursor = objective.cursor(_initial_point(objective, x0))

    coords = np.empty(T, dtype=np.int64)
    queries = np.empty(T)
    values = np.empty(T + 1)
    losses = np.empty(T) if record_sampled_loss else None
    iterates = [cursor.point] if record_iterates else None
    values[0] = cursor.value()
    for t in range(1, T + 1):
        i = int(draw_coordinates(coord_rng, d)[0])
        xi = cursor.coordinate(i)
        coords[t - 1] = i
        queries[t - 1] = xi
        if losses is not None:
            losses[t - 1] = cursor.restrict(i).sample_values(xi, loss_rng)[0]
        g = cursor.sample_grad(i, noise_rng)
        new = xi - config.step(t) * g
        cursor.set(i, min(max(new, lo[i]), hi[i]))
        values[t] = cursor.value()
        if iterates is not None:
            iterates.append(cursor.point)
    return PcmRun(
        algorithm="scd",
        horizon=T,
        seed=seed,
        dim=d,
        coordinates=coords,
        iterations=np.arange(1, T + 1, dtype=np.int64),
        queries=queries,
        f_values=values[:-1].copy(),
        epsilons=np.full(T, np.nan),
        boundaries=np.arange(1, T + 1, dtype=np.int64),
        selected=coords.reshape(-1, 1).copy(),
        samples=np.ones(T, dtype=np.int64),
        iterate_values=values,
        final_point=cursor.point,
        iterates=None if iterates is None else np.array(iterates),
        sampled_losses=losses,
        terminations=[],
        f_star=objective.f_star,
    )
