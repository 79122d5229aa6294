"""Progressive coordinate minimization: the outer loop and its parallel variant.

Iteration ``k = 1, 2, ...`` draws a coordinate uniformly at random, minimizes
the restriction of ``f`` along it to precision ``eps_k = eps0 gamma^k`` with a
self-terminating one-dimensional routine, and commits the routine's output.
The run stops after exactly ``T`` gradient samples; the last iteration may be
cut short and its partial result is still committed.

The parallel variant runs ``m`` routines on distinct coordinates from the same
anchor and moves to the average of the ``m`` resulting points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .objectives import CompositeObjective
from .rng import stream
from .routines.base import Routine, RoutineOutcome


def gamma_lower_bound(alpha: float, beta: float, d: int) -> float:
    """Smallest admissible precision ratio ``sqrt(1 - alpha / (d beta))``."""
    if not (alpha > 0 and beta >= alpha):
        raise ValueError(f"need 0 < alpha <= beta, got alpha={alpha}, beta={beta}")
    if d < 1:
        raise ValueError("d must be at least 1")
    return math.sqrt(max(0.0, 1.0 - alpha / (d * beta)))


@dataclass(frozen=True)
class PrecisionSchedule:
    eps0: float
    gamma: float

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")

    def epsilon(self, k: int) -> float:
        return self.eps0 * self.gamma**k


@dataclass(frozen=True)
class ScheduleViolation:
    """Why a schedule falls outside ``[sqrt(1 - alpha/(d beta)), 1)``."""

    gamma: float
    eps0: float
    lower_bound: float
    reason: str

    def __str__(self):
        return (
            f"invalid precision schedule (gamma={self.gamma}, eps0={self.eps0}): {self.reason}; "
            f"gamma must lie in [{self.lower_bound:.6g}, 1) = [sqrt(1 - alpha/(d*beta)), 1)"
        )


class ScheduleError(ValueError):
    def __init__(self, violation: ScheduleViolation):
        super().__init__(str(violation))
        self.violation = violation


def validate_schedule(gamma: float, eps0: float, objective: CompositeObjective) -> ScheduleViolation | None:
    """``None`` when the schedule is admissible for ``objective``."""
    bound = gamma_lower_bound(objective.alpha, objective.beta, objective.dim)
    reason = None
    if not (isinstance(eps0, (int, float)) and eps0 > 0):
        reason = "eps0 must be positive"
    elif not gamma < 1.0:
        reason = "gamma must be strictly below 1"
    elif not gamma >= bound:
        reason = f"gamma is below the lower bound {bound:.6g}"
    return None if reason is None else ScheduleViolation(float(gamma), float(eps0), bound, reason)


def check_schedule(schedule: PrecisionSchedule, objective: CompositeObjective) -> None:
    v = validate_schedule(schedule.gamma, schedule.eps0, objective)
    if v is not None:
        raise ScheduleError(v)


def draw_coordinates(rng: np.random.Generator, d: int, m: int = 1) -> np.ndarray:
    """``m`` distinct coordinates, uniform over all ``m``-subsets of ``range(d)``."""
    if not 1 <= m <= d:
        raise ValueError(f"need 1 <= m <= d, got m={m}, d={d}")
    if m == 1:
        return np.array([rng.integers(d)])
    return rng.choice(d, size=m, replace=False)


@dataclass
class PcmRun:
    """Trajectory of a coordinate-wise run.

    Per-sample arrays (length ``total_samples``): ``coordinates``,
    ``iterations`` (1-based; 0 for none), ``queries`` (scalar value of the
    active coordinate), ``f_values`` (exact ``f`` at the queried point) and
    optionally ``sampled_losses``. Per-iteration arrays (length ``K``):
    ``epsilons``, ``boundaries`` (sample count at the end of iteration ``k``),
    ``selected`` (coordinates, shape ``(K, m)``), ``samples``. ``iterate_values``
    holds ``f(x^(k))`` for ``k = 0..K`` and ``iterates`` the points themselves.
    """

    algorithm: str
    horizon: int
    seed: int
    dim: int
    coordinates: np.ndarray
    iterations: np.ndarray
    queries: np.ndarray
    f_values: np.ndarray
    epsilons: np.ndarray
    boundaries: np.ndarray
    selected: np.ndarray
    samples: np.ndarray
    iterate_values: np.ndarray
    final_point: np.ndarray
    iterates: np.ndarray | None = None
    sampled_losses: np.ndarray | None = None
    terminations: list[str] = field(default_factory=list)
    worker_values: np.ndarray | None = None
    workers: int = 1
    f_star: float | None = None

    @property
    def num_iterations(self) -> int:
        return int(self.boundaries.size)

    @property
    def num_switches(self) -> int:
        """Number of coordinate switches: ``K`` for PCM, ``T`` for SCD."""
        return self.num_iterations

    @property
    def total_samples(self) -> int:
        return int(self.f_values.size)

    def iterate_excess(self) -> np.ndarray:
        if self.f_star is None:
            raise ValueError("run carries no f_star")
        return self.iterate_values - self.f_star


def _initial_point(objective: CompositeObjective, x0) -> np.ndarray:
    if x0 is None:
        return objective.domain.center()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (objective.dim,):
        raise ValueError(f"x0 must have shape ({objective.dim},)")
    return objective.domain.project(x0)


class _Recorder:
    """Growable per-sample and per-iteration buffers."""

    def __init__(self, sampled: bool):
        self.coords, self.iters, self.queries, self.fvals = [], [], [], []
        self.losses = [] if sampled else None
        self.eps, self.bounds, self.selected, self.samples, self.terms = [], [], [], [], []
        self.ivals, self.iterates, self.wvals = [], [], []
        self.t = 0

    def add_samples(self, i, k, outcome: RoutineOutcome, restriction, loss_rng):
        n = outcome.samples_used
        if n == 0:
            return
        q = np.asarray(outcome.queries, dtype=float)
        f = outcome.losses if outcome.losses is not None else restriction.value(q)
        self.coords.append(np.full(n, i, dtype=np.int64))
        self.iters.append(np.full(n, k, dtype=np.int64))
        self.queries.append(q)
        self.fvals.append(np.asarray(f, dtype=float).reshape(n))
        if self.losses is not None:
            self.losses.append(restriction.sample_values(q, loss_rng))
        self.t += n

    def cat(self, parts, dtype=float):
        return np.concatenate(parts).astype(dtype) if parts else np.empty(0, dtype=dtype)


def _finish(rec: _Recorder, name, T, seed, objective, x, m, record_iterates) -> PcmRun:
    sel = np.array(rec.selected, dtype=np.int64).reshape(-1, m)
    return PcmRun(
        algorithm=name,
        horizon=T,
        seed=seed,
        dim=objective.dim,
        coordinates=rec.cat(rec.coords, np.int64),
        iterations=rec.cat(rec.iters, np.int64),
        queries=rec.cat(rec.queries),
        f_values=rec.cat(rec.fvals),
        epsilons=np.array(rec.eps, dtype=float),
        boundaries=np.array(rec.bounds, dtype=np.int64),
        selected=sel,
        samples=np.array(rec.samples, dtype=np.int64),
        iterate_values=np.array(rec.ivals, dtype=float),
        final_point=x,
        iterates=np.array(rec.iterates) if record_iterates else None,
        sampled_losses=None if rec.losses is None else rec.cat(rec.losses),
        terminations=rec.terms,
        worker_values=np.array(rec.wvals, dtype=float).reshape(-1, m) if m > 1 else None,
        workers=m,
        f_star=objective.f_star,
    )


def run_pcm(
    objective: CompositeObjective,
    routine: Routine,
    schedule: PrecisionSchedule,
    T: int,
    seed: int,
    mu0: float | None = None,
    x0=None,
    record_iterates: bool = True,
    record_sampled_loss: bool = False,
    name: str = "pcm",
) -> PcmRun:
    """Serial PCM for exactly ``T`` gradient samples.

    ``mu0`` is the routine's initial scale parameter at ``k = 1`` and shrinks by
    ``gamma`` each iteration; it defaults to ``eps0 / (1 - gamma)``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    check_schedule(schedule, objective)
    gamma = schedule.gamma
    mu = schedule.eps0 / (1.0 - gamma) if mu0 is None else float(mu0)
    if not mu > 0:
        raise ValueError("mu0 must be positive")
    coord_rng = stream(seed, "coords")
    noise_rng = stream(seed, "noise", 0)
    loss_rng = stream(seed, "loss") if record_sampled_loss else None

    cursor = objective.cursor(_initial_point(objective, x0))
    rec = _Recorder(record_sampled_loss)
    rec.ivals.append(cursor.value())
    if record_iterates:
        rec.iterates.append(cursor.point)
    d, k = objective.dim, 0
    while rec.t < T:
        k += 1
        eps = schedule.epsilon(k)
        i = int(draw_coordinates(coord_rng, d)[0])
        restriction = cursor.restrict(i)
        outcome = routine.run(restriction, cursor.coordinate(i), eps, mu, T - rec.t, noise_rng)
        rec.add_samples(i, k, outcome, restriction, loss_rng)
        cursor.set(i, outcome.final_point)
        rec.eps.append(eps)
        rec.bounds.append(rec.t)
        rec.selected.append(i)
        rec.samples.append(outcome.samples_used)
        rec.terms.append(outcome.terminated_by)
        rec.ivals.append(cursor.value())
        if record_iterates:
            rec.iterates.append(cursor.point)
        mu *= gamma
    return _finish(rec, name, T, seed, objective, cursor.point, 1, record_iterates)


def run_parallel_pcm(
    objective: CompositeObjective,
    routine: Routine,
    schedule: PrecisionSchedule,
    T: int,
    seed: int,
    m: int,
    mu0: float | None = None,
    x0=None,
    accounting: str = "work",
    threads: int = 1,
    record_iterates: bool = True,
    record_sampled_loss: bool = False,
    name: str = "pcm-parallel",
) -> PcmRun:
    """Parallel-averaging PCM with ``m`` workers.

    ``accounting="work"`` charges every worker's samples against ``T``; with
    ``"wallclock"`` each round costs the largest worker sample count and every
    worker may use up to ``T - t`` samples. Worker ``j`` draws noise from its
    own stream, so results do not depend on ``threads``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if accounting not in ("work", "wallclock"):
        raise ValueError("accounting must be 'work' or 'wallclock'")
    d = objective.dim
    if not 1 <= m <= d:
        raise ValueError(f"worker count m={m} must lie in [1, d={d}]")
    check_schedule(schedule, objective)
    gamma = schedule.gamma
    mu = schedule.eps0 / (1.0 - gamma) if mu0 is None else float(mu0)
    coord_rng = stream(seed, "coords")
    rngs = [stream(seed, "noise", j) for j in range(m)]
    loss_rng = stream(seed, "loss") if record_sampled_loss else None

    cursor = objective.cursor(_initial_point(objective, x0))
    rec = _Recorder(record_sampled_loss)
    rec.ivals.append(cursor.value())
    if record_iterates:
        rec.iterates.append(cursor.point)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    clock, k = 0, 0
    try:
        while (rec.t if accounting == "work" else clock) < T:
            k += 1
            eps = schedule.epsilon(k)
            coords = [int(c) for c in draw_coordinates(coord_rng, d, m)]
            anchor = cursor.point
            restrictions = [cursor.restrict(i) for i in coords]
            remaining = T - (rec.t if accounting == "work" else clock)
            states = [r.bit_generator.state for r in rngs]

            def work(j, budget):
                return routine.run(restrictions[j], float(anchor[coords[j]]), eps, mu, budget, rngs[j])

            if pool is None:
                outcomes = [work(j, remaining) for j in range(m)]
            else:
                outcomes = list(pool.map(work, range(m), [remaining] * m))
            if accounting == "work" and sum(o.samples_used for o in outcomes) > remaining:
                # final round: replay workers in order under the shared budget
                left = remaining
                for j in range(m):
                    rngs[j].bit_generator.state = states[j]
                    outcomes[j] = work(j, max(left, 0))
                    left -= outcomes[j].samples_used
            used = 0
            for j, (i, o) in enumerate(zip(coords, outcomes)):
                rec.add_samples(i, k, o, restrictions[j], loss_rng)
                used += o.samples_used
            clock += max(o.samples_used for o in outcomes)
            rec.wvals.append([float(r.value(o.final_point)) for r, o in zip(restrictions, outcomes)])
            for i, o in zip(coords, outcomes):
                cursor.set(i, o.final_point if m == 1 else anchor[i] + (o.final_point - anchor[i]) / m)
            rec.eps.append(eps)
            rec.bounds.append(rec.t)
            rec.selected.append(coords)
            rec.samples.append(used)
            rec.terms.extend(o.terminated_by for o in outcomes)
            rec.ivals.append(cursor.value())
            if record_iterates:
                rec.iterates.append(cursor.point)
            mu *= gamma
    finally:
        if pool is not None:
            pool.shutdown()
    run = _finish(rec, name, T, seed, objective, cursor.point, m, record_iterates)
    if m == 1:
        run.worker_values = None
    return run
