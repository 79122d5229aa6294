"""Random walk on a binary interval tree, steered by sequential sign tests.

The coordinate interval ``[lo, hi]`` is mapped affinely onto ``[0, 1]``; node
``(depth, index)`` covers ``[index 2^-depth, (index + 1) 2^-depth]``. At each
node the gradient sign is tested at the left end, the right end and the
midpoint (in that order). The walk moves to the child holding the sign change,
or back to the parent when the outcomes are inconsistent. The routine stops as
soon as one test draws more than ``N0(eps)`` samples, returning that probe.

Boundary minimizers: a node on the leftmost path whose three signs are all
positive (all negative on the rightmost path) moves toward the domain edge
instead of to its parent. Once such a node is at least ``ceil(log2(beta L /
rho))`` deep the edge itself is returned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..objectives import Restriction
from .base import BUDGET, PRECISION, RoutineOutcome, untouched

P_BREVE_MAX = 1.0 - 2.0 ** (-1.0 / 3.0)


@dataclass(frozen=True)
class RwtConfig:
    sigma0: float
    p_breve: float = 0.1
    max_depth: int = 48

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if not 0.0 < self.p_breve < P_BREVE_MAX:
            raise ValueError(f"p_breve must lie in (0, {P_BREVE_MAX:.4f}), got {self.p_breve}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def walk_bias(p_breve: float) -> float:
    """Probability that a node's three tests all come out right."""
    return (1.0 - p_breve) ** 3


def confidence_radius(s, sigma0: float, p_breve: float):
    """``sqrt(5 sigma0^2 / s * log(6 log s / sqrt(p_breve)))``; needs ``s >= 2``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 2):
        raise ValueError("the confidence radius is defined for s >= 2")
    out = np.sqrt(5.0 * sigma0**2 / s_arr * np.log(6.0 * np.log(s_arr) / math.sqrt(p_breve)))
    return float(out) if out.ndim == 0 else out


def rwt_n0(eps: float, alpha: float, sigma0: float, p_breve: float) -> float:
    """Sample cap ``N0(eps)`` beyond which a sequential test ends the iteration."""
    for name, v in (("eps", eps), ("alpha", alpha), ("sigma0", sigma0)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    if not 0.0 < p_breve < P_BREVE_MAX:
        raise ValueError(f"p_breve must lie in (0, {P_BREVE_MAX:.4f})")
    lead = 40.0 * sigma0**2 / (alpha * eps)
    arg = 80.0 * sigma0**2 / (alpha * p_breve * eps)
    if not arg > 1.0:
        raise ValueError(f"N0 is undefined: 80 sigma0^2 / (alpha p_breve eps) = {arg:.3g} <= 1 (eps too loose for the noise)")
    return lead * math.log(2.0 / p_breve * math.log(arg))


def sample_cap(eps: float, alpha: float, sigma0: float, p_breve: float) -> float:
    """``N0(eps)`` floored at 2 samples.

    When ``eps`` is loose relative to the noise the formula is undefined or
    below 2; a test that cannot decide within two samples then already has
    ``|g| <~ 2 sigma0``, well inside the precision target.
    """
    try:
        n0 = rwt_n0(eps, alpha, sigma0, p_breve)
    except ValueError:
        if not (eps > 0 and alpha > 0 and sigma0 > 0):
            raise
        n0 = 0.0
    return max(n0, 2.0)


def init_threshold(beta: float, alpha: float, eps: float, mu0: float) -> float:
    rho = math.sqrt(alpha * eps / 2.0)
    return math.sqrt(max(math.log2(beta / rho), 0.0) * 2.0 * mu0 / alpha)


def rwt_init_depth(beta: float, alpha: float, eps: float, mu0: float, interval_length: float) -> int:
    """Shallowest depth whose node length falls below the start-up threshold."""
    for name, v in (("beta", beta), ("alpha", alpha), ("eps", eps), ("mu0", mu0), ("interval_length", interval_length)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    rel = init_threshold(beta, alpha, eps, mu0) / interval_length
    if rel >= 1.0 or rel == 0.0:
        return 0
    depth = 0
    while 2.0**-depth >= rel:
        depth += 1
    return depth


def boundary_depth(beta: float, alpha: float, eps: float, interval_length: float) -> int:
    rho = math.sqrt(alpha * eps / 2.0)
    return max(0, math.ceil(math.log2(beta * interval_length / rho)))


class Move(enum.Enum):
    LEFT_CHILD = "left"
    RIGHT_CHILD = "right"
    PARENT = "parent"


def walk_transition(signs, at_left_edge: bool = False, at_right_edge: bool = False) -> Move:
    """Next move from the (left, mid, right) gradient signs of a node."""
    left, mid, right = (int(v) for v in signs)
    if any(v not in (-1, 1) for v in (left, mid, right)):
        raise ValueError(f"signs must be +1/-1, got {signs}")
    if left == mid == right:
        if left == 1 and at_left_edge:
            return Move.LEFT_CHILD
        if left == -1 and at_right_edge:
            return Move.RIGHT_CHILD
        return Move.PARENT
    if (left, mid, right) == (-1, -1, 1):
        return Move.RIGHT_CHILD
    if (left, mid, right) == (-1, 1, 1):
        return Move.LEFT_CHILD
    # a +1 followed by a -1 contradicts a nondecreasing gradient
    return Move.PARENT


class Verdict(enum.Enum):
    PLUS = 1
    MINUS = -1
    CAP_EXCEEDED = "cap"
    OUT_OF_BUDGET = "budget"


@dataclass(frozen=True)
class SignTest:
    verdict: Verdict
    samples: int

    @property
    def sign(self) -> int | None:
        return self.verdict.value if self.verdict in (Verdict.PLUS, Verdict.MINUS) else None


_CHUNK0, _CHUNK_MAX = 32, 8192


def sequential_test(
    restriction: Restriction,
    probe: float,
    cap: float,
    config: RwtConfig,
    rng: np.random.Generator,
    budget: int | None = None,
) -> SignTest:
    """Test the sign of the restricted gradient at ``probe``.

    Samples are drawn one at a time (in vectorised chunks); after the ``s``-th
    draw the test gives up with ``CAP_EXCEEDED`` if ``s > cap``, and otherwise
    (for ``s >= 2``) outputs the sign of the running mean once it leaves the
    band ``+-confidence_radius(s)``.
    """
    if not cap > 0:
        raise ValueError("cap must be positive")
    cap_at = math.floor(cap) + 1
    limit = cap_at if budget is None else min(cap_at, int(budget))
    if limit <= 0:
        return SignTest(Verdict.OUT_OF_BUDGET, 0)
    done, total, chunk = 0, 0.0, _CHUNK0
    log_p = 0.5 * math.log(config.p_breve)
    var5 = 5.0 * config.sigma0**2
    while done < limit:
        n = min(chunk, limit - done)
        g = restriction.grad_tokens(probe, restriction.draw(rng, n))
        sums = total + np.cumsum(g)
        s = np.arange(done + 1, done + n + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            rad = np.sqrt(var5 / s * np.log(6.0 * np.log(s)) - var5 / s * log_p)
        rad[s < 2] = np.inf
        fired = np.abs(sums / s) > rad
        fired[s >= cap_at] = False
        hits = np.flatnonzero(fired)
        if hits.size:
            j = hits[0]
            return SignTest(Verdict.PLUS if sums[j] > 0 else Verdict.MINUS, int(s[j]))
        total = float(sums[-1])
        done += n
        chunk = min(2 * chunk, _CHUNK_MAX)
    if done >= cap_at:
        return SignTest(Verdict.CAP_EXCEEDED, done)
    return SignTest(Verdict.OUT_OF_BUDGET, done)


def run_rwt(
    restriction: Restriction,
    start: float,
    eps: float,
    config: RwtConfig,
    budget: int,
    rng: np.random.Generator,
    mu0: float = 1.0,
    record_losses: bool = True,
) -> RoutineOutcome:
    """One RWT coordinate minimization to precision ``eps``."""
    if restriction.sigma is None:
        raise ValueError("RWT needs sub-Gaussian gradient noise with a known scale")
    if restriction.sigma > config.sigma0 * (1 + 1e-12):
        raise ValueError(f"sigma0={config.sigma0} is below the coordinate noise scale {restriction.sigma}")
    if budget <= 0:
        return untouched(start)
    lo, L = restriction.lo, restriction.length
    alpha, beta = restriction.alpha, restriction.beta
    cap = sample_cap(eps, alpha, config.sigma0, config.p_breve)
    edge_depth = boundary_depth(beta, alpha, eps, L)
    depth = min(rwt_init_depth(beta, alpha, eps, mu0, L), config.max_depth)
    u0 = (min(max(float(start), lo), restriction.hi) - lo) / L
    index = min(int(u0 * 2**depth), 2**depth - 1)

    probes: list[float] = []
    counts: list[int] = []
    path = [(depth, index)]
    used = 0

    def finish(point, how):
        q = np.repeat(np.asarray(probes, dtype=float), counts)
        losses = None
        if record_losses:
            losses = np.repeat(np.asarray(restriction.value(np.asarray(probes, dtype=float))), counts) if probes else np.empty(0)
        return RoutineOutcome(float(point), used, q, losses, how, path)

    while True:
        width = 2.0**-depth
        left = index * width
        at_left, at_right = index == 0, index == 2**depth - 1
        signs = {}
        for name, u in (("left", left), ("right", left + width), ("mid", left + 0.5 * width)):
            x = restriction.hi if u >= 1.0 else lo + u * L
            test = sequential_test(restriction, x, cap, config, rng, budget - used)
            if test.samples:
                probes.append(x)
                counts.append(test.samples)
                used += test.samples
            if test.verdict is Verdict.CAP_EXCEEDED:
                return finish(x, PRECISION)
            if test.verdict is Verdict.OUT_OF_BUDGET:
                return finish(x, BUDGET)
            signs[name] = test.sign
        triple = (signs["left"], signs["mid"], signs["right"])
        move = walk_transition(triple, at_left, at_right)
        on_edge = triple[0] == triple[1] == triple[2] and move is not Move.PARENT
        if on_edge and depth >= edge_depth:
            return finish(restriction.hi if move is Move.RIGHT_CHILD else lo, PRECISION)
        if move is Move.PARENT:
            if depth == 0:
                continue  # the root has no parent: retest it
            depth, index = depth - 1, index // 2
        else:
            if depth >= config.max_depth:
                return finish(lo + (left + 0.5 * width) * L, PRECISION)
            depth, index = depth + 1, 2 * index + (1 if move is Move.RIGHT_CHILD else 0)
        path.append((depth, index))


class RwtRoutine:
    """RWT routine for the PCM loop."""

    def __init__(self, sigma0: float, p_breve: float = 0.1, max_depth: int = 48, record_losses: bool = True):
        self.config = RwtConfig(sigma0, p_breve, max_depth)
        self.record_losses = record_losses

    def run(self, restriction, start, eps, mu0, budget, rng):
        return run_rwt(restriction, start, eps, self.config, budget, rng, mu0, self.record_losses)

    def __repr__(self):
        return f"RwtRoutine(sigma0={self.config.sigma0}, p_breve={self.config.p_breve})"
