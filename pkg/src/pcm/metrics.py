"""Regret series, growth-rate diagnostics and CSV export."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .controller import PcmRun

STEP_COLUMNS = ("t", "k", "coordinate", "epsilon_k", "f_exact", "excess", "cum_regret")
SUMMARY_COLUMNS = ("T", "seed", "final_regret", "K", "switches")

# tolerated negative excess from float cancellation
_NEG_TOL = 1e-9


def fmt(v) -> str:
    """Round-trip float formatting used by every CSV writer."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass
class RegretSeries:
    """Cumulative regret ``R(t)`` for ``t = 1..T`` of one run."""

    values: np.ndarray
    seed: int | None = None
    config_hash: str | None = None

    @property
    def horizon(self) -> int:
        return int(self.values.size)

    @property
    def horizons(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    def at(self, T) -> np.ndarray | float:
        """``R(T)`` for one or several horizons ``T <= horizon``."""
        T_arr = np.asarray(T, dtype=np.int64)
        if np.any(T_arr < 1) or np.any(T_arr > self.horizon):
            raise ValueError(f"horizons must lie in [1, {self.horizon}]")
        out = self.values[T_arr - 1]
        return float(out) if out.ndim == 0 else out

    @property
    def final(self) -> float:
        return float(self.values[-1]) if self.values.size else 0.0


def _f_star(run: PcmRun, f_star):
    if f_star is not None:
        return float(f_star)
    if run.f_star is None:
        raise ValueError(
            "the objective has no known minimum; compute one with the `oracle` command "
            "and attach it (e.g. HingeObjective.with_minimizer)"
        )
    return float(run.f_star)


def excess_losses(run: PcmRun, f_star: float | None = None) -> np.ndarray:
    """Per-sample ``f(x_t) - f(x*)``, with round-off negatives clipped to 0."""
    ex = run.f_values - _f_star(run, f_star)
    if ex.size and ex.min() < -_NEG_TOL:
        raise ValueError(f"query point beats the supplied minimum by {-ex.min():.3g}; f_star is wrong")
    return np.maximum(ex, 0.0)


def pseudo_regret(run: PcmRun, f_star: float | None = None, cfg_hash: str | None = None) -> RegretSeries:
    """``R(t) = sum_{s <= t} (f(x_s) - f(x*))`` from exact losses."""
    return RegretSeries(np.cumsum(excess_losses(run, f_star)), run.seed, cfg_hash)


def sampled_regret(run: PcmRun, f_star: float | None = None, cfg_hash: str | None = None) -> RegretSeries:
    """``sum_{s <= t} (F(x_s; xi_s) - f(x*))`` from the recorded noisy losses."""
    if run.sampled_losses is None:
        raise ValueError("run was recorded without sampled losses")
    return RegretSeries(np.cumsum(run.sampled_losses - _f_star(run, f_star)), run.seed, cfg_hash)


def mean_and_se(values) -> tuple[np.ndarray, np.ndarray]:
    """Mean over axis 0 and its standard error."""
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    se = v.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(v.shape[1:])
    return v.mean(axis=0), se


@dataclass(frozen=True)
class LogFit:
    """Growth diagnostics of ``R`` over a geometric horizon grid.

    ``differences[j] = R(T_{j+1}) - R(T_j)``; ``ratios`` are consecutive
    quotients of those differences (near 1 for ``log T`` growth, near the grid
    ratio for linear growth). ``slope``/``intercept`` fit ``R = a + b log T``
    and ``exponent`` fits ``log R = c + q log T``.
    """

    horizons: np.ndarray
    regrets: np.ndarray
    differences: np.ndarray
    ratios: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    exponent: float

    def rows(self) -> list[tuple[str, str]]:
        out = [("slope_log", fmt(self.slope)), ("intercept_log", fmt(self.intercept))]
        out += [("r2_log", fmt(self.r_squared)), ("power_exponent", fmt(self.exponent))]
        out += [(f"diff_{j}", fmt(v)) for j, v in enumerate(self.differences)]
        out += [(f"ratio_{j}", fmt(v)) for j, v in enumerate(self.ratios)]
        return out


def fit_log_regret(horizons, regrets) -> LogFit:
    T = np.asarray(horizons, dtype=float)
    R = np.asarray(regrets, dtype=float)
    if T.ndim != 1 or T.shape != R.shape:
        raise ValueError("horizons and regrets must be 1-D arrays of equal length")
    if T.size < 3:
        raise ValueError("need at least 3 horizons")
    if np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise ValueError("horizons must be positive and increasing")
    q = T[1:] / T[:-1]
    if not np.allclose(q, q[0], rtol=1e-9):
        raise ValueError("horizons must form a geometric grid")
    diffs = np.diff(R)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = diffs[1:] / diffs[:-1]
    lt = np.log(T)
    slope, intercept = np.polyfit(lt, R, 1)
    resid = R - (intercept + slope * lt)
    tot = np.sum((R - R.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / tot if tot > 0 else 1.0
    exponent = float(np.polyfit(lt, np.log(R), 1)[0]) if np.all(R > 0) else float("nan")
    return LogFit(T, R, diffs, ratios, float(slope), float(intercept), float(r2), exponent)


def envelope_f0(initial_excess: float, eps0: float, gamma: float) -> float:
    """``F0 = max(f(x0) - f*, eps0 / (1 - gamma))``."""
    return max(float(initial_excess), eps0 / (1.0 - gamma))


@dataclass(frozen=True)
class DecayCheck:
    passed: bool
    margin: float  # min_k (1 - e_k / (F0 gamma^k)); negative when some e_k exceeds the envelope
    worst_k: int


def geometric_decay_check(excesses, gamma: float, F0: float, tolerance: float = 0.25) -> DecayCheck:
    """Check ``e_k <= F0 gamma^k (1 + tolerance)`` for ``k = 0, 1, ...``.

    ``excesses[k]`` is the (seed-averaged) excess of the ``k``-th iterate,
    with ``k = 0`` the starting point.
    """
    e = np.asarray(excesses, dtype=float)
    env = F0 * gamma ** np.arange(e.size)
    rel = 1.0 - e / env
    worst = int(np.argmin(rel)) if e.size else 0
    passed = bool(np.all(e <= env * (1.0 + tolerance)))
    return DecayCheck(passed, float(rel[worst]) if e.size else 0.0, worst)


def count_switches(run: PcmRun) -> int:
    return run.num_switches


def _writer(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = path.open("w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def export_csv(run: PcmRun, path, f_star: float | None = None) -> Path:
    """Per-sample trajectory CSV with the ``STEP_COLUMNS`` header."""
    ex = excess_losses(run, f_star)
    cum = np.cumsum(ex)
    k = run.iterations
    eps = np.concatenate([[np.nan], run.epsilons])[k] if run.algorithm != "scd" else np.full(k.size, np.nan)
    fh, w = _writer(path)
    with fh:
        w.writerow(STEP_COLUMNS)
        for t in range(run.total_samples):
            w.writerow(
                (t + 1, int(k[t]), int(run.coordinates[t]), fmt(eps[t]), fmt(run.f_values[t]), fmt(ex[t]), fmt(cum[t]))
            )
    return Path(path)


def export_summary(rows, path) -> Path:
    """Sweep summary: one ``(T, seed, final_regret, K, switches)`` row each,
    written in ``(T, seed)`` order."""
    fh, w = _writer(path)
    with fh:
        w.writerow(SUMMARY_COLUMNS)
        for T, seed, regret, K, switches in sorted(rows, key=lambda r: (r[0], r[1])):
            w.writerow((int(T), int(seed), fmt(regret), int(K), int(switches)))
    return Path(path)


def iterations_at(run: PcmRun, T) -> np.ndarray | int:
    """Number of iterations started within the first ``T`` samples."""
    T_arr = np.asarray(T, dtype=np.int64)
    out = run.iterations[T_arr - 1]
    return int(out) if out.ndim == 0 else out
