"""Stochastic composite objectives ``f = psi + phi`` over box domains.

Two families are provided:

* :class:`QuadraticObjective` -- ``psi(x) = 1/2 (x-c)^T A (x-c)`` with an
  optional weighted L1 term ``phi(x) = sum_i l1_i |x_i|`` and additive
  gradient noise (sub-Gaussian or heavy-tailed).
* :class:`HingeObjective` -- the regularized hinge loss over a finite dataset,
  where the randomness is the uniformly drawn record.

Objectives are immutable. Iterative algorithms that move one coordinate at a
time use a :class:`Cursor`, which carries the current point plus cached
statistics (``A(x-c)`` or the margins ``Y x``) so that restricting to a
coordinate and committing a new coordinate value stay cheap.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D point, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


def soft_threshold(v, thresh):
    """Proximal map of ``thresh * |.|``; elementwise."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


# ---------------------------------------------------------------------------
# Domain


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``prod_i [lo_i, hi_i]``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float)).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo >= hi):
            raise ValueError("every interval needs lo < hi")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float) -> "BoxDomain":
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    def project(self, x) -> np.ndarray:
        x = _as_point(x)
        if x.size != self.dim:
            raise ValueError(f"point has dimension {x.size}, domain has {self.dim}")
        return np.clip(x, self.lo, self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lo, self.hi)

    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)


def project(domain: BoxDomain, x) -> np.ndarray:
    """Clamp ``x`` into ``domain``; identity on points already inside."""
    return domain.project(x)


# ---------------------------------------------------------------------------
# Noise models


@dataclass(frozen=True)
class SubGaussian:
    """Zero-mean Gaussian gradient noise with per-coordinate scale ``sigma``."""

    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float)).copy()
        if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
            raise ValueError("sigma must be finite and non-negative")
        sigma.flags.writeable = False
        object.__setattr__(self, "sigma", sigma)

    def sigma_of(self, i: int) -> float:
        return float(self.sigma[i] if self.sigma.size > 1 else self.sigma[0])

    def sample(self, i: int, rng: np.random.Generator, size=None):
        s = self.sigma_of(i)
        if s == 0.0:
            return 0.0 if size is None else np.zeros(size)
        return s * rng.standard_normal(size)

    def spread(self) -> float:
        return float(self.sigma.max())


@dataclass(frozen=True)
class HeavyTailed:
    """Symmetrized Pareto noise with a finite ``b``-th moment, ``b`` in (1, 2).

    Magnitudes are ``scale * P`` with ``P`` Pareto(``tail_index``) supported on
    ``[1, inf)``; the sign is a fair coin, so the mean is exactly zero. The
    default tail index sits three quarters of the way from ``b`` to 2, which
    keeps ``E|X|^b`` finite while the variance is infinite.
    """

    b: float
    scale: float = 1.0
    tail_index: float | None = None

    def __post_init__(self):
        if not 1.0 < self.b < 2.0:
            raise ValueError(f"b must lie in (1, 2), got {self.b}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        a = self.tail_index if self.tail_index is not None else self.b + 0.75 * (2.0 - self.b)
        if not self.b < a <= 2.0:
            raise ValueError(f"tail index must lie in (b, 2], got {a}")
        object.__setattr__(self, "tail_index", float(a))

    def sigma_of(self, i: int):
        return None

    def sample(self, i: int, rng: np.random.Generator, size=None):
        mag = self.scale * (1.0 + rng.pareto(self.tail_index, size))
        sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        out = sign * mag
        return float(out) if size is None else out

    def moment_b(self) -> float:
        """Exact ``E|X|^b`` of the generator."""
        a = self.tail_index
        return self.scale**self.b * a / (a - self.b)

    def spread(self) -> float:
        return self.moment_b() ** (1.0 / self.b)


NOISELESS = SubGaussian(np.zeros(1))


# ---------------------------------------------------------------------------
# Dataset


@dataclass(frozen=True)
class Dataset:
    """Labelled feature vectors with labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        Y = np.asarray(self.features, dtype=float)
        Z = np.asarray(self.labels, dtype=float)
        if Y.ndim != 2 or Z.ndim != 1 or Y.shape[0] != Z.shape[0]:
            raise ValueError("features must be (n, d) and labels (n,)")
        if Y.shape[0] == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(Y)):
            raise ValueError("features contain non-finite entries")
        if not np.all(np.abs(Z) == 1.0):
            raise ValueError("labels must be exactly +1 or -1")
        Y = np.array(Y, dtype=float, order="C", copy=True)
        Y.flags.writeable = False
        Z = Z.copy()
        Z.flags.writeable = False
        object.__setattr__(self, "features", Y)
        object.__setattr__(self, "labels", Z)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.features.shape, dtype=np.int64).tobytes())
        h.update(self.features.tobytes())
        h.update(self.labels.tobytes())
        return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# One-dimensional restrictions


class Restriction:
    """``s -> f(anchor with coordinate i set to s)`` on ``[lo, hi]``.

    Inherits ``alpha``, ``beta``, ``g_max`` and the coordinate's noise scale
    ``sigma`` (``None`` when the noise has no sub-Gaussian scale) from the
    parent objective. ``value``/``grad`` accept scalars or arrays.
    """

    index: int
    lo: float
    hi: float
    alpha: float
    beta: float
    g_max: float
    sigma: float | None
    anchor: np.ndarray

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def value(self, s):
        raise NotImplementedError

    def grad(self, s):
        raise NotImplementedError

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` randomness tokens (noise values or record indices)."""
        raise NotImplementedError

    def grad_tokens(self, s, tokens):
        """Noisy gradients at ``s`` realised from pre-drawn ``tokens``."""
        raise NotImplementedError

    def scalar_sampler(self):
        """Plain-float ``(s, token) -> gradient`` for tight loops."""
        raise NotImplementedError

    def sample_grad(self, s: float, rng: np.random.Generator, size=None):
        if size is None:
            return float(self.grad_tokens(s, self.draw(rng, 1))[0])
        return self.grad_tokens(s, self.draw(rng, int(np.prod(size)))).reshape(size)

    def sample_values(self, s, rng: np.random.Generator) -> np.ndarray:
        """One noisy loss ``F(x; xi)`` per entry of ``s``, fresh ``xi`` each."""
        raise NotImplementedError

    def minimizer(self) -> float | None:
        """Exact restricted minimizer when available in closed form."""
        return None

    def project(self, s: float) -> float:
        return min(max(s, self.lo), self.hi)

    def embed(self, s: float) -> np.ndarray:
        x = self.anchor.copy()
        x[self.index] = s
        return x


class _QuadraticRestriction(Restriction):
    def __init__(self, obj: "QuadraticObjective", anchor, r, psi0, phi0, i):
        self.index = i
        self.lo = float(obj.domain.lo[i])
        self.hi = float(obj.domain.hi[i])
        self.alpha, self.beta, self.g_max = obj.alpha, obj.beta, obj.g_max
        self.sigma = obj.noise.sigma_of(i)
        self.anchor = np.array(anchor, dtype=float)
        self._noise = obj.noise
        self._s0 = float(anchor[i])
        self._g0 = float(r[i])
        self._a = float(obj.curvature_diag[i])
        self._lam = float(obj.l1[i])
        self._const = psi0 + phi0 - self._lam * abs(self._s0)

    def value(self, s):
        ds = np.asarray(s, dtype=float) - self._s0
        out = self._const + self._g0 * ds + 0.5 * self._a * ds * ds + self._lam * np.abs(ds + self._s0)
        return float(out) if np.ndim(out) == 0 else out

    def grad(self, s):
        s = np.asarray(s, dtype=float)
        out = self._g0 + self._a * (s - self._s0) + self._lam * np.sign(s)
        return float(out) if np.ndim(out) == 0 else out

    def draw(self, rng, n):
        return np.asarray(self._noise.sample(self.index, rng, n), dtype=float).reshape(n)

    def grad_tokens(self, s, tokens):
        return self.grad(s) + tokens

    def scalar_sampler(self):
        g0, a, s0, lam = self._g0, self._a, self._s0, self._lam

        def sample(s, token):
            kink = lam if s > 0 else (-lam if s < 0 else 0.0)
            return g0 + a * (s - s0) + kink + token

        return sample

    def sample_values(self, s, rng):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.asarray(self.value(s), dtype=float) + self._noise.sample(0, rng, s.size)

    def minimizer(self) -> float:
        m = self._s0 - self._g0 / self._a
        return float(np.clip(soft_threshold(m, self._lam / self._a), self.lo, self.hi))


class _HingeRestriction(Restriction):
    def __init__(self, obj: "HingeObjective", anchor, margins, sq_norm, i):
        self.index = i
        self.lo = float(obj.domain.lo[i])
        self.hi = float(obj.domain.hi[i])
        self.alpha, self.beta, self.g_max = obj.alpha, obj.beta, obj.g_max
        self.sigma = None
        self.anchor = np.array(anchor, dtype=float)
        ds = obj.dataset
        self._z = ds.labels
        self._y = ds.features[:, i]
        self._zy = self._z * self._y
        # 1 - Z<x,Y> with coordinate i removed
        self._slack = 1.0 - self._z * (margins - self._y * anchor[i])
        self._reg = obj.reg
        self._sq_rest = sq_norm - anchor[i] ** 2

    def value(self, s):
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            h = np.maximum(self._slack - self._zy * s, 0.0).mean()
            return float(h + 0.5 * self._reg * (self._sq_rest + s * s))
        out = np.empty(s.shape)
        flat, res = s.ravel(), out.ravel()
        step = max(1, 2_000_000 // max(1, self._slack.size))
        for lo in range(0, flat.size, step):
            blk = flat[lo : lo + step]
            h = np.maximum(self._slack[:, None] - self._zy[:, None] * blk[None, :], 0.0).mean(axis=0)
            res[lo : lo + step] = h + 0.5 * self._reg * (self._sq_rest + blk * blk)
        return out

    def grad(self, s):
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            active = self._slack - self._zy * s > 0.0
            return float(-(self._zy * active).mean() + self._reg * s)
        return np.array([self.grad(float(v)) for v in s.ravel()]).reshape(s.shape)

    def draw(self, rng, n):
        return rng.integers(self._zy.size, size=n)

    def grad_tokens(self, s, tokens):
        zy = self._zy[tokens]
        active = self._slack[tokens] - zy * s > 0.0
        return -zy * active + self._reg * s

    def scalar_sampler(self):
        zy, slack, reg = self._zy.tolist(), self._slack.tolist(), self._reg

        def sample(s, token):
            c = zy[token]
            return (-c if slack[token] - c * s > 0.0 else 0.0) + reg * s

        return sample

    def sample_values(self, s, rng):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = rng.integers(self._zy.size, size=s.size)
        hinge = np.maximum(self._slack[idx] - self._zy[idx] * s, 0.0)
        return hinge + 0.5 * self._reg * (self._sq_rest + s * s)


# ---------------------------------------------------------------------------
# Cursors


class Cursor:
    """Mutable current point of a coordinate-wise algorithm."""

    def __init__(self, objective: "CompositeObjective", x):
        self.objective = objective
        self.reset(x)

    @property
    def point(self) -> np.ndarray:
        return self._x.copy()

    def coordinate(self, i: int) -> float:
        return float(self._x[i])

    def reset(self, x) -> None:
        raise NotImplementedError

    def set(self, i: int, s: float) -> None:
        raise NotImplementedError

    def value(self) -> float:
        raise NotImplementedError

    def restrict(self, i: int) -> Restriction:
        raise NotImplementedError

    def sample_grad(self, i: int, rng: np.random.Generator) -> float:
        """One noisy partial gradient ``G_i(x; xi)`` at the current point."""
        raise NotImplementedError


class _QuadraticCursor(Cursor):
    def reset(self, x):
        obj = self.objective
        self._x = obj.domain.project(x)
        self._r = obj._apply(self._x - obj.center)

    def set(self, i, s):
        obj = self.objective
        delta = s - self._x[i]
        if delta != 0.0:
            self._r += obj._column(i) * delta
            self._x[i] = s

    def value(self):
        obj = self.objective
        return float(0.5 * np.dot(self._x - obj.center, self._r) + np.dot(obj.l1, np.abs(self._x)))

    def restrict(self, i):
        obj = self.objective
        psi0 = 0.5 * float(np.dot(self._x - obj.center, self._r))
        phi0 = float(np.dot(obj.l1, np.abs(self._x)))
        return _QuadraticRestriction(obj, self._x, self._r, psi0, phi0, i)

    def sample_grad(self, i, rng):
        obj = self.objective
        xi = self._x[i]
        kink = obj.l1[i] if xi > 0 else (-obj.l1[i] if xi < 0 else 0.0)
        return float(self._r[i] + kink + obj.noise.sample(i, rng))


class _HingeCursor(Cursor):
    _REFRESH = 1000

    def reset(self, x):
        obj = self.objective
        self._x = obj.domain.project(x)
        self._m = obj.dataset.features @ self._x
        self._updates = 0

    def set(self, i, s):
        delta = s - self._x[i]
        if delta == 0.0:
            return
        self._x[i] = s
        self._updates += 1
        if self._updates % self._REFRESH == 0:
            self._m = self.objective.dataset.features @ self._x
        else:
            self._m += self.objective.dataset.features[:, i] * delta

    def value(self):
        obj = self.objective
        h = np.maximum(1.0 - obj.dataset.labels * self._m, 0.0).mean()
        return float(h + 0.5 * obj.reg * np.dot(self._x, self._x))

    def restrict(self, i):
        return _HingeRestriction(self.objective, self._x, self._m, float(np.dot(self._x, self._x)), i)

    def sample_grad(self, i, rng):
        obj = self.objective
        n = int(rng.integers(obj.dataset.n))
        z = obj.dataset.labels[n]
        g = -z * obj.dataset.features[n, i] if 1.0 - z * self._m[n] > 0.0 else 0.0
        return float(g + obj.reg * self._x[i])


# ---------------------------------------------------------------------------
# Objectives


class CompositeObjective:
    """Base class: exact oracles, noisy oracles, restriction, cursor."""

    domain: BoxDomain
    alpha: float
    beta: float
    g_max: float
    noise: SubGaussian | HeavyTailed | None
    x_star: np.ndarray | None = None
    f_star: float | None = None

    @property
    def dim(self) -> int:
        return self.domain.dim

    def _check(self, x, i=None) -> np.ndarray:
        x = _as_point(x)
        if x.size != self.dim:
            raise ValueError(f"point has dimension {x.size}, objective has {self.dim}")
        if not self.domain.contains(x, tol=1e-12):
            raise ValueError("point lies outside the domain")
        if i is not None and not 0 <= i < self.dim:
            raise IndexError(f"coordinate {i} out of range for dimension {self.dim}")
        return x

    def value(self, x) -> float:
        return self.cursor(self._check(x)).value()

    def partial_grad(self, x, i: int) -> float:
        raise NotImplementedError

    def sample_partial_grad(self, x, i: int, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def sample_loss(self, x, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def cursor(self, x) -> Cursor:
        raise NotImplementedError

    def restrict(self, anchor, i: int) -> Restriction:
        anchor = self._check(anchor, i)
        return self.cursor(anchor).restrict(i)

    def excess(self, x) -> float:
        if self.f_star is None:
            raise ValueError("objective has no known minimum; run the oracle first")
        return self.value(x) - self.f_star


class QuadraticObjective(CompositeObjective):
    """``1/2 (x-c)^T A (x-c) + sum_i l1_i |x_i|`` with additive gradient noise."""

    def __init__(self, curvature, center, domain: BoxDomain, l1=0.0, noise=None, g_max=None):
        self.domain = domain
        d = domain.dim
        self.center = np.broadcast_to(np.asarray(center, dtype=float), (d,)).copy()
        A = np.asarray(curvature, dtype=float)
        if A.ndim <= 1:
            diag = np.broadcast_to(A, (d,)).copy()
            if np.any(diag <= 0):
                raise ValueError("curvature must be positive (alpha > 0)")
            self._diag, self._matrix = diag, None
            self.alpha, self.beta = float(diag.min()), float(diag.max())
        else:
            if A.shape != (d, d) or not np.allclose(A, A.T):
                raise ValueError("curvature matrix must be symmetric (d, d)")
            eig = np.linalg.eigvalsh(A)
            if eig[0] <= 0:
                raise ValueError("curvature matrix must be positive definite (alpha > 0)")
            self._diag, self._matrix = None, A.copy()
            self.alpha, self.beta = float(eig[0]), float(eig[-1])
        self.l1 = np.broadcast_to(np.asarray(l1, dtype=float), (d,)).copy()
        if np.any(self.l1 < 0):
            raise ValueError("l1 weights must be non-negative")
        self.noise = NOISELESS if noise is None else noise
        self.g_max = float(g_max) if g_max is not None else self._default_g_max()
        self.x_star = self._closed_form_minimizer()
        self.f_star = None if self.x_star is None else self.value(self.x_star)

    @property
    def curvature_diag(self) -> np.ndarray:
        return self._diag if self._matrix is None else np.diag(self._matrix)

    @property
    def is_separable(self) -> bool:
        return self._matrix is None

    def _apply(self, v):
        return self._diag * v if self._matrix is None else self._matrix @ v

    def _column(self, i):
        if self._matrix is None:
            col = np.zeros(self.dim)
            col[i] = self._diag[i]
            return col
        return self._matrix[:, i]

    def _default_g_max(self) -> float:
        # |d_i psi| is affine in x, so its max over the box sits at a corner
        mid = self.domain.center() - self.center
        half = 0.5 * self.domain.widths
        if self._matrix is None:
            smooth = np.abs(self._diag * mid) + self._diag * half
        else:
            smooth = np.abs(self._matrix @ mid) + np.abs(self._matrix) @ half
        return float(np.max(smooth + self.l1) + 3.0 * self.noise.spread())

    def _closed_form_minimizer(self):
        if self._matrix is None:
            x = soft_threshold(self.center, self.l1 / self._diag)
            return np.clip(x, self.domain.lo, self.domain.hi)
        if not np.any(self.l1) and self.domain.contains(self.center):
            return self.center.copy()
        return None

    def psi(self, x) -> float:
        v = _as_point(x) - self.center
        return float(0.5 * v @ self._apply(v))

    def grad_psi(self, x) -> np.ndarray:
        return self._apply(_as_point(x) - self.center)

    def phi(self, x) -> float:
        return float(np.dot(self.l1, np.abs(_as_point(x))))

    def phi_subgrad(self, i: int, xi: float) -> float:
        # sign(0) = 0 selects the zero subgradient at the kink
        return float(self.l1[i] * np.sign(xi))

    def value(self, x) -> float:
        x = self._check(x)
        return self.psi(x) + self.phi(x)

    def partial_grad(self, x, i):
        x = self._check(x, i)
        if self._matrix is None:
            g = self._diag[i] * (x[i] - self.center[i])
        else:
            g = float(self._matrix[i] @ (x - self.center))
        return float(g + self.phi_subgrad(i, x[i]))

    def sample_partial_grad(self, x, i, rng, size=None):
        g = self.partial_grad(x, i)
        return g + self.noise.sample(i, rng, size)

    def sample_loss(self, x, rng):
        return self.value(x) + float(self.noise.sample(0, rng))

    def cursor(self, x) -> Cursor:
        return _QuadraticCursor(self, x)


class HingeObjective(CompositeObjective):
    """Regularized hinge loss ``E max(0, 1 - Z<x,Y>) + reg/2 |x|^2``.

    ``beta`` is the heuristic ``reg + max_n |Y_n|^2 / n``; the hinge term is
    nonsmooth so this only feeds step-size and schedule formulas.
    """

    def __init__(self, dataset: Dataset, reg: float = 1.2e-2, radius: float | None = None, g_max=None):
        if reg <= 0:
            raise ValueError("regularization must be positive")
        self.dataset = dataset
        self.reg = float(reg)
        # |x*|^2 <= 2 f(0) / reg = 2 / reg, so this box contains the minimizer
        self.radius = float(radius) if radius is not None else float(np.sqrt(2.0 / reg))
        self.domain = BoxDomain.cube(dataset.dim, -self.radius, self.radius)
        self.alpha = self.reg
        sq = np.einsum("ij,ij->i", dataset.features, dataset.features)
        self.beta = self.reg + float(sq.max()) / dataset.n
        self.noise = None
        self.g_max = float(g_max) if g_max is not None else float(np.abs(dataset.features).max() + reg * self.radius)
        self.x_star = None
        self.f_star = None

    def with_minimizer(self, x_star) -> "HingeObjective":
        """Copy of this objective carrying an oracle-computed minimizer."""
        twin = HingeObjective(self.dataset, self.reg, self.radius, self.g_max)
        twin.x_star = np.asarray(x_star, dtype=float).copy()
        twin.f_star = twin.value(twin.x_star)
        return twin

    def partial_grad(self, x, i):
        x = self._check(x, i)
        Y, Z = self.dataset.features, self.dataset.labels
        active = 1.0 - Z * (Y @ x) > 0.0
        return float(-(Z * Y[:, i] * active).mean() + self.reg * x[i])

    def full_subgrad(self, x) -> np.ndarray:
        x = _as_point(x)
        Y, Z = self.dataset.features, self.dataset.labels
        active = (1.0 - Z * (Y @ x) > 0.0).astype(float)
        return -(Y.T @ (Z * active)) / self.dataset.n + self.reg * x

    def sample_partial_grad(self, x, i, rng, size=None):
        x = self._check(x, i)
        Y, Z = self.dataset.features, self.dataset.labels
        idx = rng.integers(self.dataset.n, size=size)
        active = 1.0 - Z[idx] * (Y[idx] @ x) > 0.0
        out = -Z[idx] * Y[idx, i] * active + self.reg * x[i]
        return float(out) if size is None else out

    def sample_loss(self, x, rng):
        x = self._check(x)
        n = int(rng.integers(self.dataset.n))
        y, z = self.dataset.features[n], self.dataset.labels[n]
        return float(max(0.0, 1.0 - z * (y @ x)) + 0.5 * self.reg * (x @ x))

    def cursor(self, x) -> Cursor:
        return _HingeCursor(self, x)


# ---------------------------------------------------------------------------
# Constructors and functional aliases


def make_quadratic(center, domain: BoxDomain, curvature=1.0, noise=None, g_max=None) -> QuadraticObjective:
    """Quadratic ``1/2 (x-c)^T A (x-c)``; scalar ``curvature`` gives ``alpha = beta``."""
    return QuadraticObjective(curvature, center, domain, 0.0, noise, g_max)


def make_l1_quadratic(center, domain: BoxDomain, l1, curvature=1.0, noise=None, g_max=None) -> QuadraticObjective:
    return QuadraticObjective(curvature, center, domain, l1, noise, g_max)


def make_hinge(dataset: Dataset, alpha: float = 1.2e-2, radius=None, g_max=None) -> HingeObjective:
    return HingeObjective(dataset, alpha, radius, g_max)


def reference_quadratic(dim: int, sigma: float = 0.1, center: float = 0.3) -> QuadraticObjective:
    """Unit quadratic ``1/2 |x - c|^2`` on ``[0, 1]^d`` with Gaussian noise."""
    noise = SubGaussian(np.array([sigma])) if sigma > 0 else None
    return make_quadratic(np.full(dim, center), BoxDomain.cube(dim, 0.0, 1.0), 1.0, noise)


def sample_partial_grad(obj: CompositeObjective, x, i: int, rng, size=None):
    return obj.sample_partial_grad(x, i, rng, size)


def sample_loss(obj: CompositeObjective, x, rng) -> float:
    return obj.sample_loss(x, rng)


def value_exact(obj: CompositeObjective, x) -> float:
    return obj.value(x)


def partial_grad_exact(obj: CompositeObjective, x, i: int) -> float:
    return obj.partial_grad(x, i)


def restrict(obj: CompositeObjective, anchor, i: int) -> Restriction:
    return obj.restrict(anchor, i)
