"""Periodic side: the semigroup ``exp(-t Lambda^s)`` on the torus with
multiplier ``|k|^s``, mean-zero decay, the dyadic projection ``P_N`` and
executable checks of three supporting inequalities.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .bernstein import BernsteinReport, bernstein_functional, signed_power
from .errors import DegenerateInputError, DomainError, InvalidInputError, PreconditionError, ResolutionError
from .grid_fft import GridFunction, TorusGrid, apply_multiplier, forward_transform
from .quadrature import integrate_adaptive

MEAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TorusFunction(GridFunction):
    """Real samples on a :class:`TorusGrid`."""

    def __post_init__(self):
        if not isinstance(self.grid, TorusGrid):
            raise InvalidInputError("TorusFunction needs a TorusGrid")
        super().__post_init__()

    @cached_property
    def mean(self) -> float:
        """``<f> = f^(0)``."""
        return float(self.values.mean())

    @classmethod
    def of(cls, g: GridFunction) -> "TorusFunction":
        return g if isinstance(g, cls) else cls(g.grid, g.values)

    def scaled(self, c: float) -> "TorusFunction":
        return TorusFunction(self.grid, c * self.values)


def random_torus_function(grid: TorusGrid, seed: int, max_mode: int = 6, decay: float = 1.0,
                          mean_zero: bool = True) -> TorusFunction:
    """Random trigonometric polynomial with ``|k_i| <= max_mode``.

    Coefficients are complex normals damped by ``(1 + |k|)^-decay``; the
    samples are the real part, so the spectrum is Hermitian by construction.
    """
    if max_mode > grid.modes_per_dim:
        raise ResolutionError("max_mode exceeds the resolved modes")
    rng = np.random.default_rng(seed)
    k = grid.frequency_norm()
    idx = np.abs(grid.frequency_indices)
    keep = idx <= max_mode
    for _ in range(grid.dim - 1):
        keep = np.logical_and.outer(keep, idx <= max_mode)
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    coeffs = np.where(keep, coeffs / (1.0 + k) ** decay, 0.0)
    if mean_zero:
        coeffs.flat[0] = 0.0
    values = np.fft.ifftn(coeffs * grid.phase()).real * grid.total_points
    return TorusFunction(grid, values)


def torus_mode(grid: TorusGrid, k: int, amplitude: float = 1.0, offset: float = 0.0) -> TorusFunction:
    """``offset + amplitude cos(2 pi k x_1)``."""
    x = grid.mesh()[0]
    return TorusFunction(grid, offset + amplitude * np.cos(2.0 * np.pi * k * x))


def torus_semigroup(f: GridFunction, t: float, s: float) -> TorusFunction:
    """``exp(-t Lambda^s) f`` with multiplier ``exp(-t |k|^s)``; the mean is untouched."""
    if not t >= 0:
        raise DomainError("t must be non-negative")
    if not s > 0:
        raise DomainError("s must be positive")
    f = TorusFunction.of(f)
    if t == 0:
        return f
    out = apply_multiplier(f, np.exp(-t * f.grid.frequency_norm() ** s))
    # restore the k = 0 coefficient bit for bit
    values = out.values - out.values.mean() + f.mean
    return TorusFunction(f.grid, values)


def _require_mean_zero(f: TorusFunction) -> None:
    scale = max(1.0, f.lp_norm(2.0))
    if abs(f.mean) > MEAN_TOL * scale:
        raise PreconditionError(f"function must have zero mean, got {f.mean:.3e}")


def _check_p(p: float) -> None:
    if not (p > 1 and math.isfinite(p)):
        raise DomainError(f"p must lie in (1, inf), got {p}")


def torus_bernstein(f: GridFunction, s: float, p: float) -> BernsteinReport:
    """``int (Lambda^s f)|f|^(p-2) f`` over the torus for mean-zero ``f``."""
    _check_p(p)
    f = TorusFunction.of(f)
    _require_mean_zero(f)
    return bernstein_functional(f, s, p)


@dataclass
class DecayTrace:
    p: float
    s: float
    times: np.ndarray
    norms: np.ndarray
    fitted_rate: float
    monotone: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["times"] = [float(t) for t in self.times]
        d["norms"] = [float(v) for v in self.norms]
        return d

    def to_csv(self) -> str:
        rows = ["t,norm"] + [f"{t!r},{v!r}" for t, v in zip(self.times.tolist(), self.norms.tolist())]
        return "\n".join(rows) + "\n"


def mean_zero_decay_check(f: GridFunction, s: float, p: float, t_grid: Sequence[float],
                          jobs: int = 1) -> DecayTrace:
    """``||exp(-t Lambda^s) f||_p`` on ``t_grid`` (0 is prepended if missing).

    ``fitted_rate`` is the least-squares slope of ``log norm`` against ``t``
    over the positive times.
    """
    _check_p(p)
    if not 0 < s <= 2:
        raise DomainError("decay check needs 0 < s <= 2")
    f = TorusFunction.of(f)
    _require_mean_zero(f)
    times = np.asarray(sorted(set(float(t) for t in t_grid) | {0.0}))
    if times[0] < 0:
        raise DomainError("times must be non-negative")
    if times.size < 3:
        raise DomainError("need at least two positive times")

    def norm_at(t):
        return torus_semigroup(f, t, s).lp_norm(p)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            norms = np.array(list(pool.map(norm_at, times)))
    else:
        norms = np.array([norm_at(t) for t in times])
    if not np.all(norms > 0):
        raise DegenerateInputError("zero function")
    rate = float(np.polyfit(times[1:], np.log(norms[1:]), 1)[0])
    monotone = bool(np.all(np.diff(norms) <= 1e-12 * norms[0]))
    return DecayTrace(float(p), float(s), times, norms, rate, monotone)


@dataclass(frozen=True)
class SmallMeanReport:
    mean_ratio: float
    bound_holds: bool
    alpha1: float
    worst_slack: float

    def to_dict(self) -> dict:
        return asdict(self)


def small_mean_decay_check(f: GridFunction, s: float, lam: float, t0: float = 1.0,
                           n_times: int = 32) -> SmallMeanReport:
    """Check ``||e^{-t Lambda^s} f||_2^2 <= e^{-2t}(||f||_2^2 - <f>^2) + <f>^2`` on ``(0, t0]``.

    The factor ``e^{-2t}`` is the decay of the squared norm of the lowest
    nonzero modes ``|k| = 1``. ``alpha1`` is the largest rate with
    ``||e^{-t Lambda^s} f||_2 <= e^{-alpha1 t} ||f||_2`` implied by the bound on
    the sampled times.
    """
    if not 0 <= lam < 1:
        raise DomainError("lambda must lie in [0, 1)")
    if not s > 0:
        raise DomainError("s must be positive")
    f = TorusFunction.of(f)
    norm2 = f.lp_norm_pow(2.0)
    if norm2 == 0:
        raise DegenerateInputError("zero function")
    mu = abs(f.mean) / math.sqrt(norm2)
    if mu > lam:
        raise PreconditionError(f"|<f>|/||f||_2 = {mu:.4f} exceeds lambda = {lam}")
    times = np.geomspace(t0 * 1e-3, t0, n_times)
    slack = np.inf
    alpha1 = np.inf
    for t in times:
        lhs = torus_semigroup(f, t, s).lp_norm_pow(2.0) / norm2
        bound = math.exp(-2.0 * t) * (1.0 - mu * mu) + mu * mu
        slack = min(slack, bound - lhs)
        alpha1 = min(alpha1, -math.log(bound) / (2.0 * t))
    holds = bool(slack >= -1e-12)
    return SmallMeanReport(mu, holds, float(alpha1), float(slack))


def _cutoff(z: np.ndarray) -> np.ndarray:
    """1 on ``z <= 1``, 0 on ``z >= 1.01``, quintic smoothstep between."""
    u = np.clip((np.asarray(z, dtype=float) - 1.0) / 0.01, 0.0, 1.0)
    return 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u * u)


def projection_weight(k: np.ndarray, N: float) -> np.ndarray:
    """``psi(|k|/2N) - psi(|k|/N)``: supported in ``N < |k| < 2.02 N``, 1 on ``[1.01N, 2N]``."""
    k = np.abs(k)
    return _cutoff(k / (2.0 * N)) - _cutoff(k / N)


def projection_PN(f: GridFunction, N: int) -> TorusFunction:
    """Smooth projection onto the modes ``|k| ~ N``."""
    if N < 2:
        raise DomainError("N must be at least 2")
    f = TorusFunction.of(f)
    if f.grid.modes_per_dim < 2.02 * N:
        raise ResolutionError(f"grid resolves |k| <= {f.grid.modes_per_dim}, need {2.02 * N}")
    return TorusFunction.of(apply_multiplier(f, projection_weight(f.grid.frequency_norm(), N)))


def localized_bernstein(f: GridFunction, s: float, p: float, N: int) -> BernsteinReport:
    """Bernstein ratio of ``P_N f`` normalised by ``N^s ||P_N f||_p^p``."""
    _check_p(p)
    if not 0 < s <= 2:
        raise DomainError("localized_bernstein needs 0 < s <= 2")
    f = TorusFunction.of(f)
    g = projection_PN(f, N)
    if g.lp_norm(2.0) <= 1e-12 * max(f.lp_norm(2.0), 1e-300):
        raise DegenerateInputError(f"P_{N} f vanishes")
    return bernstein_functional(g, s, p, N=float(N))


def case_split_lower_bound(f: GridFunction, p: float) -> float:
    """``4(p-1)/p^2 ||P_{|k|>=1}(|f|^(p/2) sgn f)||_2^2``, a lower bound for the
    ``s = 2`` functional."""
    f = TorusFunction.of(f)
    w = signed_power(f.values, 0.5 * p)
    w = w - w.mean()
    return 4.0 * (p - 1.0) / p**2 * float(np.sum(w * w) * f.grid.cell_volume)


# Kato-type inequality ---------------------------------------------------------

@dataclass(frozen=True)
class KatoReport:
    p: float
    lhs: float
    rhs: float
    holds: bool
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


class _TrigPoly:
    """Exact trigonometric interpolant of a 1D torus function and its derivatives."""

    def __init__(self, f: TorusFunction):
        c = forward_transform(f).coefficients
        k = f.grid.axis_frequencies
        keep = np.abs(c) > 1e-15 * np.abs(c).max()
        keep[f.grid.n // 2] = False
        self.k = 2.0 * np.pi * k[keep]
        self.c = c[keep]

    def __call__(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        e = np.exp(1j * np.multiply.outer(x, self.k))
        return (e @ (self.c * (1j * self.k) ** order)).real

    def offset_value(self, z: float, y):
        """``q(z + y) - q(z)`` without cancellation for small ``y``."""
        y = np.asarray(y, dtype=float)
        half = 0.5 * np.multiply.outer(y, self.k)
        e = 2j * np.sin(half) * np.exp(1j * half)
        return (e @ (self.c * np.exp(1j * self.k * z))).real


def _kato_integrands(parts: Sequence[_TrigPoly], p: float):
    factor = min(1.0, p - 1.0)

    def pieces(x, vals=None):
        if vals is None:
            vals = [q(x) for q in parts]
        d1 = [q(x, 1) for q in parts]
        d2 = [q(x, 2) for q in parts]
        mod = np.sqrt(sum(v * v for v in vals))
        live = mod > 1e-300
        w = np.zeros_like(mod)
        w[live] = np.exp((p - 2.0) * np.log(mod[live]))
        lhs = -w * sum(v * dd for v, dd in zip(vals, d2))
        rhs = factor * w * sum(d * d for d in d1)
        return lhs, rhs

    return pieces


def _segments(q: _TrigPoly, samples: int = 4096) -> list[float]:
    x = -0.5 + np.arange(samples + 1) / samples
    v = q(x)
    roots = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        roots.append(brentq(q, x[i], x[i + 1], xtol=1e-15, rtol=1e-15))
    roots += [float(x[i]) for i in np.nonzero(v[:-1] == 0)[0]]
    return sorted(roots)


def _integrate_scalar(q: _TrigPoly, pieces, p: float, tol: float) -> tuple[float, float]:
    """Integrate both Kato integrands over one period, splitting at the zeros
    of ``q`` and using ``x = z + u^m`` next to each zero, ``m = max(2, 1/(p-1))``,
    so the ``|q|^(p-2) q'^2`` singularity (order ``u^(m(p-1)-1)``) stays bounded."""
    m = max(2.0, 1.0 / (p - 1.0))
    roots = _segments(q)
    lhs = rhs = 0.0
    if not roots:
        for j in range(2):
            res = integrate_adaptive(lambda x: pieces(x)[j], -0.5, 0.5, tol)
            if j == 0:
                lhs = res.value
            else:
                rhs = res.value
        return lhs, rhs
    ends = roots + [roots[0] + 1.0]
    for a, b in zip(ends[:-1], ends[1:]):
        mid = 0.5 * (a + b)
        for z, sign in ((a, 1.0), (b, -1.0)):
            span = abs(mid - z) ** (1.0 / m)
            for j in range(2):
                # z is treated as an exact zero: q(z + y) = q(z + y) - q(z)
                def fn(u, z=z, sign=sign, j=j):
                    u = np.asarray(u, dtype=float)
                    y = sign * u**m
                    return m * u ** (m - 1.0) * pieces(z + y, [q.offset_value(z, y)])[j]

                res = integrate_adaptive(fn, 0.0, span, tol / (4 * len(roots)))
                if j == 0:
                    lhs += res.value
                else:
                    rhs += res.value
    return lhs, rhs


def kato_inequality_check(phi, p: float, rel_tol: float = 1e-8) -> KatoReport:
    """Check ``-<|phi|^(p-2) phi, Delta phi> >= min(1, p-1) int |grad phi|^2 |phi|^(p-2)``.

    ``phi`` is a torus function or a sequence of them (vector valued, ``|phi|``
    the Euclidean norm). Derivatives are the true ones on ``[-1/2, 1/2)``
    (``2 pi i k``). One-dimensional inputs are integrated adaptively on the
    trigonometric interpolant; for scalar ``phi`` the period is split at the
    zeros, which matters for ``p < 2`` where the two sides agree exactly.
    Two-dimensional inputs use the grid rule.
    """
    _check_p(p)
    parts = [TorusFunction.of(phi)] if isinstance(phi, GridFunction) else [TorusFunction.of(f) for f in phi]
    if not parts:
        raise InvalidInputError("empty vector")
    grid = parts[0].grid
    if any(f.grid != grid for f in parts):
        raise InvalidInputError("components must share one grid")
    if grid.dim == 1:
        polys = [_TrigPoly(f) for f in parts]
        pieces = _kato_integrands(polys, p)
        scale = max(abs(x) for x in pieces(grid.axis_points)[1]) + 1e-300
        tol = 1e-12 * scale
        if len(polys) == 1:
            lhs, rhs = _integrate_scalar(polys[0], pieces, p, tol)
            method = "adaptive, split at zeros"
        else:
            lhs = integrate_adaptive(lambda x: pieces(x)[0], -0.5, 0.5, tol).value
            rhs = integrate_adaptive(lambda x: pieces(x)[1], -0.5, 0.5, tol).value
            method = "adaptive"
    else:
        lhs, rhs = _kato_grid(parts, p)
        method = "grid"
    holds = lhs >= rhs - rel_tol * abs(rhs)
    return KatoReport(float(p), float(lhs), float(rhs), bool(holds), method)


def _kato_grid(parts: Sequence[TorusFunction], p: float) -> tuple[float, float]:
    grid = parts[0].grid
    k = [2.0 * np.pi * kk for kk in grid.frequency_mesh()]
    k2 = sum(kk * kk for kk in k)
    mod = np.sqrt(sum(f.values**2 for f in parts))
    live = mod > 1e-300
    w = np.zeros_like(mod)
    w[live] = np.exp((p - 2.0) * np.log(mod[live]))
    lhs = rhs = 0.0
    for f in parts:
        lap = apply_multiplier(f, -k2).values
        lhs -= float(np.sum(w * f.values * lap))
        for ax in range(grid.dim):
            d = apply_multiplier(f, 1j * k[ax], zero_nyquist=True).values
            rhs += float(np.sum(w * d * d))
    dv = grid.cell_volume
    return lhs * dv, min(1.0, p - 1.0) * rhs * dv


# Convolution bound ------------------------------------------------------------

@dataclass(frozen=True)
class JensenReport:
    p: float
    lhs: float
    rhs: float
    exponent: float
    holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def torus_heat_kernel(grid: TorusGrid, t: float = 0.1) -> TorusFunction:
    """Periodic kernel with coefficients ``exp(-t |k|^2)``: positive, unit mass."""
    if not t > 0:
        raise DomainError("t must be positive")
    coeffs = np.exp(-t * grid.frequency_norm() ** 2)
    values = np.fft.ifftn(coeffs * grid.phase()).real * grid.total_points
    return TorusFunction(grid, values)


def convolve(K: GridFunction, f: GridFunction) -> TorusFunction:
    """Periodic convolution ``int K(x - y) f(y) dy``."""
    return TorusFunction.of(apply_multiplier(f, forward_transform(K).coefficients))


def jensen_convolution_check(K: GridFunction, f: GridFunction, p: float,
                             rel_tol: float = 1e-8) -> JensenReport:
    """Check ``||K*f||_p <= ||K*|f|^(p/2)||_2^(2/p)`` (``p >= 2``, with
    ``||f||_p = 1``) or ``||K*f||_p <= ||K*|f|^(p/2)||_2^(2(p-1)/p) ||f||_p^(2-p)``
    (``1 < p < 2``).

    The ``p >= 2`` side is not homogeneous, so ``f`` is rescaled to unit
    ``L^p`` norm first.
    """
    _check_p(p)
    K = TorusFunction.of(K)
    f = TorusFunction.of(f)
    if K.grid != f.grid:
        raise InvalidInputError("K and f must share one grid")
    if K.values.min() < -1e-12:
        raise PreconditionError("K must be non-negative")
    if abs(K.integral() - 1.0) > 1e-10:
        raise PreconditionError(f"K must have unit mass, got {K.integral()!r}")
    norm = f.lp_norm(p)
    if norm == 0:
        raise DegenerateInputError("zero function")
    if p >= 2:
        f = f.scaled(1.0 / norm)
        exponent = 2.0 / p
        extra = 1.0
    else:
        exponent = 2.0 * (p - 1.0) / p
        extra = norm ** (2.0 - p)
    lhs = convolve(K, f).lp_norm(p)
    half = TorusFunction(f.grid, np.abs(f.values) ** (0.5 * p))
    rhs = convolve(K, half).lp_norm(2.0) ** exponent * extra
    return JensenReport(float(p), lhs, rhs, exponent, bool(lhs <= rhs * (1.0 + rel_tol)))
