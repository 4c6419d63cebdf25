"""Radial heat kernels of ``exp(-Lambda^s)`` in dimensions 1, 2 and 3.

``K_{s,d}(x) = (2 pi)^-d int exp(-|xi|^s) exp(i x.xi) dxi`` reduces to one
radial integral:

* d = 1: ``(1/pi) int_0^inf exp(-t^s) cos(r t) dt``
* d = 2: ``(1/2pi) int_0^inf exp(-t^s) t J_0(r t) dt``
* d = 3: ``(1/(2 pi^2 r)) int_0^inf exp(-t^s) t sin(r t) dt``
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, InvalidAngleError
from .quadrature import (
    Decay,
    bessel_j0,
    bessel_j1,
    exp_power_tail,
    gamma,
    integrate_adaptive,
    integrate_oscillatory,
    integrate_semi_infinite,
)

SUPPORTED_DIMS = (1, 2, 3)
SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


@dataclass(frozen=True)
class KernelValue:
    value: float
    error: float


def _check(s: float, dim: int) -> None:
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if dim not in SUPPORTED_DIMS:
        raise DomainError(f"dim must be one of {SUPPORTED_DIMS}, got {dim}")


def _cutoff(s: float, power: float, tol: float) -> float:
    """Smallest ``T`` on a 2% ladder with ``int_T^inf t^power e^{-t^s} <= tol``."""
    T = 1.0
    while exp_power_tail(s, T, power) > tol:
        T *= 1.02
    return T


def _is_even_integer(s: float) -> bool:
    return abs(s / 2.0 - round(s / 2.0)) < 1e-12 and s > 0


def kernel_eval(s: float, dim: int, r: float, abs_tol: float = 1e-12,
                strict: bool = True) -> KernelValue:
    """``K_{s,dim}(r)`` together with a certified absolute error bound.

    With ``strict=False`` a tolerance below the round-off floor returns the
    best attainable value and its (larger) error instead of raising.
    """
    _check(s, dim)
    r = abs(float(r))
    env = lambda t: np.exp(-t**s)
    if dim == 1:
        if r == 0.0:
            res = integrate_semi_infinite(env, Decay.exponential(s), math.pi * abs_tol,
                                          raise_on_failure=strict)
        else:
            res = integrate_oscillatory(env, r, math.pi * abs_tol, kind="cos",
                                        raise_on_failure=strict)
        return KernelValue(res.value / math.pi, res.abs_error_estimate / math.pi)
    if dim == 2:
        tol = 2.0 * math.pi * abs_tol
        if r == 0.0:
            res = integrate_semi_infinite(lambda t: t * env(t), Decay.exponential(s), tol,
                                          raise_on_failure=strict)
            return KernelValue(res.value / (2 * math.pi), res.abs_error_estimate / (2 * math.pi))
        T = _cutoff(s, 1.0, 0.25 * tol)
        tail = exp_power_tail(s, T, 1.0)
        nz = int(T * r / math.pi + 1.25)
        zeros = (np.arange(1, nz + 1) - 0.25) * math.pi / r
        res = integrate_adaptive(lambda t: t * env(t) * bessel_j0(r * t), 0.0, T, 0.5 * tol,
                                 breakpoints=zeros, max_intervals=max(20000, 64 * nz),
                                 raise_on_failure=strict)
        return KernelValue(res.value / (2 * math.pi), (res.abs_error_estimate + tail) / (2 * math.pi))
    # dim == 3
    norm = 2.0 * math.pi**2
    if r == 0.0:
        res = integrate_semi_infinite(lambda t: t * t * env(t), Decay.exponential(s),
                                      norm * abs_tol, raise_on_failure=strict)
        return KernelValue(res.value / norm, res.abs_error_estimate / norm)
    if r < 1.0:
        tol = norm * abs_tol
        T = _cutoff(s, 2.0, 0.25 * tol)
        tail = exp_power_tail(s, T, 2.0)
        res = integrate_adaptive(lambda t: t * env(t) * np.sin(r * t) / r, 0.0, T, 0.5 * tol,
                                 raise_on_failure=strict)
        return KernelValue(res.value / norm, (res.abs_error_estimate + tail) / norm)
    peak = (1.0 / s) ** (1.0 / s)
    res = integrate_oscillatory(lambda t: t * env(t), r, norm * r * abs_tol, kind="sin",
                                monotone_from=peak, raise_on_failure=strict)
    return KernelValue(res.value / (norm * r), res.abs_error_estimate / (norm * r))


def kernel_value(s: float, dim: int, r: float, abs_tol: float = 1e-12) -> float:
    """``K_{s,dim}`` at radius ``r`` (absolute error well below ``1e-10``)."""
    return kernel_eval(s, dim, r, abs_tol).value


def scaled_kernel_value(s: float, dim: int, tau: float, r: float, abs_tol: float = 1e-12) -> float:
    """Kernel of ``exp(-tau Lambda^s)``: ``tau^(-d/s) K(tau^(-1/s) r)``."""
    _check(s, dim)
    if not tau > 0:
        raise DomainError("tau must be positive")
    return tau ** (-dim / s) * kernel_value(s, dim, tau ** (-1.0 / s) * r, abs_tol)


def _kernel_array(s, dim, rs, abs_tol, strict=True):
    out = [kernel_eval(s, dim, float(r), abs_tol, strict) for r in np.ravel(rs)]
    return (np.array([o.value for o in out]).reshape(np.shape(rs)),
            np.array([o.error for o in out]).reshape(np.shape(rs)))


@dataclass
class KernelProfile:
    s: float
    dim: int
    sample_points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    min_value: float
    min_location: float
    min_error: float
    certified_negative: bool
    l1_mass: float | None = None
    second_moment: float | None = None

    def to_dict(self, include_samples: bool = False) -> dict:
        d = asdict(self)
        for key in ("sample_points", "values", "errors"):
            d.pop(key)
            if include_samples:
                d[key] = [float(v) for v in getattr(self, key)]
        d["second_moment_divergent"] = self.second_moment is not None and math.isinf(self.second_moment)
        if d["second_moment_divergent"]:
            d["second_moment"] = None
        return d


def positivity_scan(s: float, dim: int, r_max: float, n_samples: int = 64,
                    abs_tol: float = 1e-12) -> KernelProfile:
    """Sample the kernel and locate its minimum.

    Samples are a uniform grid on ``[0, r_max]`` plus a geometric refinement
    past the first sign change (or, without one, a geometric sweep of the
    outer range). An interior minimum is then polished with a bounded Brent
    search. Negativity is certified when ``|min| > 2 * error``.
    """
    _check(s, dim)
    if n_samples < 64:
        raise DomainError("n_samples must be at least 64")
    if not r_max > 0:
        raise DomainError("r_max must be positive")
    rs = np.linspace(0.0, r_max, n_samples)
    vals, errs = _kernel_array(s, dim, rs, abs_tol)
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if change.size:
        rc = 0.5 * (rs[change[0]] + rs[change[0] + 1])
        extra = np.concatenate([rc * (1.0 - np.geomspace(1e-3, 0.5, 8)),
                                rc * (1.0 + np.geomspace(1e-3, 1.0, 24))])
    else:
        extra = np.geomspace(r_max / 64.0, r_max, 32)
    extra = np.setdiff1d(extra[(extra > 0) & (extra <= r_max)], rs)
    ev, ee = _kernel_array(s, dim, extra, abs_tol)
    rs = np.concatenate([rs, extra])
    vals = np.concatenate([vals, ev])
    errs = np.concatenate([errs, ee])
    order = np.argsort(rs)
    rs, vals, errs = rs[order], vals[order], errs[order]
    i = int(np.argmin(vals))
    if 0 < i < rs.size - 1 and vals[i] < 0:
        opt = minimize_scalar(lambda r: kernel_eval(s, dim, r, abs_tol).value,
                              bounds=(rs[i - 1], rs[i + 1]), method="bounded",
                              options={"xatol": 1e-8 * max(1.0, rs[i])})
        kv = kernel_eval(s, dim, float(opt.x), abs_tol)
        if kv.value < vals[i]:
            j = int(np.searchsorted(rs, opt.x))
            rs = np.insert(rs, j, opt.x)
            vals = np.insert(vals, j, kv.value)
            errs = np.insert(errs, j, kv.error)
            i = j
    min_value = float(vals[i])
    min_error = float(errs[i])
    return KernelProfile(s, dim, rs, vals, errs, min_value, float(rs[i]), min_error,
                         bool(min_value < 0 and abs(min_value) > 2.0 * min_error))


# Large-r expansion for d = 1 and d = 3 ---------------------------------------

def _series_coefficients(s: float, terms: int = 12) -> list[tuple[float, float]]:
    """Pairs ``(a_k, k s + 1)`` with ``F_s(x) ~ sum a_k x^-(k s + 1)``."""
    out = []
    for k in range(1, terms + 1):
        sine = math.sin(k * math.pi * s / 2.0)
        if abs(sine) < 1e-12:
            sine = 0.0
        a = (-1) ** (k + 1) * gamma(k * s + 1.0) * sine / math.factorial(k)
        out.append((a, k * s + 1.0))
    return out


def _series_terms(s: float, dim: int) -> list[tuple[float, float]]:
    """Pairs ``(c, e)`` with ``K_{s,dim}(r) ~ sum c r^-e``."""
    base = _series_coefficients(s)
    if dim == 1:
        return [(a / math.pi, e) for a, e in base]
    if dim == 3:
        # K_3 = -K_1' / (2 pi r)
        return [(a * e / (2.0 * math.pi**2), e + 2.0) for a, e in base]
    raise DomainError("large-r series is available for dim 1 and 3 only")


def _series_value(s: float, dim: int, r: float) -> float:
    """Optimally truncated large-r series of the kernel."""
    total, last = 0.0, math.inf
    for c, e in _series_terms(s, dim):
        term = c * r ** (-e)
        if term != 0.0 and abs(term) > last:
            break
        total += term
        if term != 0.0:
            last = abs(term)
    return total


def _series_tail(s: float, dim: int, R: float, moment: float) -> tuple[float, float]:
    """``int_R^inf |S|^{d-1} r^{d-1+moment} K(r) dr`` from the asymptotic series.

    Terms are summed until they stop decreasing; the first omitted term is the
    error estimate.
    """
    area = SPHERE_AREA[dim]
    total, last = 0.0, math.inf
    for c, e in _series_terms(s, dim):
        expo = e - dim - moment
        if expo <= 0:
            raise DomainError("series tail diverges for this moment")
        term = area * c * R ** (-expo) / expo
        if abs(term) > last and last > 0:
            return total, last
        total += term
        if term != 0.0:
            last = abs(term)
    return total, last


def _fit_tail_2d(s: float, R: float, moment: float, abs_tol: float) -> tuple[float, float]:
    """Two-term power fit ``c1 r^-(2+s) + c2 r^-(2+2s)`` for the planar tail."""
    r1, r2 = R, 1.5 * R
    k1 = kernel_eval(s, 2, r1, abs_tol)
    k2 = kernel_eval(s, 2, r2, abs_tol)
    A = np.array([[r1 ** -(2 + s), r1 ** -(2 + 2 * s)], [r2 ** -(2 + s), r2 ** -(2 + 2 * s)]])
    c1, c2 = np.linalg.solve(A, [k1.value, k2.value])
    area = SPHERE_AREA[2]
    e1, e2 = s - moment, 2 * s - moment
    full = area * (c1 * R ** (-e1) / e1 + c2 * R ** (-e2) / e2)
    one_term = area * (k1.value * R ** (2 + s)) * R ** (-e1) / e1
    return float(full), float(abs(full - one_term) + area * (k1.error + k2.error) * R**2)


def ball_mass(s: float, dim: int, R: float, abs_tol: float = 1e-12) -> KernelValue:
    """``int_{|x| <= R} K_{s,dim}(x) dx`` from the Fourier side."""
    _check(s, dim)
    if R <= 0:
        return KernelValue(0.0, 0.0)
    env = lambda t: np.exp(-t**s)
    if dim in (1, 3):
        res = integrate_oscillatory(lambda t: env(t) / t, R, 0.5 * math.pi * abs_tol, kind="sin")
        m1 = KernelValue(2.0 / math.pi * res.value, 2.0 / math.pi * res.abs_error_estimate)
        if dim == 1:
            return m1
        k1 = kernel_eval(s, 1, R, 0.25 * abs_tol / max(R, 1.0), strict=False)
        return KernelValue(m1.value - 2.0 * R * k1.value, m1.error + 2.0 * R * k1.error)
    tol = abs_tol / R
    T = _cutoff(s, 0.0, 0.25 * tol)
    tail = exp_power_tail(s, T, 0.0)
    nz = int(T * R / math.pi + 1)
    zeros = (np.arange(1, nz + 1) + 0.25) * math.pi / R
    res = integrate_adaptive(lambda t: env(t) * bessel_j1(R * t), 0.0, T, 0.5 * tol,
                             breakpoints=zeros, max_intervals=max(20000, 64 * nz))
    return KernelValue(R * res.value, R * (res.abs_error_estimate + tail))


@dataclass(frozen=True)
class TailEstimate:
    radius: float
    value: float
    error: float


def _outer_radius(s: float, dim: int, moment: float, abs_tol: float) -> TailEstimate:
    """Radius beyond which the (weighted) kernel mass is under control."""
    area = SPHERE_AREA[dim]
    R = 20.0
    while R <= 400.0:
        if _is_even_integer(s):
            # super-algebraic decay: the sampled mass on [R, 2R] stands in
            # for everything beyond R
            probe = np.linspace(R, 2.0 * R, 17)
            vals, _ = _kernel_array(s, dim, probe, 1e-14, strict=False)
            weighted = area * np.abs(vals) * probe ** (dim - 1 + moment)
            bound = float(np.sum(0.5 * (weighted[1:] + weighted[:-1]) * np.diff(probe)))
            if bound <= abs_tol:
                return TailEstimate(R, 0.0, bound)
        elif dim == 2:
            value, err = _fit_tail_2d(s, R, moment, 1e-15)
            if err <= abs_tol:
                return TailEstimate(R, value, err)
        else:
            value, err = _series_tail(s, dim, R, moment)
            approx = _series_value(s, dim, R)
            kv = kernel_eval(s, dim, R, max(1e-9 * abs(approx), 1e-300), strict=False)
            # what the truncated series misses at R, carried over the tail
            miss = abs(kv.value - approx) + kv.error
            err += area * miss * R ** (dim + moment)
            if err <= abs_tol:
                return TailEstimate(R, value, err)
        R *= 1.5
    raise DomainError(f"could not control the kernel tail for s={s}, dim={dim}")


def sign_changes(s: float, dim: int, R: float, step: float = 0.25,
                 abs_tol: float = 1e-13) -> list[float]:
    """Radii in ``(0, R)`` where the kernel changes sign (resolved signs only)."""
    rs = np.arange(0.0, R + 0.5 * step, step)
    vals, errs = _kernel_array(s, dim, rs, abs_tol)
    trusted = np.abs(vals) > 10.0 * errs
    idx = np.nonzero(trusted)[0]
    roots = []
    for a, b in zip(idx[:-1], idx[1:]):
        if np.sign(vals[a]) != np.sign(vals[b]):
            roots.append(brentq(lambda r: kernel_eval(s, dim, r, abs_tol).value,
                                rs[a], rs[b], xtol=1e-12))
    return roots


@dataclass(frozen=True)
class MassResult:
    value: float
    error: float
    signed_total: float
    radius: float
    sign_changes: tuple[float, ...]


def l1_mass_detail(s: float, dim: int, abs_tol: float = 1e-9) -> MassResult:
    """``int |K_{s,dim}|`` from ball masses between consecutive sign changes."""
    _check(s, dim)
    tail = _outer_radius(s, dim, 0.0, 0.25 * abs_tol)
    R = tail.radius
    roots = sign_changes(s, dim, R)
    radii = [0.0] + roots + [R]
    masses = [KernelValue(0.0, 0.0)] + [ball_mass(s, dim, r, 1e-12) for r in radii[1:]]
    shells = [masses[i + 1].value - masses[i].value for i in range(len(radii) - 1)]
    err = sum(m.error for m in masses) + tail.error
    total = math.fsum(abs(x) for x in shells) + abs(tail.value)
    signed = masses[-1].value + tail.value
    return MassResult(float(total), float(err), float(signed), float(R), tuple(float(r) for r in roots))


def l1_mass(s: float, dim: int) -> float:
    """``||K_{s,dim}||_1`` (error below ``1e-8``)."""
    return l1_mass_detail(s, dim).value


def second_moment_detail(s: float, dim: int, abs_tol: float = 1e-8) -> KernelValue:
    """``int |x|^2 K_{s,dim}(x) dx``; ``inf`` when it diverges (``s < 2``)."""
    _check(s, dim)
    if s < 2.0:
        return KernelValue(math.inf, 0.0)
    tail = _outer_radius(s, dim, 2.0, 0.25 * abs_tol)
    R = tail.radius
    area = SPHERE_AREA[dim]
    worst = [0.0]

    def integrand(r):
        vals, errs = _kernel_array(s, dim, r, 1e-14, strict=False)
        worst[0] = max(worst[0], float(np.max(errs)))
        return area * r ** (dim + 1) * vals

    res = integrate_adaptive(integrand, 0.0, R, 0.5 * abs_tol,
                             breakpoints=np.linspace(0.0, R, int(R) + 1)[1:-1])
    kernel_err = area * worst[0] * R ** (dim + 2) / (dim + 2)
    return KernelValue(res.value + tail.value,
                       res.abs_error_estimate + tail.error + kernel_err)


def second_moment(s: float, dim: int) -> float:
    """``int |x|^2 K``; returns ``math.inf`` as the divergence flag for ``s < 2``."""
    return second_moment_detail(s, dim).value


# Large-x behaviour of the one-dimensional profile ------------------------------

def polya_limit(alpha: float) -> float:
    """``Gamma(alpha + 1) sin(pi alpha / 2)``."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return gamma(alpha + 1.0) * math.sin(math.pi * alpha / 2.0)


def contour_angle(alpha: float) -> float:
    """Default ray angle for the rotated representation."""
    if alpha <= 1.0:
        return alpha * math.pi / 2.0
    return 0.9 * min(math.pi / (2.0 * alpha), math.pi / 2.0)


def polya_rescaled_detail(alpha: float, x: float, method: str = "oscillatory",
                          theta: float | None = None) -> KernelValue:
    """``x^(alpha+1) int_0^inf exp(-t^alpha) cos(x t) dt`` with an error bound.

    ``rotated_contour`` evaluates ``Im int_0^inf exp(i u^(1/alpha) - x^-alpha u) du``
    along the ray ``u = rho exp(i theta)``; with ``v = rho^(1/alpha)`` the
    integrand decays like ``exp(-v sin(theta/alpha))``.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if not x >= 1.0:
        raise DomainError("x must be at least 1")
    scale = x ** (alpha + 1.0)
    if method == "oscillatory":
        tol = max(1e-14, 1e-10 / scale)
        res = integrate_oscillatory(lambda t: np.exp(-t**alpha), x, tol, kind="cos")
        return KernelValue(scale * res.value, scale * res.abs_error_estimate)
    if method != "rotated_contour":
        raise DomainError(f"unknown method {method!r}")
    th = contour_angle(alpha) if theta is None else float(theta)
    damp = math.sin(th / alpha)
    if math.cos(th) < -1e-15 or damp <= 0.0:
        raise InvalidAngleError(f"ray angle {th} gives a non-decaying integrand for alpha={alpha}")
    rot = complex(-damp, math.cos(th / alpha))
    lam = x ** (-alpha) * complex(math.cos(th), math.sin(th))
    pre = complex(math.cos(th), math.sin(th))

    def im_part(w):
        v = w / damp
        z = pre * alpha * v ** (alpha - 1.0) * np.exp(rot * v - lam * v**alpha) / damp
        return z.imag

    res = integrate_semi_infinite(im_part, Decay.exponential(1.0), 1e-9)
    return KernelValue(res.value, res.abs_error_estimate)


def polya_rescaled(alpha: float, x: float, method: str = "oscillatory") -> float:
    return polya_rescaled_detail(alpha, x, method).value


@dataclass
class AsymptoticReport:
    alpha: float
    dim: int
    probes: list[tuple[float, float]]
    limit_formula_value: float | None
    expected_sign: int
    stabilized: bool
    sign_ok: bool
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def rescaled_kernel(alpha: float, dim: int, x: float, abs_tol: float | None = None) -> float:
    """``|x|^(d+alpha) (2 pi)^d K_{alpha,d}(x)``."""
    if dim == 1:
        return polya_rescaled(alpha, x)
    scale = x ** (dim + alpha) * (2.0 * math.pi) ** dim
    tol = 1e-6 / scale if abs_tol is None else abs_tol
    return scale * kernel_value(alpha, dim, x, max(tol, 1e-15))


def asymptotic_check(alpha: float, dim: int, probe_xs: Sequence[float],
                     tolerance: float = 0.05) -> AsymptoticReport:
    """Check that the rescaled kernel settles at large ``|x|``.

    In d = 1 the settled value is compared with :func:`polya_limit`; in d = 2, 3
    only its sign and its stabilisation are checked.
    """
    _check(alpha, dim)
    if _is_even_integer(alpha):
        raise DomainError("leading asymptotic term vanishes for even integer alpha")
    xs = [float(x) for x in probe_xs]
    if len(xs) < 3 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("need at least 3 increasing probes")
    probes = [(x, rescaled_kernel(alpha, dim, x)) for x in xs]
    last, prev = probes[-1][1], probes[-2][1]
    stabilized = abs(last - prev) <= tolerance * abs(last)
    expected = 1 if math.sin(math.pi * alpha / 2.0) > 0 else -1
    limit = polya_limit(alpha) if dim == 1 else None
    sign_ok = (last > 0) == (expected > 0)
    if limit is not None:
        sign_ok = sign_ok and abs(last - limit) <= tolerance * abs(limit)
    return AsymptoticReport(alpha, dim, probes, limit, expected, stabilized, sign_ok, tolerance)
