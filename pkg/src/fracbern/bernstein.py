"""The functional ``B_{s,p}(f) = int (Lambda^s f) |f|^(p-2) f`` and constructions
that drive it negative for ``s > 2``.

Three constructions live here:

* the frequency-localised family built from ``log(1 + x^2)`` (``s = p = 4``),
  rescaled to any band scale ``N``;
* a large-``p`` witness: a smoothed sign pattern of the heat kernel pushed
  forward by the semigroup for a short time;
* a small-``p`` witness obtained from the large-``q`` one by duality.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from . import closedform
from .errors import ConstructionFailedError, DegenerateInputError, DomainError
from .grid_fft import (
    BandAnnulus,
    GridFunction,
    RealGrid,
    SpectrumFunction,
    apply_multiplier,
    band_support_check,
    forward_transform,
    inverse_transform,
)
from .quadrature import Decay, integrate_adaptive, integrate_semi_infinite

POWER_FLOOR = 1e-300


# Smooth cutoffs ---------------------------------------------------------------

def _glue(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = np.exp(-1.0 / z[pos])
    return out


def smooth_step(z) -> np.ndarray:
    """``C^inf`` transition: 0 for ``z <= 0``, 1 for ``z >= 1``, ``H(z) + H(1-z) = 1``."""
    a = _glue(z)
    b = _glue(1.0 - np.asarray(z, dtype=float))
    return a / (a + b)


def bump_profile(z) -> np.ndarray:
    """Radial cutoff equal to 1 on ``|z| <= 1`` and 0 on ``|z| >= 2``."""
    return smooth_step(2.0 - np.abs(np.asarray(z, dtype=float)))


BUMP_PROFILES = {"exp_glue": bump_profile}


def signed_power(f: np.ndarray, q: float) -> np.ndarray:
    """``|f|^q sgn f``, evaluated as ``exp(q log|f|)`` and set to 0 below ``1e-300``."""
    a = np.abs(f)
    keep = a >= POWER_FLOOR
    out = np.zeros_like(a)
    out[keep] = np.exp(q * np.log(a[keep])) * np.sign(f[keep])
    return out


# The functional ---------------------------------------------------------------

@dataclass(frozen=True)
class BernsteinReport:
    s: float
    p: float
    band_scale_N: float | None
    raw_value: float
    p_norm_pow_p: float
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_sp(s: float, p: float) -> None:
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")


def bernstein_functional(f: GridFunction, s: float, p: float, N: float | None = None) -> BernsteinReport:
    """``int (Lambda^s f) |f|^(p-2) f`` by grid quadrature.

    ``ratio`` is ``raw / (N^s ||f||_p^p)`` when a band scale ``N`` is given and
    ``raw / ||f||_p^p`` otherwise.
    """
    _check_sp(s, p)
    norm_p = f.lp_norm_pow(p)
    if not norm_p > 0:
        raise DegenerateInputError("zero function")
    lam = apply_multiplier(f, f.grid.frequency_norm() ** s)
    raw = float(np.sum(lam.values * signed_power(f.values, p - 1.0)) * f.grid.cell_volume)
    denom = norm_p * (N**s if N is not None else 1.0)
    return BernsteinReport(float(s), float(p), N, raw, norm_p, raw / denom)


def semigroup_apply_line(f: GridFunction, t: float, s: float) -> GridFunction:
    """``exp(-t Lambda^s) f`` via the multiplier ``exp(-t |xi|^s)``."""
    if not t >= 0:
        raise DomainError("t must be non-negative")
    if not s > 0:
        raise DomainError("s must be positive")
    if t == 0:
        return f
    return apply_multiplier(f, np.exp(-t * f.grid.frequency_norm() ** s))


# log(1 + x^2) and friends -----------------------------------------------------

def f1(x):
    x = np.asarray(x, dtype=float)
    return np.log1p(x * x)


def f1_d1(x):
    x = np.asarray(x, dtype=float)
    return 2.0 * x / (1.0 + x * x)


def f1_d2(x):
    x = np.asarray(x, dtype=float)
    return 2.0 * (1.0 - x * x) / (1.0 + x * x) ** 2


def f1_d4(x):
    x = np.asarray(x, dtype=float)
    x2 = x * x
    return -12.0 * (1.0 - 6.0 * x2 + x2 * x2) / (1.0 + x2) ** 4


def g_function(x):
    """``f1'''' f1^3 = -12 (1 - 6x^2 + x^4) log(1+x^2)^3 / (1+x^2)^4``."""
    return f1_d4(x) * f1(x) ** 3


_HERMITE = {
    4: (12.0, 0.0, -48.0, 0.0, 16.0),
    8: (1680.0, 0.0, -13440.0, 0.0, 13440.0, 0.0, -3584.0, 0.0, 256.0),
}


def f2(x):
    x = np.asarray(x, dtype=float)
    return x + np.exp(-x * x)


def f2_derivative(order: int, x):
    """``d^n/dx^n (x + exp(-x^2)) = H_n(x) exp(-x^2)`` for ``n`` in {4, 8}."""
    if order not in _HERMITE:
        raise DomainError(f"order must be 4 or 8, got {order}")
    x = np.asarray(x, dtype=float)
    return np.polynomial.polynomial.polyval(x, _HERMITE[order]) * np.exp(-x * x)


def f2_integral(order: int, half_width: float = 12.0, abs_tol: float = 1e-10) -> float:
    """``int_{-X}^{X} f2^(n) f2^3 dx`` (the integrand is negligible beyond ``X = 12``)."""
    res = integrate_adaptive(lambda x: f2_derivative(order, x) * f2(x) ** 3,
                             -half_width, half_width, abs_tol,
                             breakpoints=np.linspace(-half_width, half_width, 49)[1:-1])
    return res.value


@dataclass(frozen=True)
class LogQuarticIntegrals:
    I_direct: float
    I_byparts: float
    I_closed: float
    curvature_term: float
    slope_term: float
    error_estimate: float

    def to_dict(self) -> dict:
        return asdict(self)


def _even_line_integral(fn, tol: float, rate: float):
    res = integrate_semi_infinite(fn, Decay.algebraic(rate), 0.5 * tol)
    return 2.0 * res.value, 2.0 * res.abs_error_estimate


def lemma_a1_integrals(abs_tol: float = 1e-10) -> LogQuarticIntegrals:
    """``int f1'''' f1^3`` three ways: directly, after integrating by parts
    (``3 int f1^2 f1''^2 - 2 int f1'^4``) and in closed form."""
    direct, e1 = _even_line_integral(lambda x: g_function(x), abs_tol, 3.5)
    curv, e2 = _even_line_integral(lambda x: 3.0 * f1(x) ** 2 * f1_d2(x) ** 2, abs_tol, 3.5)
    slope, e3 = _even_line_integral(lambda x: 2.0 * f1_d1(x) ** 4, abs_tol, 3.5)
    return LogQuarticIntegrals(direct, curv - slope, closedform.log_quartic_value(),
                          curv, slope, e1 + e2 + e3)


# Frequency-localised family (s = p = 4) ----------------------------------------

DEFAULT_T1_GRID = RealGrid(8192.0, 2**16)


@dataclass(frozen=True)
class CounterexampleParams:
    R0: float
    eps0: float
    N_list: tuple[float, ...]
    bump_profile: str = "exp_glue"

    def __post_init__(self):
        if self.R0 < 2:
            raise DomainError("R0 must be at least 2")
        if not 0 < self.eps0 <= 0.25:
            raise DomainError("eps0 must lie in (0, 1/4]")
        Ns = tuple(float(n) for n in self.N_list)
        if not Ns or any(n < 4 for n in Ns) or any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise DomainError("N_list must be increasing with entries >= 4")
        object.__setattr__(self, "N_list", Ns)
        if self.bump_profile not in BUMP_PROFILES:
            raise DomainError(f"unknown bump profile {self.bump_profile!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["N_list"] = list(self.N_list)
        return d


def windowed_f1(grid: RealGrid, R: float, profile: str = "exp_glue") -> GridFunction:
    """``log(1 + x^2) phi(x / R)`` on a line grid."""
    x = grid.axis_points
    return GridFunction(grid, f1(x) * BUMP_PROFILES[profile](x / R))


def mollify_spectrum(f: GridFunction, eps: float, profile: str = "exp_glue") -> GridFunction:
    """Keep only ``eps <= |xi| <= 2/eps``: ``phi(eps xi) (1 - phi(xi / eps)) f^``."""
    phi = BUMP_PROFILES[profile]
    r = f.grid.frequency_norm()
    return apply_multiplier(f, phi(eps * r) * (1.0 - phi(r / eps)))


def _quartic(f: GridFunction, N: float | None = None) -> BernsteinReport:
    return bernstein_functional(f, 4.0, 4.0, N)


@dataclass(frozen=True)
class ParameterSearch:
    params: CounterexampleParams
    R_trace: tuple[tuple[float, float], ...]
    eps_trace: tuple[tuple[float, float], ...]
    base_value: float

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "R_trace": [list(t) for t in self.R_trace],
                "eps_trace": [list(t) for t in self.eps_trace], "base_value": self.base_value}


def select_counterexample_params(N_list: Sequence[float], grid: RealGrid = DEFAULT_T1_GRID,
                                 profile: str = "exp_glue", keep_fraction: float = 0.5,
                                 R_max: float = 1024.0, eps_min: float = 2.0**-16) -> ParameterSearch:
    """Pick ``(R0, eps0)`` reproducibly.

    ``R0`` doubles from 2 until the windowed profile has a certified negative
    quartic value (the same sign at ``n`` and ``n/2`` points, margin larger
    than the difference). ``eps0`` halves from 1/4 until the band-limited
    profile keeps ``keep_fraction`` of that negative value.
    """
    coarse = RealGrid(grid.half_width, grid.num_points // 2)
    R = 2.0
    R_trace = []
    while True:
        val = _quartic(windowed_f1(grid, R, profile)).raw_value
        val_c = _quartic(windowed_f1(coarse, R, profile)).raw_value
        R_trace.append((R, val))
        if val + abs(val - val_c) < 0:
            break
        R *= 2.0
        if R > R_max:
            raise ConstructionFailedError("no negative windowed profile found", {"R_max": R_max})
    base = windowed_f1(grid, R, profile)
    eps = 0.25
    eps_trace = []
    while True:
        v = _quartic(mollify_spectrum(base, eps, profile)).raw_value
        eps_trace.append((eps, v))
        if v <= keep_fraction * val:
            break
        eps *= 0.5
        if eps < eps_min:
            raise ConstructionFailedError("band-limiting destroys the negative value",
                                          {"R0": R, "eps_min": eps_min})
    params = CounterexampleParams(R, eps, tuple(N_list), profile)
    return ParameterSearch(params, tuple(R_trace), tuple(eps_trace), val)


def band_limited_profile(params: CounterexampleParams, grid: RealGrid = DEFAULT_T1_GRID) -> GridFunction:
    """``h`` with ``h^ = phi(eps0 xi)(1 - phi(xi/eps0)) (f1 phi(./R0))^``."""
    return mollify_spectrum(windowed_f1(grid, params.R0, params.bump_profile),
                            params.eps0, params.bump_profile)


def rescale(h: GridFunction, N: float) -> GridFunction:
    """``N^(1/4) h(N x)`` carried by the same samples on a grid ``N`` times finer."""
    g = h.grid
    return GridFunction(RealGrid(g.half_width / N, g.num_points), N**0.25 * h.values)


@dataclass
class CounterexampleMember:
    N: float
    dim: int
    function: GridFunction = field(repr=False)
    report: BernsteinReport
    band: BandAnnulus
    band_ratio: float
    band_pass: bool
    error_budget: float

    @property
    def certified(self) -> bool:
        return self.report.ratio + self.error_budget < 0

    def to_dict(self) -> dict:
        return {"N": self.N, "dim": self.dim, "report": self.report.to_dict(),
                "band": [self.band.inner, self.band.outer], "band_ratio": self.band_ratio,
                "band_pass": self.band_pass, "error_budget": self.error_budget,
                "certified": self.certified}


def transverse_profile(grid: RealGrid | None = None) -> GridFunction:
    """Even real ``psi`` with ``psi^(eta) = phi(2 eta)`` (spectrum in ``|eta| <= 1``)."""
    grid = grid or RealGrid(200.0, 4096)
    spec = bump_profile(2.0 * grid.frequency_norm()).astype(complex)
    return inverse_transform(SpectrumFunction(grid, spec))


def _moments(f: GridFunction) -> tuple[float, float, float]:
    """``(int f'''' f^3, int f'' f^3, int f^4)``."""
    xi = f.grid.axis_frequencies
    d4 = apply_multiplier(f, xi**4).values
    d2 = apply_multiplier(f, -(xi**2)).values
    cube = f.values**3
    dv = f.grid.cell_volume
    return float(np.sum(d4 * cube) * dv), float(np.sum(d2 * cube) * dv), f.lp_norm_pow(4.0)


def _planar_ratio(a: GridFunction, b: GridFunction, N: float) -> tuple[float, float, float]:
    """Quartic ratio of ``a(x1) b(x2)`` from one-dimensional moments.

    ``int Delta^2 f f^3 = I4(a) M(b) + 2 I2(a) I2(b) + M(a) I4(b)``.
    """
    a4, a2, am = _moments(a)
    b4, b2, bm = _moments(b)
    raw = a4 * bm + 2.0 * a2 * b2 + am * b4
    norm = am * bm
    return raw, norm, raw / (N**4 * norm)


def construct_counterexample(params: CounterexampleParams, dim: int = 1,
                             grid: RealGrid = DEFAULT_T1_GRID) -> list[CounterexampleMember]:
    """Build ``f_N(x) = N^(1/4) h(N x)`` (times ``psi(x2)`` when ``dim == 2``).

    Each member carries its quartic ratio, a band check against
    ``(eps0 N, 2N/eps0)`` and an error budget equal to the change of the ratio
    when the base grid is coarsened by two.
    """
    if dim not in (1, 2):
        raise DomainError("dim must be 1 or 2")
    h = band_limited_profile(params, grid)
    h_coarse = band_limited_profile(params, RealGrid(grid.half_width, grid.num_points // 2))
    base = _quartic(h)
    if base.raw_value >= 0:
        raise ConstructionFailedError("band-limited profile has a non-negative quartic value",
                                      params.to_dict())
    psi = transverse_profile() if dim == 2 else None
    psi_band = None
    if psi is not None:
        spec = np.abs(forward_transform(psi).coefficients)
        psi_band = float(spec[psi.grid.frequency_norm() > 1.0].max() / spec.max())
    out = []
    for N in params.N_list:
        fN = rescale(h, N)
        fN_coarse = rescale(h_coarse, N)
        band = BandAnnulus(params.eps0 * N, 2.0 * N / params.eps0)
        check = band_support_check(fN, band, 1e-10)
        if dim == 1:
            report = _quartic(fN, N)
            coarse_ratio = _quartic(fN_coarse, N).ratio
            band_ratio = check.max_outside_ratio
        else:
            raw, norm, ratio = _planar_ratio(fN, psi, N)
            coarse_ratio = _planar_ratio(fN_coarse, psi, N)[2]
            report = BernsteinReport(4.0, 4.0, N, raw, norm, ratio)
            band = BandAnnulus(band.inner, band.outer + 1.0)
            band_ratio = max(check.max_outside_ratio, psi_band)
        budget = abs(report.ratio - coarse_ratio) + 1e-12 * abs(report.ratio)
        out.append(CounterexampleMember(N, dim, fN, report, band, band_ratio,
                                        band_ratio <= 1e-10, budget))
    return out


# Witness searches for s > 2 ---------------------------------------------------

DEFAULT_WITNESS_GRID = RealGrid(60.0, 2**14)
T_SCAN = tuple(float(t) for t in np.geomspace(1e-4, 1.0, 48))


@dataclass
class WitnessCertificate:
    s: float
    p: float
    pipeline: str
    params: dict
    achieved_value: float
    error_budget: float
    grid: dict

    @property
    def certified(self) -> bool:
        return self.achieved_value + self.error_budget < 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["certified"] = self.certified
        return d


def heat_kernel_samples(grid: RealGrid, s: float, t: float = 1.0) -> GridFunction:
    """Discrete kernel of ``exp(-t Lambda^s)``: inverse transform of ``exp(-t|xi|^s)``."""
    spec = np.exp(-t * grid.frequency_norm() ** s).astype(complex)
    return inverse_transform(SpectrumFunction(grid, spec))


def kernel_plateaus(K: GridFunction, lobes: int = 1) -> list[tuple[float, float, int]]:
    """Symmetric sign plateaus ``(a, b, sign)`` of an even kernel out to ``lobes`` lobes."""
    x = K.grid.axis_points
    v = K.values
    pos = x > 0
    xp, vp = x[pos], v[pos]
    idx = np.nonzero(np.sign(vp[:-1]) * np.sign(vp[1:]) < 0)[0]
    if idx.size < lobes:
        raise ConstructionFailedError("kernel has too few sign changes on this grid",
                                      {"lobes": lobes})
    zeros = xp[idx] - vp[idx] * (xp[idx + 1] - xp[idx]) / (vp[idx + 1] - vp[idx])
    zeros = [float(z) for z in zeros[:lobes]]
    plateaus = [(-zeros[0], zeros[0], 1)]
    for k in range(1, lobes):
        sign = (-1) ** k
        plateaus.append((zeros[k - 1], zeros[k], sign))
        plateaus.insert(0, (-zeros[k], -zeros[k - 1], sign))
    return plateaus


def plateau_function(grid: RealGrid, plateaus: Sequence[Sequence[float]], width: float) -> GridFunction:
    """Sum of glued plateaus ``sign * H((x-a)/w + 1/2) H((b-x)/w + 1/2)``; ``|psi| <= 1``."""
    x = grid.axis_points
    out = np.zeros_like(x)
    for a, b, sign in plateaus:
        out += sign * smooth_step((x - a) / width + 0.5) * smooth_step((b - x) / width + 0.5)
    return GridFunction(grid, out)


def _scan(u0: GridFunction, s: float, p: float, t_grid: Sequence[float]):
    rows = []
    for t in t_grid:
        rep = bernstein_functional(semigroup_apply_line(u0, t, s), s, p)
        rows.append((float(t), rep.ratio, rep.p_norm_pow_p))
    best = min(rows, key=lambda r: r[1])
    return best, rows


def _grid_dict(grid: RealGrid) -> dict:
    return {"half_width": grid.half_width, "num_points": grid.num_points}


def _large_p_start(grid: RealGrid, s: float, p: float, plateaus, width: float) -> GridFunction:
    psi = plateau_function(grid, plateaus, width)
    return psi.scaled(1.0 / psi.lp_norm(p))


def _small_p_start(grid: RealGrid, s: float, p: float, plateaus, width: float):
    q = p / (p - 1.0)
    f = _large_p_start(grid, s, q, plateaus, width)
    Tf = semigroup_apply_line(f, 1.0, s)
    g = GridFunction(grid, signed_power(Tf.values, q - 1.0))
    g = g.scaled(1.0 / g.lp_norm(p))
    Tg = semigroup_apply_line(g, 1.0, s)
    dv = grid.cell_volume
    pairing = (float(np.sum(g.values * Tf.values) * dv), float(np.sum(Tg.values * f.values) * dv))
    return g, f, Tf, Tg, pairing


def _evaluate(pipeline: str, grid: RealGrid, s: float, p: float, params: dict) -> float:
    if pipeline == "large_p":
        u0 = _large_p_start(grid, s, p, params["plateaus"], params["width"])
    else:
        u0 = _small_p_start(grid, s, p, params["plateaus"], params["width"])[0]
    return bernstein_functional(semigroup_apply_line(u0, params["t0"], s), s, p).ratio


def _finish(pipeline, grid, s, p, params) -> WitnessCertificate | None:
    value = _evaluate(pipeline, grid, s, p, params)
    coarse = RealGrid(grid.half_width, grid.num_points // 2)
    budget = abs(value - _evaluate(pipeline, coarse, s, p, params)) + 1e-12 * (1.0 + abs(value))
    cert = WitnessCertificate(float(s), float(p), pipeline, params, value, budget, _grid_dict(grid))
    return cert if cert.certified else None


def _witness_geometry(grid: RealGrid, s: float, lobes: int):
    K = heat_kernel_samples(grid, s)
    plateaus = kernel_plateaus(K, lobes)
    width = min(b - a for a, b, _ in plateaus) / 8.0
    psi = plateau_function(grid, plateaus, width)
    # <K, psi(-.)> = (exp(-Lambda^s) psi)(0); psi is even
    pairing = float(np.sum(K.values * psi.values[::-1]) * grid.cell_volume)
    return [list(pl) for pl in plateaus], width, pairing


def witness_search_large_p(s: float, p: float, grid: RealGrid = DEFAULT_WITNESS_GRID,
                           lobes: int = 1, t_grid: Sequence[float] = T_SCAN) -> WitnessCertificate | None:
    """Search for ``u`` with ``B_{s,p}(u) < 0`` for large ``p``.

    ``psi`` follows the sign of the kernel on its central lobes (so the
    kernel pairs with it to more than ``||psi||_inf = 1``); the semigroup then
    makes ``||exp(-t Lambda^s) psi||_p^p`` grow for short times, which is the
    same as a negative functional. The most negative normalised value over the
    ``t`` scan is certified against a half-resolution recomputation.
    """
    if not s > 2:
        raise DomainError("witness searches need s > 2")
    if not p >= 4:
        raise DomainError("the large-p search needs p >= 4")
    plateaus, width, pairing = _witness_geometry(grid, s, lobes)
    if pairing <= 1.0:
        return None
    u0 = _large_p_start(grid, s, p, plateaus, width)
    (t0, ratio, norm_t0), rows = _scan(u0, s, p, t_grid)
    if ratio >= 0:
        return None
    params = {"lobes": lobes, "plateaus": plateaus, "L0": plateaus[-1][1], "width": width,
              "kernel_pairing": pairing, "t0": t0, "norm_p_pow_at_t0": norm_t0,
              "norm_p_pow_at_1": rows[-1][2]}
    return _finish("large_p", grid, s, p, params)


def witness_search_small_p(s: float, p: float, grid: RealGrid = DEFAULT_WITNESS_GRID,
                           lobes: int = 1, t_grid: Sequence[float] = T_SCAN) -> WitnessCertificate | None:
    """Search for a negative value at ``1 < p < 2`` by duality.

    With ``q = p/(p-1)`` and ``f`` the large-``q`` starting profile
    (``||f||_q = 1``), ``g = |Tf|^(q-1) sgn(Tf)`` normalised in ``L^p`` attains
    ``<g, Tf> = ||Tf||_q > 1``; self-adjointness gives ``||Tg||_p > 1`` and the
    ``t`` scan proceeds from ``g``.
    """
    if not s > 2:
        raise DomainError("witness searches need s > 2")
    if not 1 < p < 2:
        raise DomainError("the small-p search needs 1 < p < 2")
    q = p / (p - 1.0)
    plateaus, width, kernel_pairing = _witness_geometry(grid, s, lobes)
    g, f, Tf, Tg, pairing = _small_p_start(grid, s, p, plateaus, width)
    growth = Tg.lp_norm(p)
    if growth <= 1.0:
        return None
    (t0, ratio, norm_t0), rows = _scan(g, s, p, t_grid)
    if ratio >= 0:
        return None
    params = {"lobes": lobes, "plateaus": plateaus, "L0": plateaus[-1][1], "width": width,
              "kernel_pairing": kernel_pairing, "conjugate_exponent": q,
              "Tf_norm_q": Tf.lp_norm(q), "pairing": list(pairing),
              "pairing_defect": abs(pairing[0] - pairing[1]), "Tpsi_norm_p": growth,
              "t0": t0, "norm_p_pow_at_t0": norm_t0}
    return _finish("small_p", grid, s, p, params)


def recertify(cert: WitnessCertificate, factor: int = 2) -> WitnessCertificate:
    """Re-evaluate a certificate on a grid ``factor`` times finer, same parameters."""
    grid = RealGrid(cert.grid["half_width"], cert.grid["num_points"] * factor)
    value = _evaluate(cert.pipeline, grid, cert.s, cert.p, cert.params)
    base = RealGrid(cert.grid["half_width"], cert.grid["num_points"])
    budget = abs(value - _evaluate(cert.pipeline, base, cert.s, cert.p, cert.params))
    budget += 1e-12 * (1.0 + abs(value))
    return replace(cert, achieved_value=value, error_budget=budget, grid=_grid_dict(grid))


def theorem_t1_certificates(search: ParameterSearch,
                            members: Sequence[CounterexampleMember]) -> list[WitnessCertificate]:
    """Wrap the quartic family as certificates, one per band scale."""
    out = []
    for m in members:
        params = {**search.params.to_dict(), "N": m.N, "dim": m.dim,
                  "band": [m.band.inner, m.band.outer], "band_ratio": m.band_ratio,
                  "base_value": search.base_value}
        grid = _grid_dict(m.function.grid)
        out.append(WitnessCertificate(4.0, 4.0, "theorem_t1", params, m.report.ratio,
                                      m.error_budget, grid))
    return out
