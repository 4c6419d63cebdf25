"""Uniform grids, discrete Fourier transforms and Fourier multipliers.

Two grid families share one interface:

* ``RealGrid`` samples ``[-L, L)^d`` and stands in for the real line. Its
  frequencies are ``xi_k = pi k / L`` and coefficients approximate
  ``int f(x) exp(-i xi x) dx``.
* ``TorusGrid`` samples ``[-1/2, 1/2)^d``. Frequencies are the integers ``k``
  and coefficients approximate ``int f(x) exp(-2 pi i k x) dx``.

On both grids the first sample sits at ``-n h / 2`` so the phase correcting
the DFT to a centred interval is exactly ``(-1)^k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import DegenerateInputError, DomainError, InvalidInputError, SymmetryError

SYMMETRY_TOL = 1e-10


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


class _GridBase:
    """Shared geometry derived from ``dim``, ``n`` (points per axis) and ``spacing``."""

    dim: int

    @property
    def n(self) -> int:
        raise NotImplementedError

    @property
    def spacing(self) -> float:
        raise NotImplementedError

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def total_points(self) -> int:
        return self.n**self.dim

    @property
    def origin(self) -> float:
        return -0.5 * self.n * self.spacing

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def axis_points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n)

    @property
    def frequency_indices(self) -> np.ndarray:
        """Integer DFT indices in numpy's fft order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @property
    def axis_frequencies(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def dual_cell_volume(self) -> float:
        """Weight turning ``sum |c_k|^2`` into ``||f||_2^2`` (Plancherel)."""
        raise NotImplementedError

    def mesh(self) -> tuple[np.ndarray, ...]:
        x = self.axis_points
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def frequency_mesh(self) -> tuple[np.ndarray, ...]:
        k = self.axis_frequencies
        return tuple(np.meshgrid(*([k] * self.dim), indexing="ij"))

    def frequency_norm(self) -> np.ndarray:
        if self.dim == 1:
            return np.abs(self.axis_frequencies)
        return np.sqrt(sum(k * k for k in self.frequency_mesh()))

    def phase(self) -> np.ndarray:
        """``(-1)^(k_1 + ... + k_d)`` on the spectral array."""
        sign = np.where(self.frequency_indices % 2 == 0, 1.0, -1.0)
        out = sign
        for _ in range(self.dim - 1):
            out = np.multiply.outer(out, sign)
        return out


@dataclass(frozen=True)
class RealGrid(_GridBase):
    """Periodised surrogate of the line (or plane) on ``[-L, L)^dim``."""

    half_width: float
    num_points: int
    dim: int = 1

    def __post_init__(self):
        if not (self.half_width > 0 and np.isfinite(self.half_width)):
            raise DomainError(f"half_width must be positive, got {self.half_width}")
        if self.num_points < 16 or not _is_power_of_two(self.num_points):
            raise DomainError(f"num_points must be a power of two >= 16, got {self.num_points}")
        if self.dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def n(self) -> int:
        return self.num_points

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.num_points

    @property
    def axis_frequencies(self) -> np.ndarray:
        return (np.pi / self.half_width) * self.frequency_indices

    @property
    def dual_cell_volume(self) -> float:
        return (1.0 / (2.0 * self.half_width)) ** self.dim

    def refined(self, factor: int = 2) -> "RealGrid":
        """Same interval, ``factor`` times more points."""
        return RealGrid(self.half_width, self.num_points * factor, self.dim)


@dataclass(frozen=True)
class TorusGrid(_GridBase):
    """Uniform grid on the torus ``[-1/2, 1/2)^dim``.

    ``modes_per_dim`` is the largest resolved ``|k_i|``; the default number of
    points is the smallest power of two that is at least ``4 * modes_per_dim``.
    """

    dim: int
    modes_per_dim: int
    points_per_dim: int | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"torus dim must be 1 or 2, got {self.dim}")
        if self.modes_per_dim < 8:
            raise DomainError(f"modes_per_dim must be >= 8, got {self.modes_per_dim}")
        if self.points_per_dim is None:
            p = 1
            while p < 4 * self.modes_per_dim:
                p *= 2
            object.__setattr__(self, "points_per_dim", p)
        if self.points_per_dim <= 2 * self.modes_per_dim:
            raise DomainError("points_per_dim must exceed 2 * modes_per_dim")

    @property
    def n(self) -> int:
        return int(self.points_per_dim)

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def axis_frequencies(self) -> np.ndarray:
        return self.frequency_indices.astype(float)

    @property
    def dual_cell_volume(self) -> float:
        return 1.0


Grid = Union[RealGrid, TorusGrid]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples on a grid; ``values`` has shape ``grid.shape``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            raise InvalidInputError("GridFunction values must be real")
        v = v.astype(float)
        if v.size != self.grid.total_points:
            raise InvalidInputError(
                f"expected {self.grid.total_points} samples, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("GridFunction values must be finite")
        object.__setattr__(self, "values", _freeze(v.reshape(self.grid.shape)))

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[..., np.ndarray]) -> "GridFunction":
        return cls(grid, fn(*grid.mesh()))

    def integral(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)

    def lp_norm_pow(self, p: float) -> float:
        """``||f||_p^p`` by the (spectrally accurate) periodic trapezoid rule."""
        return float((np.abs(self.values) ** p).sum() * self.grid.cell_volume)

    def lp_norm(self, p: float) -> float:
        return self.lp_norm_pow(p) ** (1.0 / p)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values - other.values)

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)


@dataclass(frozen=True, eq=False)
class SpectrumFunction:
    """Fourier coefficients in numpy fft order on ``grid``."""

    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.size != self.grid.total_points:
            raise InvalidInputError(
                f"expected {self.grid.total_points} coefficients, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        object.__setattr__(self, "coefficients", _freeze(c.reshape(self.grid.shape)))

    @property
    def frequencies(self) -> np.ndarray:
        """``xi_k`` (1D) or an array of shape ``(dim, n, ..., n)``."""
        if self.grid.dim == 1:
            return self.grid.axis_frequencies
        return np.stack(self.grid.frequency_mesh())

    def l2_norm_sq(self) -> float:
        return float((np.abs(self.coefficients) ** 2).sum() * self.grid.dual_cell_volume)

    def symmetry_defect(self) -> float:
        """Relative size of ``c(-k) - conj(c(k))``."""
        return hermitian_defect(self.coefficients)


def hermitian_defect(c: np.ndarray) -> float:
    """``max |c(k) - conj(c(-k))| / max |c|`` for an array in fft order."""
    mirrored = c
    for ax in range(c.ndim):
        mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
    scale = np.abs(c).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(c - np.conj(mirrored)).max() / scale)


def forward_transform(f: GridFunction) -> SpectrumFunction:
    """Trapezoid/DFT approximation of the Fourier transform of ``f``."""
    if not isinstance(f, GridFunction):
        raise InvalidInputError("forward_transform expects a GridFunction")
    g = f.grid
    coeffs = g.cell_volume * g.phase() * np.fft.fftn(f.values)
    return SpectrumFunction(g, coeffs)


def inverse_transform(F: SpectrumFunction, real: bool = True):
    """Invert :func:`forward_transform`.

    With ``real=True`` (default) the spectrum must be Hermitian within
    ``1e-10`` relative and a :class:`GridFunction` is returned; otherwise the
    complex sample array is returned.
    """
    g = F.grid
    if real:
        defect = F.symmetry_defect()
        if defect > SYMMETRY_TOL:
            raise SymmetryError(f"spectrum is not Hermitian (defect {defect:.3e})")
    samples = np.fft.ifftn(F.coefficients * g.phase()) / g.cell_volume
    if not real:
        return samples
    return GridFunction(g, samples.real)


Multiplier = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def _nyquist_mask(grid: Grid) -> np.ndarray:
    hit = np.zeros(grid.n, dtype=bool)
    hit[grid.n // 2] = True
    mask = hit
    for _ in range(grid.dim - 1):
        mask = np.logical_or.outer(mask, hit)
    return mask


def multiplier_values(grid: Grid, m: Multiplier) -> np.ndarray:
    """Evaluate a multiplier on the spectral array of ``grid``.

    A callable receives the frequency array (``xi`` in 1D, a stacked
    ``(dim, ...)`` array in 2D).
    """
    if callable(m):
        freqs = grid.axis_frequencies if grid.dim == 1 else np.stack(grid.frequency_mesh())
        vals = np.asarray(m(freqs))
    else:
        vals = np.asarray(m)
    vals = np.broadcast_to(vals, grid.shape)
    if not np.all(np.isfinite(vals)):
        raise InvalidInputError("multiplier is not finite on the grid frequencies")
    return vals


def apply_multiplier(f: GridFunction, m: Multiplier, zero_nyquist: bool = False) -> GridFunction:
    """Return ``inverse(m * forward(f))``.

    Set ``zero_nyquist`` for multipliers that are odd in the frequency: the
    Nyquist bin has no partner and would otherwise break realness.

    The Hermitian check is made on the multiplier itself: the transform of
    real samples is Hermitian up to rounding, and large multipliers would
    otherwise amplify that rounding past the tolerance.
    """
    mult = multiplier_values(f.grid, m)
    if zero_nyquist:
        mult = np.where(_nyquist_mask(f.grid), 0.0, mult)
    defect = hermitian_defect(np.asarray(mult, dtype=complex))
    if defect > SYMMETRY_TOL:
        raise SymmetryError(f"multiplier is not Hermitian (defect {defect:.3e})")
    prod = forward_transform(f).coefficients * mult
    samples = inverse_transform(SpectrumFunction(f.grid, prod), real=False)
    return GridFunction(f.grid, samples.real)


def radial(fn: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """Lift ``fn(|xi|)`` to a multiplier callable."""

    def m(freqs: np.ndarray) -> np.ndarray:
        if freqs.ndim == 1:
            return fn(np.abs(freqs))
        return fn(np.sqrt((freqs * freqs).sum(axis=0)))

    return m


def fractional_laplacian(f: GridFunction, s: float) -> GridFunction:
    """``Lambda^s f`` with multiplier ``|xi|^s`` (line) or ``|k|^s`` (torus)."""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    return apply_multiplier(f, f.grid.frequency_norm() ** s)


def spectral_derivative(f: GridFunction, axis: int = 0, order: int = 1) -> GridFunction:
    """Partial derivative along ``axis`` with respect to the physical coordinate.

    On the torus the coordinate is ``x`` in ``[-1/2, 1/2)``, so a mode
    ``exp(2 pi i k x)`` is multiplied by ``(2 pi i k)^order``.
    """
    g = f.grid
    k = g.frequency_mesh()[axis] if g.dim > 1 else g.axis_frequencies
    if isinstance(g, TorusGrid):
        k = 2.0 * np.pi * k
    return apply_multiplier(f, (1j * k) ** order, zero_nyquist=order % 2 == 1)


@dataclass(frozen=True)
class BandAnnulus:
    """Closed frequency annulus ``inner <= |xi| <= outer``."""

    inner: float
    outer: float

    def __post_init__(self):
        if not (0 < self.inner < self.outer):
            raise DomainError(f"need 0 < inner < outer, got ({self.inner}, {self.outer})")


@dataclass(frozen=True)
class BandReport:
    max_outside_ratio: float
    passed: bool


def band_support_check(f: GridFunction | SpectrumFunction, band: BandAnnulus, tol: float) -> BandReport:
    """Largest coefficient outside ``band`` relative to the largest overall."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    F = f if isinstance(f, SpectrumFunction) else forward_transform(f)
    mag = np.abs(F.coefficients)
    peak = mag.max()
    if peak == 0.0:
        raise DegenerateInputError("zero function has no spectral support")
    r = F.grid.frequency_norm()
    outside = (r < band.inner) | (r > band.outer)
    ratio = float(mag[outside].max() / peak) if outside.any() else 0.0
    return BandReport(ratio, ratio <= tol)
