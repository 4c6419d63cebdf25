"""Exact values of the log-rational integrals

    I_j = int (log(1+x^2))^2 (1+x^2)^(-j) dx,
    F_n = int log(1+x^2) (1+x^2)^(-n) dx,

over the real line, and their quadrature audit.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .quadrature import Decay, integrate_semi_infinite

PI = math.pi
LOG2 = math.log(2.0)
LOG4 = math.log(4.0)
LOG64 = math.log(64.0)


@dataclass(frozen=True)
class ClosedFormTable:
    I: tuple[float, float, float, float]
    F: tuple[float, float, float, float]
    lemma_value: float
    eq_A102_value: float

    def to_dict(self) -> dict:
        return asdict(self)


def f_values() -> tuple[float, float, float, float]:
    return (
        PI * LOG4,
        PI * (-0.5 + LOG2),
        PI * (-7.0 / 16.0 + 0.75 * LOG2),
        PI * (-37.0 / 96.0 + 0.625 * LOG2),
    )


def i_values(F: tuple[float, ...] | None = None) -> tuple[float, float, float, float]:
    """``I_1`` in closed form, the rest from the downward recursion."""
    F = f_values() if F is None else F
    out = [PI**3 / 3.0 + 4.0 * PI * LOG2**2]
    for n in range(1, 4):
        out.append((1.0 - 1.0 / (2 * n)) * out[-1] - (2.0 / n) * (F[n - 1] - F[n]))
    return tuple(out)


def combination_value() -> float:
    """``3 int f^2 (f'')^2`` for ``f = log(1+x^2)``, i.e. ``12 I_2 - 48 I_3 + 48 I_4``."""
    return -29.0 / 6.0 * PI + PI**3 + LOG4 * (-7.0 + LOG64) * PI


def log_quartic_value() -> float:
    """``int f'''' f^3`` for ``f = log(1+x^2)``."""
    return -41.0 / 6.0 * PI + PI**3 + LOG4 * (-7.0 + LOG64) * PI


def closed_form_table() -> ClosedFormTable:
    F = f_values()
    return ClosedFormTable(i_values(F), F, log_quartic_value(), combination_value())


@dataclass(frozen=True)
class CrosscheckReport:
    names: tuple[str, ...]
    closed: tuple[float, ...]
    numeric: tuple[float, ...]
    error_estimates: tuple[float, ...]
    max_abs_discrepancy: float
    abs_tol: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _whole_line(power_log: int, j: int, tol: float):
    def f(x):
        x = np.asarray(x)
        return np.log1p(x * x) ** power_log / (1.0 + x * x) ** j

    res = integrate_semi_infinite(f, Decay.algebraic(1.5), 0.5 * tol)
    return 2.0 * res.value, 2.0 * res.abs_error_estimate


def quadrature_crosscheck(abs_tol: float = 1e-8) -> CrosscheckReport:
    """Recompute every table entry by quadrature and compare.

    Each integrand is even, so the half line is integrated under the map
    ``x = u / (1 - u)`` and doubled.
    """
    if not abs_tol >= 1e-8:
        raise DomainError("abs_tol must be at least 1e-8")
    table = closed_form_table()
    quad_tol = abs_tol * 1e-3
    names, closed, numeric, errs = [], [], [], []
    for j in range(1, 5):
        v, e = _whole_line(2, j, quad_tol)
        names.append(f"I{j}")
        closed.append(table.I[j - 1])
        numeric.append(v)
        errs.append(e)
    for n in range(1, 5):
        v, e = _whole_line(1, n, quad_tol)
        names.append(f"F{n}")
        closed.append(table.F[n - 1])
        numeric.append(v)
        errs.append(e)
    combo = 12.0 * numeric[1] - 48.0 * numeric[2] + 48.0 * numeric[3]
    names.append("combination")
    closed.append(table.eq_A102_value)
    numeric.append(combo)
    errs.append(12.0 * errs[1] + 48.0 * errs[2] + 48.0 * errs[3])
    disc = max(abs(a - b) for a, b in zip(numeric, closed))
    return CrosscheckReport(tuple(names), tuple(closed), tuple(numeric), tuple(errs),
                            disc, abs_tol, disc <= abs_tol)
