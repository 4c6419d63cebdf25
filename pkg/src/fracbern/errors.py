"""Exception hierarchy shared by every module."""
from __future__ import annotations


class FracbernError(Exception):
    """Base class for all library errors."""


class InvalidInputError(FracbernError, ValueError):
    """Input data is malformed (non-finite samples, wrong shape)."""


class DomainError(FracbernError, ValueError):
    """A parameter lies outside the supported range."""


class SymmetryError(FracbernError, ValueError):
    """A spectrum lacks the Hermitian symmetry needed for a real inverse."""


class DegenerateInputError(FracbernError, ValueError):
    """The input is (numerically) the zero function."""


class PreconditionError(FracbernError, ValueError):
    """A mathematical precondition of the requested check is violated."""


class ResolutionError(FracbernError, ValueError):
    """The grid cannot resolve the requested frequency band."""


class InvalidAngleError(FracbernError, ValueError):
    """A contour ray does not give a decaying integrand."""


class DecayMismatchError(FracbernError, ValueError):
    """Samples of an integrand contradict its declared decay class."""


class ConstructionFailedError(FracbernError, RuntimeError):
    """A counterexample construction did not reach a negative value."""

    def __init__(self, message: str, params: dict | None = None):
        super().__init__(message)
        self.params = params or {}


class ConvergenceError(FracbernError, RuntimeError):
    """Adaptive quadrature exhausted its budget; carries the partial result."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(FracbernError, ValueError):
    """The CLI configuration is invalid."""
