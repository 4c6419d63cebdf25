import math

import numpy as np
import pytest
from scipy import special

from fracbern.bernstein import g_function
from fracbern.errors import ConvergenceError, DecayMismatchError, DomainError, InvalidInputError
from fracbern.quadrature import (
    Decay,
    bessel_j0,
    bessel_j1,
    exp_power_tail,
    gamma,
    gk15,
    integrate_adaptive,
    integrate_oscillatory,
    integrate_semi_infinite,
)


def test_gk15_exact_on_polynomials():
    val, err, _ = gk15(lambda x: x**20 - 3 * x**7, np.array([0.0]), np.array([1.0]))
    assert val[0] == pytest.approx(1 / 21 - 3 / 8, abs=1e-15)


class TestAdaptive:
    def test_square(self):
        res = integrate_adaptive(lambda x: x * x, 0.0, 1.0, 1e-12)
        assert res.converged and res.evaluations > 0
        assert res.value == pytest.approx(1 / 3, abs=1e-14)

    def test_g_integral(self):
        res = integrate_adaptive(g_function, 0.0, 10.0, 1e-12)
        assert 2 * res.value == pytest.approx(-1.65835, rel=1e-4)

    def test_slope_quartic_with_tail(self):
        def f(x):
            return (2 * x / (1 + x * x)) ** 4

        core = integrate_adaptive(f, -40.0, 40.0, 1e-11)
        tail = integrate_semi_infinite(f, Decay.algebraic(4.0), 1e-11, lower=40.0)
        assert core.value + 2 * tail.value == pytest.approx(math.pi, abs=1e-8)

    def test_breakpoints_and_additivity(self):
        def f(x):
            return np.exp(np.sin(5 * x))

        whole = integrate_adaptive(f, 0.0, 3.0, 1e-12, breakpoints=[1.1, 2.0])
        left = integrate_adaptive(f, 0.0, 1.3, 1e-12)
        right = integrate_adaptive(f, 1.3, 3.0, 1e-12)
        budget = whole.abs_error_estimate + left.abs_error_estimate + right.abs_error_estimate
        assert abs(whole.value - left.value - right.value) <= budget + 1e-15

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_adaptive(np.cos, 1.0, 0.0, 1e-8)
        with pytest.raises(DomainError):
            integrate_adaptive(np.cos, 0.0, 1.0, 0.0)

    def test_non_finite(self):
        with pytest.raises(InvalidInputError):
            integrate_adaptive(lambda x: 1.0 / (x - 0.5) ** 0 * np.nan, 0.0, 1.0, 1e-8)

    def test_non_convergence_carries_partial(self):
        with pytest.raises(ConvergenceError) as info:
            integrate_adaptive(lambda x: np.sin(1.0 / x), 1e-9, 1.0, 1e-14, max_intervals=50)
        assert info.value.partial is not None

    def test_deterministic(self):
        def f(x):
            return np.abs(np.sin(7 * x)) ** 0.5

        a = integrate_adaptive(f, 0.0, 2.0, 1e-10)
        b = integrate_adaptive(f, 0.0, 2.0, 1e-10)
        assert a == b


class TestSemiInfinite:
    def test_exponential(self):
        res = integrate_semi_infinite(lambda t: np.exp(-t), Decay.exponential(1.0), 1e-12)
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_quartic_exponential(self):
        res = integrate_semi_infinite(lambda t: np.exp(-(t**4)), Decay.exponential(4.0), 1e-12)
        assert res.value == pytest.approx(special.gamma(1.25), abs=1e-12)
        assert res.value == pytest.approx(0.906402, abs=1e-6)

    def test_gaussian(self):
        res = integrate_semi_infinite(lambda t: np.exp(-t * t), Decay.exponential(2.0), 1e-12)
        assert res.value == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-12)

    def test_algebraic(self):
        res = integrate_semi_infinite(lambda t: 1 / (1 + t * t), Decay.algebraic(2.0), 1e-12)
        assert res.value == pytest.approx(math.pi / 2, abs=1e-11)

    def test_decay_mismatch_exponential(self):
        with pytest.raises(DecayMismatchError):
            integrate_semi_infinite(lambda t: 1 / (1 + t * t), Decay.exponential(2.0), 1e-10)

    def test_decay_mismatch_algebraic(self):
        with pytest.raises(DecayMismatchError):
            integrate_semi_infinite(lambda t: 1 / (1 + t), Decay.algebraic(3.0), 1e-10)

    def test_decay_validation(self):
        with pytest.raises(DomainError):
            Decay.algebraic(1.0)
        with pytest.raises(DomainError):
            Decay.exponential(0.0)

    @pytest.mark.parametrize("alpha,T", [(1.0, 3.0), (2.0, 2.0), (4.0, 1.5), (0.5, 10.0)])
    def test_tail_bound_is_an_upper_bound(self, alpha, T):
        exact = special.gamma(1 / alpha) * special.gammaincc(1 / alpha, T**alpha) / alpha
        assert exact * (1 - 1e-14) <= exp_power_tail(alpha, T) <= 3 * exact


class TestOscillatory:
    def test_laplace_cosine(self):
        res = integrate_oscillatory(lambda t: np.exp(-t), 10.0, 1e-12)
        assert res.value == pytest.approx(1 / 101, abs=1e-12)

    def test_gaussian_cosine(self):
        # int_0^inf exp(-t^2/4) cos(x t) dt = sqrt(pi) exp(-x^2)
        res = integrate_oscillatory(lambda t: np.exp(-t * t / 4), 4.0, 1e-12, monotone_from=0.0)
        assert res.value == pytest.approx(math.sqrt(math.pi) * math.exp(-16.0), abs=1e-10)

    def test_cubic_envelope_asymptotics(self):
        res = integrate_oscillatory(lambda t: np.exp(-(t**3)), 30.0, 1e-14)
        assert res.value < 0
        assert abs(res.value) * 30.0**4 == pytest.approx(6.0, rel=0.1)

    def test_sine_kind(self):
        res = integrate_oscillatory(lambda t: np.exp(-t), 3.0, 1e-12, kind="sin")
        assert res.value == pytest.approx(3 / 10, abs=1e-12)

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [1, 2, 3, 4])
    def test_against_fine_trapezoid(self, alpha):
        freq = 7.0
        n = 10**7
        t = np.linspace(0.0, 50.0, n + 1)
        y = np.exp(-(t**alpha)) * np.cos(freq * t)
        brute = (y.sum() - 0.5 * (y[0] + y[-1])) * (50.0 / n)
        res = integrate_oscillatory(lambda s: np.exp(-(s**alpha)), freq, 1e-12)
        assert res.value == pytest.approx(brute, abs=1e-8)

    def test_bad_frequency(self):
        with pytest.raises(DomainError):
            integrate_oscillatory(np.exp, 0.0, 1e-8)


def _battery():
    return [
        (np.exp, 0.0, 1.0, math.e - 1),
        (np.sin, 0.0, math.pi, 2.0),
        (lambda x: x**5, -1.0, 2.0, 63 / 6),
        (lambda x: 1 / (1 + x * x), -5.0, 5.0, 2 * math.atan(5.0)),
        (np.sqrt, 0.0, 1.0, 2 / 3),
        (lambda x: np.log(x), 1e-12, 1.0, -1.0 + 1e-12 - 1e-12 * math.log(1e-12)),
        (lambda x: np.cos(20 * x), 0.0, 1.0, math.sin(20.0) / 20),
        (lambda x: np.exp(-x * x), -3.0, 3.0, math.sqrt(math.pi) * math.erf(3.0)),
        (lambda x: x * np.exp(x), 0.0, 2.0, math.exp(2.0) + 1),
        (lambda x: 1 / x, 1.0, 100.0, math.log(100.0)),
        (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.045 + 0.245),
        (lambda x: np.sin(x) ** 2, 0.0, 10.0, 5 - math.sin(20.0) / 4),
        (lambda x: x ** 0.25, 0.0, 2.0, 0.8 * 2**1.25),
        (lambda x: 1 / np.sqrt(1 - x * x), -0.999, 0.999, 2 * math.asin(0.999)),
        (lambda x: np.exp(np.cos(x)), 0.0, 2 * math.pi, 2 * math.pi * special.i0(1.0)),
        (lambda x: np.log1p(x * x), 0.0, 1.0, math.log(2) - 2 + math.pi / 2),
        (lambda x: np.tanh(x), -2.0, 3.0, math.log(math.cosh(3.0)) - math.log(math.cosh(2.0))),
        (lambda x: x**2 * np.sin(x), 0.0, math.pi, math.pi**2 - 4),
        (lambda x: 1 / (1 + x**4), 0.0, 1.0, 0.8669729873399110),
        (lambda x: np.cosh(x), -1.0, 1.0, 2 * math.sinh(1.0)),
    ]


@pytest.mark.parametrize("case", range(20))
def test_error_estimates_are_honest(case):
    f, a, b, exact = _battery()[case]
    res = integrate_adaptive(f, a, b, 1e-6)
    assert abs(res.value - exact) <= 3 * res.abs_error_estimate + 1e-14


class TestSpecialFunctions:
    @pytest.mark.parametrize("z", [0.0, 0.5, 2.404825557695773, 10.0, 77.7, 250.0, 500.0])
    def test_bessel_against_scipy(self, z):
        assert bessel_j0(z) == pytest.approx(special.j0(z), abs=1e-12)
        assert bessel_j1(z) == pytest.approx(special.j1(z), abs=1e-12)

    def test_bessel_vectorised(self):
        z = np.linspace(0, 30, 41)
        assert np.allclose(bessel_j0(z), special.j0(z), atol=1e-12)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 3.5, 7.25, 10.0])
    def test_gamma(self, x):
        assert gamma(x) == pytest.approx(special.gamma(x), abs=1e-12)
