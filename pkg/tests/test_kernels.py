import math

import numpy as np
import pytest
from scipy import integrate, special

from fracbern import kernels
from fracbern.errors import DomainError, InvalidAngleError
from fracbern.grid_fft import GridFunction, RealGrid, apply_multiplier, forward_transform, inverse_transform, SpectrumFunction


def _cut(s, tau=1.0):
    # exp(-tau t^s) < 1e-20 beyond this point
    return (46.0 / tau) ** (1.0 / s)


def oracle_1d(s, r, tau=1.0):
    """Independent route: QUADPACK's weighted oscillatory rule on a finite range."""
    val = integrate.quad(lambda t: np.exp(-tau * t**s), 0, _cut(s, tau), weight="cos", wvar=r,
                         epsabs=1e-15, limit=400)[0]
    return val / math.pi


def oracle_2d(s, r):
    val = integrate.quad(lambda t: np.exp(-(t**s)) * t * special.j0(r * t), 0, _cut(s),
                         epsabs=1e-14, limit=400)[0]
    return val / (2 * math.pi)


def oracle_3d(s, r):
    val = integrate.quad(lambda t: np.exp(-(t**s)) * t, 0, _cut(s), weight="sin", wvar=r,
                         epsabs=1e-15, limit=400)[0]
    return val / (2 * math.pi**2 * r)


class TestKernelValue:
    def test_poisson_at_origin(self):
        assert kernels.kernel_value(1.0, 1, 0.0) == pytest.approx(1 / math.pi, abs=1e-12)

    @pytest.mark.parametrize("r", [0.5, 3.0, 12.0])
    def test_poisson_profile(self, r):
        assert kernels.kernel_value(1.0, 1, r) == pytest.approx(1 / (math.pi * (1 + r * r)), abs=1e-11)

    def test_gaussian(self):
        assert kernels.kernel_value(2.0, 1, 2.0) == pytest.approx(math.exp(-1) / math.sqrt(4 * math.pi), abs=1e-12)
        assert kernels.kernel_value(2.0, 1, 2.0) == pytest.approx(0.103777, abs=1e-6)

    @pytest.mark.parametrize("dim", [2, 3])
    @pytest.mark.parametrize("r", [0.0, 0.7, 4.0])
    def test_gaussian_higher_dims(self, dim, r):
        exact = math.exp(-r * r / 4) / (4 * math.pi) ** (dim / 2)
        assert kernels.kernel_value(2.0, dim, r) == pytest.approx(exact, abs=1e-12)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_poisson_higher_dims(self, dim):
        r = 1.5
        c = {2: 1 / (2 * math.pi), 3: 1 / math.pi**2}[dim]
        exact = c / (1 + r * r) ** ((dim + 1) / 2)
        assert kernels.kernel_value(1.0, dim, r) == pytest.approx(exact, abs=1e-11)

    @pytest.mark.parametrize("s,r", [(3.0, 1.0), (3.0, 4.55), (4.0, 6.0), (2.5, 20.0), (0.5, 3.0)])
    def test_line_against_quadpack(self, s, r):
        assert kernels.kernel_value(s, 1, r) == pytest.approx(oracle_1d(s, r), abs=1e-10)

    @pytest.mark.parametrize("s,r", [(3.0, 2.0), (4.0, 5.1), (2.5, 9.0)])
    def test_plane_against_quadpack(self, s, r):
        assert kernels.kernel_value(s, 2, r) == pytest.approx(oracle_2d(s, r), abs=1e-10)

    @pytest.mark.parametrize("s,r", [(3.0, 0.3), (3.0, 5.0), (4.0, 7.5)])
    def test_space_against_quadpack(self, s, r):
        assert kernels.kernel_value(s, 3, r) == pytest.approx(oracle_3d(s, r), abs=1e-10)

    def test_cubic_kernel_at_radius_eight(self):
        # r = 8 lies between two sign changes of the cubic kernel, where the
        # kernel is small and positive; the algebraic tail has not set in yet.
        v = kernels.kernel_eval(3.0, 1, 8.0)
        assert v.value == pytest.approx(oracle_1d(3.0, 8.0), abs=1e-12)
        assert v.value > 2 * v.error
        roots = kernels.sign_changes(3.0, 1, 10.0)
        assert any(7.5 < a < 8.0 for a in roots) and any(8.0 < a < 8.5 for a in roots)

    def test_cubic_kernel_tail_regime(self):
        r = 40.0
        assert r**4 * math.pi * kernels.kernel_value(3.0, 1, r) == pytest.approx(-6.0, rel=0.05)

    def test_bad_dim(self):
        with pytest.raises(DomainError):
            kernels.kernel_value(2.0, 4, 1.0)
        with pytest.raises(DomainError):
            kernels.kernel_value(0.0, 1, 1.0)


class TestScaling:
    def test_unit_time(self):
        assert kernels.scaled_kernel_value(3.0, 1, 1.0, 2.0) == kernels.kernel_value(3.0, 1, 2.0)

    def test_gaussian_scaling(self):
        assert kernels.scaled_kernel_value(2.0, 1, 4.0, 0.0) == pytest.approx((16 * math.pi) ** -0.5, abs=1e-12)

    def test_quartic_scaling(self):
        expected = 16 ** -0.25 * kernels.kernel_value(4.0, 1, 0.0)
        assert kernels.scaled_kernel_value(4.0, 1, 16.0, 0.0) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("s,tau,r", [(3.0, 2.5, 1.7), (4.0, 0.3, 2.0), (1.5, 5.0, 3.0)])
    def test_self_similarity_against_direct_time(self, s, tau, r):
        assert kernels.scaled_kernel_value(s, 1, tau, r) == pytest.approx(oracle_1d(s, r, tau), abs=1e-10)

    @pytest.mark.parametrize("s", [2.0, 3.0])
    def test_semigroup_by_grid_convolution(self, s):
        grid = RealGrid(100.0, 1024)
        x = grid.axis_points
        radii, inverse = np.unique(np.abs(x), return_inverse=True)
        table = np.array([kernels.kernel_value(s, 1, float(r)) for r in radii])
        K = GridFunction(grid, table[inverse])
        conv = apply_multiplier(K, forward_transform(K).coefficients)
        near = np.abs(x) <= 10.0
        direct = np.array([kernels.scaled_kernel_value(s, 1, 2.0, abs(float(v))) for v in x[near]])
        assert np.max(np.abs(conv.values[near] - direct)) <= 1e-6


class TestPositivityScan:
    def test_stable_range_has_no_negative_values(self):
        prof = kernels.positivity_scan(1.5, 1, 40.0)
        assert prof.min_value >= -1e-9 and not prof.certified_negative

    def test_cubic_is_negative(self):
        prof = kernels.positivity_scan(3.0, 1, 40.0)
        assert prof.certified_negative and prof.min_value < -2 * prof.min_error
        assert prof.min_value == pytest.approx(oracle_1d(3.0, prof.min_location), abs=1e-10)

    def test_planar_quartic_is_negative(self):
        assert kernels.positivity_scan(4.0, 2, 40.0).certified_negative

    def test_sample_bound(self):
        with pytest.raises(DomainError):
            kernels.positivity_scan(3.0, 1, 40.0, n_samples=10)

    def test_profile_serialises(self):
        d = kernels.positivity_scan(3.0, 1, 10.0).to_dict(include_samples=True)
        assert len(d["values"]) == len(d["sample_points"]) and d["certified_negative"]


class TestMasses:
    @pytest.mark.parametrize("s,dim", [(1.0, 1), (2.0, 2), (2.0, 1), (1.0, 3)])
    def test_positive_kernels_have_unit_mass(self, s, dim):
        assert kernels.l1_mass(s, dim) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("s,dim", [(3.0, 1), (4.0, 1), (4.0, 2), (3.0, 3)])
    def test_signed_total_is_one(self, s, dim):
        res = kernels.l1_mass_detail(s, dim)
        assert res.signed_total == pytest.approx(1.0, abs=1e-8)
        assert res.value > 1.0

    def test_quartic_mass_against_fine_trapezoid(self):
        # independent route: periodic samples of the kernel from the inverse
        # FFT of exp(-xi^4), then the trapezoid rule for |K|
        grid = RealGrid(200.0, 2**20)
        spec = np.exp(-grid.frequency_norm() ** 4).astype(complex)
        K = inverse_transform(SpectrumFunction(grid, spec))
        brute = np.abs(K.values).sum() * grid.spacing
        assert kernels.l1_mass(4.0, 1) == pytest.approx(brute, abs=1e-6)
        assert kernels.l1_mass(4.0, 1) == pytest.approx(1.2372943854, abs=1e-8)


class TestSecondMoment:
    @pytest.mark.parametrize("s", [4.0, 6.0, 2.5, 3.0])
    def test_vanishes_beyond_two(self, s):
        assert abs(kernels.second_moment(s, 1)) <= 1e-6

    def test_gaussian_variance(self):
        assert kernels.second_moment(2.0, 1) == pytest.approx(2.0, abs=1e-8)

    def test_divergent_flag(self):
        assert math.isinf(kernels.second_moment(1.5, 1))


class TestPolya:
    def test_limits(self):
        assert kernels.polya_limit(1.0) == pytest.approx(1.0, abs=1e-15)
        assert kernels.polya_limit(3.0) == pytest.approx(-6.0, abs=1e-13)
        assert kernels.polya_limit(2.5) == pytest.approx(special.gamma(3.5) * math.sin(1.25 * math.pi), abs=1e-13)
        assert kernels.polya_limit(2.5) == pytest.approx(-2.349964, abs=1e-6)

    def test_poisson(self):
        assert kernels.polya_rescaled(1.0, 10.0) == pytest.approx(100 / 101, abs=1e-10)

    def test_gaussian_vanishes(self):
        assert abs(kernels.polya_rescaled(2.0, 20.0)) <= 1e-6

    def test_cubic(self):
        assert kernels.polya_rescaled(3.0, 40.0) == pytest.approx(-6.0, rel=0.05)

    @pytest.mark.parametrize("alpha", [1.5, 2.5, 3.0, 3.5])
    @pytest.mark.parametrize("x", [5.0, 20.0, 50.0])
    def test_methods_agree(self, alpha, x):
        a = kernels.polya_rescaled_detail(alpha, x, "oscillatory")
        b = kernels.polya_rescaled_detail(alpha, x, "rotated_contour")
        assert abs(a.value - b.value) <= a.error + b.error

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_contour_small_alpha(self, alpha):
        a = kernels.polya_rescaled(alpha, 7.0, "oscillatory")
        b = kernels.polya_rescaled(alpha, 7.0, "rotated_contour")
        assert a == pytest.approx(b, abs=1e-8)

    def test_invalid_angle(self):
        with pytest.raises(InvalidAngleError):
            kernels.polya_rescaled_detail(3.0, 10.0, "rotated_contour", theta=2.0)
        with pytest.raises(InvalidAngleError):
            kernels.polya_rescaled_detail(0.5, 10.0, "rotated_contour", theta=-0.1)

    def test_small_x_rejected(self):
        with pytest.raises(DomainError):
            kernels.polya_rescaled(3.0, 0.5)


def constant_oracle(alpha, dim):
    """Leading large-r coefficient from the radial Fourier series:
    K ~ alpha 2^(alpha-1) pi^(-d/2-1) sin(pi alpha/2) G((d+alpha)/2) G(alpha/2) r^(-d-alpha)."""
    c = (alpha * 2 ** (alpha - 1) * math.pi ** (-dim / 2 - 1) * math.sin(math.pi * alpha / 2)
         * special.gamma((dim + alpha) / 2) * special.gamma(alpha / 2))
    return c * (2 * math.pi) ** dim


class TestAsymptotics:
    def test_line(self):
        rep = kernels.asymptotic_check(3.0, 1, [20.0, 40.0, 80.0])
        assert rep.stabilized and rep.sign_ok
        assert rep.probes[-1][1] == pytest.approx(-6.0, rel=0.05)

    def test_plane(self):
        rep = kernels.asymptotic_check(2.5, 2, [20.0, 40.0, 80.0])
        assert rep.stabilized and rep.sign_ok and rep.probes[-1][1] < 0
        assert rep.probes[-1][1] == pytest.approx(constant_oracle(2.5, 2), rel=0.02)

    def test_space(self):
        rep = kernels.asymptotic_check(1.0, 3, [10.0, 20.0, 40.0])
        assert rep.stabilized and rep.sign_ok and rep.probes[-1][1] > 0
        assert rep.probes[-1][1] == pytest.approx(constant_oracle(1.0, 3), rel=0.02)

    def test_even_alpha_rejected(self):
        with pytest.raises(DomainError):
            kernels.asymptotic_check(4.0, 1, [10.0, 20.0, 40.0])

    def test_probe_validation(self):
        with pytest.raises(DomainError):
            kernels.asymptotic_check(3.0, 1, [10.0, 20.0])
        with pytest.raises(DomainError):
            kernels.asymptotic_check(3.0, 1, [10.0, 5.0, 40.0])
