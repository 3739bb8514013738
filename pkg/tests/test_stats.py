import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulombgas.equilibrium import equilibrium_for
from coulombgas.exactlaws import Gamma, Normal, kostlan_moduli
from coulombgas.stats import (
    EmpiricalMeasure,
    angular_uniformity,
    bivariate_polynomial,
    clt_variance,
    harmonic,
    ks_test,
    ks_two_sample,
    linear_statistic,
    radial_profile,
    sphere_z_uniformity,
    w1_radial,
)


class TestKsTest:
    def test_calibration_under_null(self):
        # fraction of p < 0.05 over 200 replications stays near nominal
        rng = np.random.default_rng(0)
        law = Normal(0.0, 1.0)
        rejections = sum(
            ks_test(law.sample(rng, 200), law).p_value < 0.05 for _ in range(200)
        )
        assert 0.01 <= rejections / 200 <= 0.12

    def test_constant_sample_statistic(self):
        law = Normal(0.0, 1.0)
        c = 0.3
        rep = ks_test(np.full(100, c), law)
        assert rep.statistic == pytest.approx(max(law.cdf(c), 1 - law.cdf(c)), abs=1e-2)

    def test_power_against_shift(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(10_000) + 1.0
        rep = ks_test(x, Normal(0.0, 1.0))
        assert rep.p_value < 1e-6

    def test_needs_eight_samples(self):
        with pytest.raises(ValueError):
            ks_test(np.arange(5), Normal(0.0, 1.0))

    def test_two_sample_symmetry(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal(500)
        b = rng.standard_normal(700) + 0.1
        r1 = ks_two_sample(a, b)
        r2 = ks_two_sample(b, a)
        assert r1.statistic == r2.statistic
        assert r1.p_value == r2.p_value

    def test_two_sample_null(self):
        rng = np.random.default_rng(3)
        r = ks_two_sample(rng.standard_normal(2000), rng.standard_normal(2000))
        assert r.p_value > 0.01


class TestW1Radial:
    def test_atoms_at_origin_against_disc(self):
        # int_0^1 (1 - r^2) dr = 2/3
        disc = equilibrium_for("uniform_disc")
        pts = np.zeros((50, 2))
        assert w1_radial(pts, disc) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_atoms_at_quantiles_nearly_zero(self):
        disc = equilibrium_for("uniform_disc")
        n = 500
        radii = np.array([disc.quantile((i + 0.5) / n) for i in range(n)])
        pts = np.column_stack([radii, np.zeros(n)])
        assert w1_radial(pts, disc) <= 1.0 / n

    def test_calibration_for_disc_samples(self):
        rng = np.random.default_rng(4)
        from coulombgas.equilibrium import sample_equilibrium

        disc = equilibrium_for("uniform_disc")
        pts = sample_equilibrium(disc, 10_000, rng)
        assert w1_radial(pts, disc) <= 0.02

    def test_exactness_against_bruteforce_grid(self):
        # brute-force |F_emp - F| on a fine grid as an independent oracle
        rng = np.random.default_rng(5)
        disc = equilibrium_for("uniform_disc")
        pts = rng.random((40, 2)) * 0.7
        radii = np.sort(np.linalg.norm(pts, axis=1))
        grid = np.linspace(0, 1.0, 200_001)
        f_emp = np.searchsorted(radii, grid, side="right") / radii.size
        f = np.minimum(grid**2, 1.0)
        brute = np.trapezoid(np.abs(f_emp - f), grid)
        assert w1_radial(pts, disc) == pytest.approx(brute, abs=1e-4)

    def test_triangle_inequality_against_intermediate(self):
        rng = np.random.default_rng(6)
        disc = equilibrium_for("uniform_disc")
        for _ in range(100):
            a = rng.random((64, 2)) * 0.9
            b = rng.random((64, 2)) * 0.9
            ra = np.sort(np.linalg.norm(a, axis=1))
            rb = np.sort(np.linalg.norm(b, axis=1))
            w_ab = float(np.mean(np.abs(ra - rb)))  # empirical-empirical W1
            assert w1_radial(a, disc) <= w_ab + w1_radial(b, disc) + 1e-12

    def test_heavy_tail_support(self):
        rng = np.random.default_rng(7)
        from coulombgas.equilibrium import sample_equilibrium

        m = equilibrium_for("spherical_heavy_tail")
        pts = sample_equilibrium(m, 5000, rng)
        val = w1_radial(pts, m)
        assert 0.0 <= val <= 0.1

    def test_nonradial_rejected(self):
        with pytest.raises(ValueError):
            w1_radial(np.zeros((3, 2)), equilibrium_for("semicircle"))


class TestAngularUniformity:
    def test_rotationally_sampled_points_pass(self):
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((5000, 2))
        assert angular_uniformity(pts).p_value > 0.01

    def test_axis_concentration_fails(self):
        pts = np.column_stack([np.linspace(0.5, 1.5, 200), np.zeros(200)])
        assert angular_uniformity(pts).p_value < 1e-6

    def test_rotation_invariance_of_law(self):
        rng = np.random.default_rng(9)
        pts = rng.standard_normal((3000, 2))
        t = 1.234
        rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        d1 = angular_uniformity(pts).statistic
        d2 = angular_uniformity(pts @ rot.T).statistic
        # same points rotated stay compatible with uniformity
        assert abs(d1 - d2) < 0.05
        assert angular_uniformity(pts @ rot.T).p_value > 0.01

    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            angular_uniformity(np.zeros((3, 2)))


class TestTestFunctions:
    @pytest.mark.parametrize(
        "f",
        [
            harmonic(1, "re"),
            harmonic(3, "im"),
            radial_profile(lambda r: r**2, lambda r: 2 * r, "r^2"),
            bivariate_polynomial([[0.0, 1.0], [2.0, -0.5]]),
        ],
        ids=["re_z", "im_z3", "radial_r2", "poly"],
    )
    def test_gradient_matches_finite_differences(self, f):
        rng = np.random.default_rng(10)
        for _ in range(10):
            x = rng.standard_normal(2) * 0.7
            g = f.gradient(x)
            h = 1e-6
            for k in range(2):
                e = np.zeros(2)
                e[k] = h
                fd = (f.value(x + e) - f.value(x - e)) / (2 * h)
                assert g[k] == pytest.approx(fd, abs=1e-6)


class TestCltVariance:
    def test_re_z_is_half(self):
        assert clt_variance(harmonic(1, "re")) == pytest.approx(0.5, abs=1e-8)

    def test_modulus_squared_is_half(self):
        f = radial_profile(lambda r: r * r, lambda r: 2 * r, "|z|^2")
        assert clt_variance(f) == pytest.approx(0.5, abs=1e-8)

    def test_constant_is_zero(self):
        f = bivariate_polynomial([[3.0]])
        assert clt_variance(f) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 4, 8])
    def test_harmonic_half_norm_is_k_over_2(self, k):
        # gradient term of Re z^k over the disc: |grad|^2 = k^2 r^{2k-2},
        # integral k^2 2pi/(2k) = pi k, divided by 4pi gives k/4;
        # boundary term k/2 * (1/4 + 1/4) = k/4; total k/2
        assert clt_variance(harmonic(k, "re")) == pytest.approx(k / 2.0, abs=1e-8)

    def test_radial_functions_have_no_boundary_term(self):
        f = radial_profile(lambda r: math.sin(r), lambda r: math.cos(r), "sin r")
        full = clt_variance(f)
        x, w = np.polynomial.legendre.leggauss(256)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * w
        dirichlet = np.sum(wr * 2 * math.pi * r * np.cos(r) ** 2) / (4 * math.pi)
        assert full == pytest.approx(dirichlet, abs=1e-10)

    def test_invariant_under_adding_constant(self):
        f = harmonic(2, "re")
        g = bivariate_polynomial([[5.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        # g = 5 - y^2 + x^2 = 5 + Re z^2
        assert clt_variance(g) == pytest.approx(clt_variance(f), abs=1e-8)


class TestLinearStatistic:
    def test_constant_function_counts_points(self):
        f = bivariate_polynomial([[1.0]])
        samples = [np.zeros((7, 2)), np.ones((7, 2))]
        assert linear_statistic(samples, f) == pytest.approx([7.0, 7.0])

    def test_accepts_complex_spectra(self):
        f = radial_profile(lambda r: r * r, lambda r: 2 * r, "|z|^2")
        zs = np.array([1.0 + 0.0j, 0.0 + 2.0j])
        assert linear_statistic([zs], f)[0] == pytest.approx(5.0)

    def test_kostlan_variance_matches_gamma(self):
        rng = np.random.default_rng(11)
        n, reps = 64, 4000
        f = radial_profile(lambda r: r * r, lambda r: 2 * r, "|z|^2")
        stats = np.array(
            [float(np.sum((kostlan_moduli(n, rng) / math.sqrt(n)) ** 2)) for _ in range(reps)]
        )
        exact = Gamma(n * (n + 1) / 2.0, float(n)).variance()
        assert stats.var() == pytest.approx(exact, rel=0.1)


class TestSphereUniformity:
    def test_uniform_sphere_passes(self):
        rng = np.random.default_rng(12)
        v = rng.standard_normal((5000, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        assert sphere_z_uniformity(v).p_value > 0.01

    def test_pole_concentration_fails(self):
        v = np.tile([0.0, 0.0, 1.0], (200, 1))
        assert sphere_z_uniformity(v).p_value < 1e-6

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            sphere_z_uniformity(np.full((10, 3), 2.0))


class TestEmpiricalMeasure:
    def test_radii(self):
        em = EmpiricalMeasure(np.array([[3.0, 4.0], [0.0, 1.0]]))
        assert em.radii() == pytest.approx([5.0, 1.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure(np.zeros((0, 2)))


@given(st.integers(10, 200))
@settings(max_examples=20, deadline=None)
def test_w1_nonnegative_property(n):
    rng = np.random.default_rng(n)
    disc = equilibrium_for("uniform_disc")
    pts = rng.random((n, 2))
    assert w1_radial(pts, disc) >= 0.0
