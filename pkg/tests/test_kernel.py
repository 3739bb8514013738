import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulombgas.kernel import (
    CollisionError,
    Configuration,
    GasParameters,
    Quadratic,
    RadialCustom,
    SphericalLog,
    c_d,
    coulomb_g,
    coulomb_grad,
    energy_delta,
    energy_total,
    gradient_energy,
)


def random_config(rng, n, d, min_sep=0.1):
    while True:
        pts = rng.standard_normal((n, d))
        diff = pts[:, None, :] - pts[None, :, :]
        r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(r, np.inf)
        if r.min() >= min_sep:
            return Configuration(pts)


class TestCoulombKernel:
    def test_point_values(self):
        assert coulomb_g(3, [1.0, 0.0, 0.0]) == pytest.approx(1.0)
        assert coulomb_g(2, [1.0, 0.0]) == pytest.approx(0.0)
        assert coulomb_g(4, [2.0, 0.0, 0.0, 0.0]) == pytest.approx(0.125)

    def test_origin_raises(self):
        with pytest.raises(CollisionError):
            coulomb_g(2, [0.0, 0.0])
        with pytest.raises(CollisionError):
            coulomb_grad(3, [0.0, 0.0, 0.0])

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            coulomb_g(1, [1.0])

    @pytest.mark.parametrize(
        "d,x,expected",
        [
            (2, [1.0, 0.0], [-1.0, 0.0]),
            (3, [0.0, 0.0, 2.0], [0.0, 0.0, -0.25]),
        ],
    )
    def test_gradient_values(self, d, x, expected):
        assert coulomb_grad(d, x) == pytest.approx(expected)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        for d in (2, 3, 4):
            for _ in range(5):
                x = rng.standard_normal(d)
                x /= max(0.5, np.linalg.norm(x))
                g = coulomb_grad(d, x)
                h = 1e-6
                for k in range(d):
                    e = np.zeros(d)
                    e[k] = h
                    fd = (coulomb_g(d, x + e) - coulomb_g(d, x - e)) / (2 * h)
                    assert g[k] == pytest.approx(fd, abs=1e-6)

    @given(st.integers(2, 5), st.lists(st.floats(-3, 3), min_size=5, max_size=5))
    @settings(max_examples=50, deadline=None)
    def test_gradient_odd_symmetry(self, d, coords):
        x = np.array(coords[:d])
        if np.linalg.norm(x) < 1e-3:
            return
        assert coulomb_grad(d, -x) == pytest.approx(-coulomb_grad(d, x))

    @pytest.mark.parametrize("d", [2, 3])
    def test_harmonic_away_from_origin(self, d):
        # discrete Laplacian at step 1e-3 stays below 1e-4 off the singularity
        rng = np.random.default_rng(1)
        h = 1e-3
        for _ in range(10):
            x = rng.standard_normal(d)
            x *= (1.0 + rng.random()) / np.linalg.norm(x)
            lap = 0.0
            for k in range(d):
                e = np.zeros(d)
                e[k] = h
                lap += (coulomb_g(d, x + e) + coulomb_g(d, x - e) - 2 * coulomb_g(d, x)) / h**2
            assert abs(lap) < 1e-4


class TestPoissonConstant:
    def test_known_values(self):
        assert c_d(2) == pytest.approx(2 * math.pi)
        assert c_d(3) == pytest.approx(4 * math.pi)
        assert c_d(4) == pytest.approx(2 * math.pi**2)

    def test_recursive_ball_volume(self):
        # omega_d = pi^{d/2} / Gamma(d/2 + 1), c_d = d * omega_d
        for d in range(2, 9):
            omega = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
            assert c_d(d) == pytest.approx(d * omega, rel=1e-12)


class TestPotentials:
    def test_quadratic_identities(self):
        rng = np.random.default_rng(2)
        for d in (2, 3):
            v = Quadratic(0.7)
            for _ in range(5):
                x = rng.standard_normal(d)
                assert v.value(x) == pytest.approx(0.7 * x @ x)
                assert v.grad(x) == pytest.approx(2 * 0.7 * x)
                assert v.laplacian(x) == pytest.approx(2 * 0.7 * d)

    def test_quadratic_laplacian_by_finite_differences(self):
        v = Quadratic(1.3)
        x = np.array([0.4, -0.2])
        h = 1e-4
        lap = sum(
            (v.value(x + h * e) + v.value(x - h * e) - 2 * v.value(x)) / h**2
            for e in np.eye(2)
        )
        assert lap == pytest.approx(v.laplacian(x), rel=1e-5)

    def test_spherical_log_binds_prefactor_at_construction(self):
        p = GasParameters(2, 4, 2.0, SphericalLog())
        assert p.potential.prefactor == pytest.approx(5 / 4)
        explicit = GasParameters(2, 4, 2.0, SphericalLog(prefactor=3.0))
        assert explicit.potential.prefactor == 3.0

    def test_spherical_log_gradient_and_laplacian_fd(self):
        v = SphericalLog(prefactor=1.5)
        x = np.array([0.3, -0.8])
        h = 1e-5
        fd_grad = [
            (v.value(x + h * e) - v.value(x - h * e)) / (2 * h) for e in np.eye(2)
        ]
        assert v.grad(x) == pytest.approx(fd_grad, abs=1e-8)
        lap = sum(
            (v.value(x + h * e) + v.value(x - h * e) - 2 * v.value(x)) / h**2
            for e in np.eye(2)
        )
        assert lap == pytest.approx(v.laplacian(x), abs=1e-5)

    def test_radial_custom(self):
        v = RadialCustom(h=lambda r: r**4, h_prime=lambda r: 4 * r**3, h_second=lambda r: 12 * r**2)
        x = np.array([1.0, 1.0])
        r = math.sqrt(2.0)
        assert v.value(x) == pytest.approx(r**4)
        assert v.grad(x) == pytest.approx(4 * r**3 * x / r)
        assert v.laplacian(x) == pytest.approx(12 * r**2 + 4 * r**3 / r)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            Quadratic(0.0)
        with pytest.raises(ValueError):
            GasParameters(2, 0, 1.0)
        with pytest.raises(ValueError):
            GasParameters(2, 3, -1.0)
        with pytest.raises(ValueError):
            GasParameters(1, 3, 1.0)


class TestEnergy:
    def test_single_particle_has_no_pair_term(self):
        p = GasParameters(2, 1, 1.0, Quadratic(0.5))
        cfg = Configuration([[2.0, 1.0]])
        assert energy_total(cfg, p) == pytest.approx(0.5 * 5.0)

    def test_two_particle_hand_value(self):
        p = GasParameters(2, 2, 1.0, Quadratic(0.5))
        cfg = Configuration([[0.0, 0.0], [1.0, 0.0]])
        # 2 * (0 + 1/2) + log 1 = 1
        assert energy_total(cfg, p) == pytest.approx(1.0)

    @pytest.mark.parametrize("d", [2, 3])
    def test_matches_bruteforce_double_loop(self, d):
        rng = np.random.default_rng(3)
        p = GasParameters(d, 6, 2.0, Quadratic(0.5))
        cfg = random_config(rng, 6, d)
        brute = 6 * sum(p.potential.value(x) for x in cfg.points)
        for i in range(6):
            for j in range(i + 1, 6):
                brute += coulomb_g(d, cfg.points[i] - cfg.points[j])
        assert energy_total(cfg, p) == pytest.approx(brute, rel=1e-12)

    def test_permutation_invariance_exact(self):
        rng = np.random.default_rng(4)
        p = GasParameters(2, 5, 1.0, Quadratic(0.5))
        cfg = random_config(rng, 5, 2)
        base = energy_total(cfg, p)
        for _ in range(5):
            perm = rng.permutation(5)
            # same pair set, so equal up to summation order
            assert energy_total(Configuration(cfg.points[perm]), p) == pytest.approx(
                base, rel=1e-12
            )

    def test_collision_raises(self):
        p = GasParameters(2, 2, 1.0)
        cfg = Configuration([[0.1, 0.2], [0.1, 0.2]])
        with pytest.raises(CollisionError):
            energy_total(cfg, p)


class TestEnergyDelta:
    def test_null_move_is_zero(self):
        rng = np.random.default_rng(5)
        p = GasParameters(2, 4, 1.0, Quadratic(0.5))
        cfg = random_config(rng, 4, 2)
        assert energy_delta(cfg, 2, cfg.points[2], p) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("d", [2, 3])
    def test_thousand_random_moves_match_recompute(self, d):
        rng = np.random.default_rng(6)
        p = GasParameters(d, 8, 2.0, Quadratic(0.5))
        cfg = random_config(rng, 8, d)
        e = energy_total(cfg, p)
        for _ in range(1000):
            i = int(rng.integers(8))
            x_new = cfg.points[i] + 0.3 * rng.standard_normal(d)
            try:
                delta = energy_delta(cfg, i, x_new, p)
            except CollisionError:
                continue
            cfg.points[i] = x_new
            e_new = energy_total(cfg, p)
            assert delta == pytest.approx(e_new - e, rel=1e-10, abs=1e-10)
            e = e_new

    def test_two_deltas_telescope(self):
        rng = np.random.default_rng(7)
        p = GasParameters(2, 5, 1.0, Quadratic(0.5))
        cfg = random_config(rng, 5, 2)
        e0 = energy_total(cfg, p)
        d1 = energy_delta(cfg, 0, cfg.points[0] + [0.1, -0.05], p)
        cfg.points[0] += [0.1, -0.05]
        d2 = energy_delta(cfg, 3, cfg.points[3] + [-0.07, 0.02], p)
        cfg.points[3] += [-0.07, 0.02]
        assert energy_total(cfg, p) - e0 == pytest.approx(d1 + d2, rel=1e-10)

    def test_collision_proposal_raises(self):
        p = GasParameters(2, 2, 1.0)
        cfg = Configuration([[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(CollisionError):
            energy_delta(cfg, 0, [1.0, 0.0], p)


class TestGradient:
    def test_single_particle_quadratic(self):
        p = GasParameters(2, 1, 1.0, Quadratic(0.5))
        cfg = Configuration([[2.0, 0.0]])
        assert gradient_energy(cfg, p).ravel() == pytest.approx([2.0, 0.0])

    def test_symmetric_pair_is_antisymmetric(self):
        p = GasParameters(2, 2, 1.0, Quadratic(0.5))
        cfg = Configuration([[0.7, -0.2], [-0.7, 0.2]])
        g = gradient_energy(cfg, p)
        assert g[0] == pytest.approx(-g[1], rel=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_matches_finite_differences(self, d):
        rng = np.random.default_rng(8)
        p = GasParameters(d, 6, 2.0, Quadratic(0.5))
        cfg = random_config(rng, 6, d)
        g = gradient_energy(cfg, p)
        h = 1e-5
        for i in range(6):
            for k in range(d):
                pts_p = cfg.points.copy()
                pts_m = cfg.points.copy()
                pts_p[i, k] += h
                pts_m[i, k] -= h
                fd = (
                    energy_total(Configuration(pts_p), p)
                    - energy_total(Configuration(pts_m), p)
                ) / (2 * h)
                assert g[i, k] == pytest.approx(fd, abs=1e-4)


class TestConfiguration:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Configuration([[np.nan, 0.0]])

    def test_copy_is_independent(self):
        cfg = Configuration([[1.0, 2.0]], 3.0)
        other = cfg.copy()
        other.points[0, 0] = 9.0
        assert cfg.points[0, 0] == 1.0
        assert other.cached_energy == 3.0
