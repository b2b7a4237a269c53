import math

import numpy as np
import pytest

from hugkit.core.exceptions import DimensionTooSmallError, DivergentError, InvalidInputError
from hugkit.models.geometry import PointConfig
from hugkit.services.energy_service import riesz_energy
from hugkit.services.gnc_service import etf_deviation
from hugkit.services.oracle_service import (
    brute_force_min_energy,
    circle_energy,
    cross_polytope_config,
    cross_polytope_energy,
    etf_config,
    etf_energy,
    finite_diff_grad,
    mc_uniform_pair_energy,
)


class TestClosedForms:
    @pytest.mark.parametrize("num_classes, dim", [(2, 2), (3, 2), (4, 3), (5, 8)])
    def test_etf_config(self, num_classes, dim):
        config = etf_config(num_classes, dim)
        assert config.points.shape == (num_classes, dim)
        assert etf_deviation(config) < 1e-12
        assert riesz_energy(config, 2.0) == pytest.approx(etf_energy(num_classes, 2.0), rel=1e-12)

    def test_etf_needs_room(self):
        with pytest.raises(DimensionTooSmallError):
            etf_config(5, 3)

    def test_tetrahedron_energy(self):
        assert etf_energy(4, 2.0) == pytest.approx(4.5)

    def test_circle_energy(self):
        assert circle_energy(3) == pytest.approx(2.0)
        assert circle_energy(10) == pytest.approx(82.5, abs=1e-9)

    def test_cross_polytope(self):
        config = cross_polytope_config(3)
        np.testing.assert_array_equal(config.points[:2], [[1, 0, 0], [-1, 0, 0]])
        assert cross_polytope_energy(3, 2.0) == pytest.approx(13.5)
        assert cross_polytope_energy(2, 2.0) == pytest.approx(circle_energy(4), abs=1e-12)

    def test_negative_exponent_sign(self):
        assert cross_polytope_energy(2, -1.0) == pytest.approx(riesz_energy(cross_polytope_config(2), -1.0))


class TestBruteForce:
    def test_three_points_on_circle(self):
        config, energy = brute_force_min_energy(3, 2, 2.0, budget=16, steps=1500, seed=1)
        assert energy == pytest.approx(2.0, abs=1e-3)
        assert energy == pytest.approx(riesz_energy(config, 2.0))

    def test_size_limit(self):
        with pytest.raises(InvalidInputError):
            brute_force_min_energy(20, 4, 2.0)

    def test_reproducible(self):
        a = brute_force_min_energy(4, 3, 2.0, budget=4, steps=50, seed=9)
        b = brute_force_min_energy(4, 3, 2.0, budget=4, steps=50, seed=9)
        assert a[1] == b[1]


class TestFiniteDifferences:
    def test_plain_array(self):
        x = np.array([1.0, -2.0, 0.5])
        grad = finite_diff_grad(lambda v: float(np.sum(v ** 2)), x, project=False)
        np.testing.assert_allclose(grad, 2.0 * x, rtol=1e-8)

    def test_projected_gradient_is_tangent(self):
        p = PointConfig(points=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        grad = finite_diff_grad(lambda q: float(np.sum(q.points[:, 0])), p)
        np.testing.assert_allclose(grad, [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], atol=1e-9)


class TestMonteCarlo:
    def test_mean_distance_on_s2(self):
        # E ||u - v|| = 4/3 on the 2-sphere
        estimate, error = mc_uniform_pair_energy(3, -1.0, samples=200_000, seed=3)
        assert estimate == pytest.approx(-4.0 / 3.0, abs=0.01)
        assert 0 < error < 0.01

    def test_coulomb_on_s2(self):
        estimate, _ = mc_uniform_pair_energy(3, 1.0, samples=400_000, seed=3)
        assert estimate == pytest.approx(1.0, abs=0.02)

    def test_divergent(self):
        with pytest.raises(DivergentError):
            mc_uniform_pair_energy(3, 2.0)

    def test_reproducible(self):
        assert mc_uniform_pair_energy(4, 1.0, 1000, seed=5) == mc_uniform_pair_energy(4, 1.0, 1000, seed=5)

    def test_mean_is_finite(self):
        estimate, _ = mc_uniform_pair_energy(16, 2.0, 10_000, seed=0)
        assert math.isfinite(estimate) and estimate > 0
