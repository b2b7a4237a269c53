import math

import numpy as np
import pytest
from pydantic import ValidationError

from hugkit.core.exceptions import CoincidentPointsError, InvalidInputError, SingularGramError
from hugkit.models.geometry import Labels, PointConfig
from hugkit.services.energy_service import (
    KernelKind,
    KernelSpec,
    average_energy,
    kernel_energy,
    log_det_gram,
    log_det_gram_grad,
    log_energy,
    log_energy_grad,
    max_pair_distance,
    reverse_energy,
    riesz_energy,
    riesz_energy_grad,
    separation,
)
from hugkit.services.geometry_service import sample_gaussian_sphere
from hugkit.services.oracle_service import cross_polytope_config, finite_diff_grad

from conftest import relative_error

ANTIPODES = PointConfig(points=[[1.0, 0.0], [-1.0, 0.0]])
WITH_DUPLICATE = PointConfig(points=[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


class TestRieszEnergy:
    def test_antipodal_pair(self):
        # two ordered pairs at distance 2
        assert riesz_energy(ANTIPODES, 2.0) == pytest.approx(0.5)
        assert riesz_energy(ANTIPODES, -1.0) == pytest.approx(-4.0)

    def test_cross_polytope(self):
        assert riesz_energy(cross_polytope_config(3), 2.0) == pytest.approx(13.5)

    def test_coincident_points_with_positive_exponent(self):
        with pytest.raises(CoincidentPointsError) as info:
            riesz_energy(WITH_DUPLICATE, 2.0)
        assert info.value.pair == (0, 1)

    def test_coincident_points_with_negative_exponent(self):
        assert riesz_energy(WITH_DUPLICATE, -1.0) == pytest.approx(-4.0 * math.sqrt(2.0))

    def test_zero_exponent(self):
        with pytest.raises(InvalidInputError):
            riesz_energy(ANTIPODES, 0.0)

    def test_single_point(self):
        assert riesz_energy(PointConfig(points=[[0.0, 1.0]]), 2.0) == 0.0

    def test_average_energy(self):
        triangle = PointConfig(points=[
            [1.0, 0.0],
            [-0.5, math.sqrt(3.0) / 2.0],
            [-0.5, -math.sqrt(3.0) / 2.0],
        ])
        assert average_energy(triangle, 2.0) == pytest.approx(1.0 / 3.0)

    @pytest.mark.parametrize("s", [2.0, 1.0, -1.0, -0.5])
    def test_gradient_matches_finite_differences(self, s):
        points = sample_gaussian_sphere(5, 3, seed=4)
        numeric = finite_diff_grad(lambda q: riesz_energy(q, s), points)
        assert relative_error(riesz_energy_grad(points, s), numeric) < 1e-5

    def test_gradient_is_tangent(self):
        points = sample_gaussian_sphere(8, 4, seed=5)
        grad = riesz_energy_grad(points, 2.0)
        np.testing.assert_allclose(np.sum(grad * points.points, axis=1), 0.0, atol=1e-10)


class TestParallelRiesz:
    def test_matches_serial_sum(self):
        points = sample_gaussian_sphere(40, 5, seed=9)
        serial = riesz_energy(points, 2.0, parallel=False)
        assert riesz_energy(points, 2.0, parallel=True) == pytest.approx(serial, rel=1e-12)

    def test_coincident_pair_contributes_zero_for_negative_exponent(self):
        serial = riesz_energy(WITH_DUPLICATE, -1.0, parallel=False)
        assert riesz_energy(WITH_DUPLICATE, -1.0, parallel=True) == pytest.approx(serial, rel=1e-12)
        assert serial == pytest.approx(-4.0 * math.sqrt(2.0))

    def test_coincident_pair_raises_for_positive_exponent(self):
        with pytest.raises(CoincidentPointsError) as info:
            riesz_energy(WITH_DUPLICATE, 1.0, parallel=True)
        assert info.value.pair == (0, 1)


class TestLogEnergy:
    def test_antipodal_pair(self):
        assert log_energy(ANTIPODES) == pytest.approx(-2.0 * math.log(2.0))

    def test_coincident(self):
        with pytest.raises(CoincidentPointsError):
            log_energy(WITH_DUPLICATE)

    def test_gradient_matches_finite_differences(self):
        points = sample_gaussian_sphere(5, 3, seed=6)
        numeric = finite_diff_grad(log_energy, points)
        assert relative_error(log_energy_grad(points), numeric) < 1e-5


class TestSeparation:
    def test_first_pair_wins_ties(self):
        distance, pair = separation(cross_polytope_config(3))
        assert distance == pytest.approx(math.sqrt(2.0))
        assert pair == (0, 2)

    def test_max_pair_distance(self):
        distance, pair = max_pair_distance(cross_polytope_config(3))
        assert distance == pytest.approx(2.0)
        assert pair == (0, 1)

    def test_needs_two_points(self):
        with pytest.raises(InvalidInputError):
            separation(PointConfig(points=[[1.0, 0.0]]))


class TestGramDeterminant:
    def test_two_points(self):
        value = log_det_gram(PointConfig(points=[[1.0, 0.0], [0.0, 1.0]]), 1.0)
        assert value == pytest.approx(math.log(1.0 - math.exp(-4.0)))

    def test_antipodal_pair(self):
        # det = 1 - exp(-8 eps^2)
        value = log_det_gram(ANTIPODES, 0.5)
        assert value == pytest.approx(math.log1p(-math.exp(-2.0)))
        assert value == pytest.approx(-0.145413, abs=1e-6)

    def test_coincident_points_are_singular(self):
        with pytest.raises(SingularGramError):
            log_det_gram(WITH_DUPLICATE, 1.0)

    def test_gradient_matches_finite_differences(self):
        points = sample_gaussian_sphere(4, 3, seed=8)
        numeric = finite_diff_grad(lambda q: log_det_gram(q, 1.0), points)
        assert relative_error(log_det_gram_grad(points, 1.0), numeric) < 1e-5


class TestKernels:
    def test_reverse_energy_sums_ordered_intra_pairs(self):
        features = PointConfig(points=[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        labels = Labels(y=[0, 0, 1], num_classes=2)
        assert reverse_energy(features, labels) == pytest.approx(4.0)

    def test_kernel_dispatch(self):
        points = cross_polytope_config(2)
        assert kernel_energy(points, KernelSpec(kind=KernelKind.RIESZ, s=2.0)) == riesz_energy(points, 2.0)
        assert kernel_energy(points, KernelSpec(kind=KernelKind.LOGARITHMIC)) == log_energy(points)
        gaussian = KernelSpec(kind=KernelKind.GAUSSIAN, epsilon=0.5)
        assert kernel_energy(points, gaussian) == log_det_gram(points, 0.5)

    def test_riesz_kernel_needs_exponent(self):
        with pytest.raises(ValidationError):
            KernelSpec(kind=KernelKind.RIESZ)
