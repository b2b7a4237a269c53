import numpy as np
import pytest

from hugkit.core.exceptions import (
    DegenerateMeanError,
    EmptyClassError,
    InvalidInputError,
    ZeroRowError,
)
from hugkit.models.geometry import Labels, PointConfig, RawMatrix
from hugkit.models.state import LabeledState
from hugkit.services.geometry_service import (
    class_means,
    derive_seed,
    normalize_rows,
    pairwise_sq_dists,
    random_rotation,
    resultant_norm,
    sample_gaussian_sphere,
    tangent_project,
)


class TestPointConfig:
    def test_rejects_rows_off_the_sphere(self):
        with pytest.raises(InvalidInputError):
            PointConfig(points=[[1.0, 0.0], [0.5, 0.5]])

    def test_rejects_one_dimensional_ambient_space(self):
        with pytest.raises(InvalidInputError):
            PointConfig(points=[[1.0], [-1.0]])

    def test_rejects_non_finite_entries(self):
        with pytest.raises(InvalidInputError):
            RawMatrix(entries=[[np.nan, 1.0]])

    def test_arrays_are_read_only(self):
        config = PointConfig(points=[[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            config.points[0, 0] = 2.0

    def test_document_round_trip(self):
        config = sample_gaussian_sphere(5, 3, seed=1)
        again = PointConfig.from_document(config.to_document())
        np.testing.assert_array_equal(again.points, config.points)

    def test_document_with_wrong_count(self):
        doc = {"n": 3, "d": 2, "points": [[1.0, 0.0], [0.0, 1.0]]}
        with pytest.raises(InvalidInputError):
            PointConfig.from_document(doc)


class TestLabels:
    def test_from_counts_orders_by_class(self):
        labels = Labels.from_counts([2, 1, 3])
        assert labels.y.tolist() == [0, 0, 1, 2, 2, 2]
        assert labels.counts.tolist() == [2, 1, 3]
        assert [s.tolist() for s in labels.index_sets()] == [[0, 1], [2], [3, 4, 5]]

    def test_empty_class(self):
        with pytest.raises(EmptyClassError) as info:
            Labels(y=[0, 0, 2], num_classes=3)
        assert info.value.details["class_index"] == 1

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            Labels(y=[0, 3], num_classes=2)

    def test_rejects_fractional_labels(self):
        with pytest.raises(InvalidInputError):
            Labels(y=[0.5, 1.0], num_classes=2)


class TestLabeledState:
    def test_mixed_kinds_rejected(self):
        labels = Labels.from_counts([1, 1])
        with pytest.raises(InvalidInputError):
            LabeledState(
                features=PointConfig(points=[[1.0, 0.0], [0.0, 1.0]]),
                labels=labels,
                proxies=RawMatrix(entries=[[1.0, 0.0], [0.0, 1.0]]),
            )

    def test_proxy_count_must_match_classes(self):
        labels = Labels.from_counts([1, 1])
        with pytest.raises(InvalidInputError):
            LabeledState(
                features=PointConfig(points=[[1.0, 0.0], [0.0, 1.0]]),
                labels=labels,
                proxies=PointConfig(points=[[1.0, 0.0]]),
            )

    def test_with_arrays_keeps_labels(self, small_state):
        moved = small_state.with_arrays(features=-small_state.X)
        np.testing.assert_array_equal(moved.X, -small_state.X)
        np.testing.assert_array_equal(moved.W, small_state.W)
        assert moved.labels is small_state.labels


class TestSphereOperations:
    def test_normalize_rows_preserves_order(self):
        config = normalize_rows(np.array([[3.0, 4.0], [0.0, -2.0]]))
        np.testing.assert_allclose(config.points, [[0.6, 0.8], [0.0, -1.0]])

    def test_normalize_rows_zero_row(self):
        with pytest.raises(ZeroRowError) as info:
            normalize_rows(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert info.value.index == 1

    def test_sampling_is_reproducible(self):
        a = sample_gaussian_sphere(20, 4, seed=11)
        b = sample_gaussian_sphere(20, 4, seed=11)
        c = sample_gaussian_sphere(20, 4, seed=12)
        np.testing.assert_array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)

    def test_derive_seed(self):
        assert derive_seed(5, 3) == 6
        assert derive_seed(-1, 0) == 2 ** 64 - 1

    def test_tangent_project_is_orthogonal(self):
        base = np.array([0.0, 0.0, 1.0])
        projected = tangent_project(base, np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(projected, [1.0, 2.0, 0.0])

    def test_pairwise_sq_dists_match_inner_products(self):
        config = sample_gaussian_sphere(6, 3, seed=2)
        expected = 2.0 - 2.0 * config.points @ config.points.T
        np.testing.assert_allclose(pairwise_sq_dists(config), expected, atol=1e-12)
        assert np.all(np.diag(pairwise_sq_dists(config)) == 0.0)

    def test_random_rotation(self):
        q = random_rotation(4, seed=3)
        np.testing.assert_allclose(q @ q.T, np.eye(4), atol=1e-12)
        assert np.linalg.det(q) == pytest.approx(1.0)

    def test_resultant_norm_of_antipodes(self):
        assert resultant_norm(np.array([[1.0, 0.0], [-1.0, 0.0]])) == 0.0


class TestClassMeans:
    def test_centered_means_of_collapsed_state(self, collapsed_state):
        means = class_means(collapsed_state.features, collapsed_state.labels)
        np.testing.assert_allclose(means.means.entries, collapsed_state.W, atol=1e-12)
        np.testing.assert_allclose(means.global_mean, 0.0, atol=1e-12)
        np.testing.assert_allclose(means.normalized_means.points, collapsed_state.W, atol=1e-12)

    def test_degenerate_centered_mean(self):
        features = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        labels = Labels.from_counts([2, 2])
        with pytest.raises(DegenerateMeanError):
            class_means(features, labels)
