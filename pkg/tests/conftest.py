"""
Shared fixtures: small labeled states on the sphere and canonical configurations.
"""
import numpy as np
import pytest

from hugkit.models.geometry import Labels, PointConfig, RawMatrix
from hugkit.models.state import LabeledState
from hugkit.services.geometry_service import derive_seed, sample_gaussian_sphere
from hugkit.services.oracle_service import etf_config


def make_state(num_classes: int, per_class: int, dim: int, seed: int = 0) -> LabeledState:
    labels = Labels.from_counts([per_class] * num_classes)
    return LabeledState(
        features=sample_gaussian_sphere(labels.n, dim, derive_seed(seed, 0)),
        labels=labels,
        proxies=sample_gaussian_sphere(num_classes, dim, derive_seed(seed, 1)),
    )


@pytest.fixture
def small_state() -> LabeledState:
    """3 classes, 4 samples each, in R^3."""
    return make_state(3, 4, 3, seed=7)


@pytest.fixture
def raw_state(small_state) -> LabeledState:
    """Raw (unnormalized) copy of small_state with uneven row norms."""
    n = small_state.X.shape[0]
    scales = 0.5 + np.arange(n + small_state.num_classes) / 10.0
    return LabeledState(
        features=RawMatrix(entries=small_state.X * scales[:n, None]),
        labels=small_state.labels,
        proxies=RawMatrix(entries=small_state.W * scales[n:, None]),
    )


@pytest.fixture
def collapsed_state() -> LabeledState:
    """Every feature sits on its class proxy; proxies form the 3-point simplex in R^2."""
    proxies = etf_config(3, 2)
    labels = Labels.from_counts([4, 4, 4])
    return LabeledState(
        features=PointConfig(points=proxies.points[labels.y]),
        labels=labels,
        proxies=proxies,
    )


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
    return float(np.linalg.norm(analytic - numeric) / scale)
