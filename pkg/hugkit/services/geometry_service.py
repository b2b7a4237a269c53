"""
Unit-hypersphere primitives: normalization, sampling, tangent projection,
pairwise distances and class statistics.

Random numbers come from numpy's PCG64 bit generator seeded with a 64-bit
integer, so sampled configurations reproduce across platforms.
"""
from typing import NamedTuple, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from hugkit.core.exceptions import DegenerateMeanError, InvalidInputError, ZeroRowError
from hugkit.models.geometry import Labels, PointConfig, RawMatrix

# Rows shorter than this cannot be normalized
ZERO_NORM_TOL = 1e-12

SEED_MASK = 0xFFFFFFFFFFFFFFFF

MatrixLike = Union[PointConfig, RawMatrix, np.ndarray]


class ClassMeans(NamedTuple):
    means: RawMatrix
    normalized_means: PointConfig
    global_mean: np.ndarray


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def derive_seed(seed: int, index: int) -> int:
    """Split rule for independent streams: seed XOR index, masked to 64 bits."""
    return (int(seed) ^ int(index)) & SEED_MASK


def as_array(m: MatrixLike) -> np.ndarray:
    if isinstance(m, (PointConfig, RawMatrix)):
        return m.array
    return np.asarray(m, dtype=np.float64)


def normalize_array(arr: np.ndarray) -> np.ndarray:
    """Row-normalize an array, raising ZeroRowError on the first short row."""
    norms = np.linalg.norm(arr, axis=1)
    short = np.flatnonzero(norms < ZERO_NORM_TOL)
    if short.size:
        raise ZeroRowError(int(short[0]))
    return arr / norms[:, None]


def normalize_rows(m: MatrixLike) -> PointConfig:
    """
    Project every row onto the unit sphere.

    Args:
        m: Raw matrix (row order is preserved)

    Returns:
        PointConfig of the normalized rows

    Raises:
        ZeroRowError: If a row norm is below 1e-12
    """
    return PointConfig(points=normalize_array(as_array(m)))


def sample_gaussian_sphere(n: int, d: int, seed: int) -> PointConfig:
    """
    Sample n i.i.d. uniform points on the sphere in R^d.

    Rows are standard Gaussian vectors normalized to unit length.
    """
    if n < 1 or d < 2:
        raise InvalidInputError(f"need n >= 1 and d >= 2, got n={n}, d={d}")
    rng = make_rng(seed)
    return normalize_rows(rng.standard_normal((n, d)))


def random_rotation(d: int, seed: int) -> np.ndarray:
    """Haar-random orthogonal matrix with determinant +1."""
    rng = make_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def sq_dists(arr: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance matrix of the rows (exact zeros on duplicates)."""
    if arr.shape[0] < 2:
        return np.zeros((arr.shape[0], arr.shape[0]))
    return squareform(pdist(arr, "sqeuclidean"))


def pairwise_sq_dists(p: PointConfig) -> np.ndarray:
    """
    Squared chordal distances between all points.

    Returns:
        Symmetric n x n matrix with zero diagonal and entries in [0, 4]
    """
    return np.clip(sq_dists(p.points), 0.0, 4.0)


def tangent_project(base: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Remove the component of g along the unit vector base."""
    base = np.asarray(base, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return g - np.dot(g, base) * base


def project_rows(points: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """Row-wise tangent projection of grads at points."""
    radial = np.einsum("ij,ij->i", grads, points)
    return grads - radial[:, None] * points


def raw_class_means(arr: np.ndarray, labels: Labels) -> np.ndarray:
    """Per-class averages of the rows of arr (C x d).

    Raises:
        EmptyClassError: If a class has no samples
    """
    labels.require_populated()
    sums = np.zeros((labels.num_classes, arr.shape[1]))
    np.add.at(sums, labels.y, arr)
    return sums / labels.counts[:, None]


def class_means(features: MatrixLike, labels: Labels) -> ClassMeans:
    """
    Class means, their centered normalizations and the global mean.

    Raises:
        DegenerateMeanError: If a centered class mean has norm below 1e-12
    """
    arr = as_array(features)
    means = raw_class_means(arr, labels)
    global_mean = arr.mean(axis=0)
    centered = means - global_mean
    norms = np.linalg.norm(centered, axis=1)
    degenerate = np.flatnonzero(norms < ZERO_NORM_TOL)
    if degenerate.size:
        raise DegenerateMeanError(int(degenerate[0]))
    return ClassMeans(
        means=RawMatrix(entries=means),
        normalized_means=PointConfig(points=centered / norms[:, None]),
        global_mean=global_mean,
    )


def resultant_norm(p: MatrixLike) -> float:
    """Norm of the average row."""
    return float(np.linalg.norm(as_array(p).mean(axis=0)))
