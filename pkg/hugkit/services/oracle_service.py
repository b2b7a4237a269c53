"""
Independent ground truth for the optimizer and the diagnostics: closed-form
optima, canonical configurations, a derivative-free minimizer, central
finite differences and Monte Carlo continuous energies.
"""
import math
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.linalg import helmert

from hugkit.core.config import settings
from hugkit.core.exceptions import DimensionTooSmallError, DivergentError, InvalidInputError
from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import PointConfig
from hugkit.services.energy_service import riesz_energy
from hugkit.services.geometry_service import derive_seed, make_rng, project_rows

logger = get_logger(__name__)

# Largest n*d handled by brute_force_min_energy
BRUTE_FORCE_MAX_SIZE = 64

MC_BATCH = 100_000


def _sign(s: float) -> float:
    if s == 0:
        raise InvalidInputError("Riesz exponent must be nonzero", "s")
    return 1.0 if s > 0 else -1.0


def etf_config(num_classes: int, dim: int) -> PointConfig:
    """
    Canonical simplex ETF of C points in R^d.

    Vertices are the columns of the Helmert basis of the sum-zero subspace of
    R^C, scaled to unit length and padded with zeros to d coordinates.

    Raises:
        DimensionTooSmallError: If C > d + 1
    """
    if num_classes < 2:
        raise InvalidInputError(f"need C >= 2, got {num_classes}", "C")
    if num_classes > dim + 1:
        raise DimensionTooSmallError(num_classes, dim)
    basis = helmert(num_classes)  # (C-1) x C, orthonormal rows
    vertices = np.sqrt(num_classes / (num_classes - 1)) * basis.T
    points = np.zeros((num_classes, dim))
    points[:, :num_classes - 1] = vertices
    return PointConfig(points=points)


def etf_energy(num_classes: int, s: float) -> float:
    """Riesz s-energy of the C-point ETF: all ordered pairs at distance^2 2C/(C-1)."""
    sq = 2.0 * num_classes / (num_classes - 1)
    return _sign(s) * num_classes * (num_classes - 1) * sq ** (-s / 2.0)


def circle_energy(num_classes: int, s: float = 2.0) -> float:
    """Riesz s-energy of C equally spaced points on the unit circle."""
    if num_classes < 2:
        raise InvalidInputError(f"need C >= 2, got {num_classes}", "C")
    k = np.arange(1, num_classes)
    chords = 4.0 * np.sin(np.pi * k / num_classes) ** 2
    return _sign(s) * num_classes * float(np.sum(chords ** (-s / 2.0)))


def cross_polytope_config(dim: int) -> PointConfig:
    """The 2d vertices e_1, -e_1, e_2, -e_2, ..."""
    if dim < 2:
        raise InvalidInputError(f"need d >= 2, got {dim}", "d")
    eye = np.eye(dim)
    points = np.empty((2 * dim, dim))
    points[0::2] = eye
    points[1::2] = -eye
    return PointConfig(points=points)


def cross_polytope_energy(dim: int, s: float) -> float:
    """Each vertex sees 2d-2 neighbours at distance^2 2 and one antipode at distance^2 4."""
    return _sign(s) * 2 * dim * ((2 * dim - 2) * 2.0 ** (-s / 2.0) + 4.0 ** (-s / 2.0))


def _batched_energy(batch: np.ndarray, s: float) -> np.ndarray:
    """Riesz energies of a stack of configurations (inf where s > 0 and points coincide)."""
    diff = batch[:, :, None, :] - batch[:, None, :, :]
    dist = np.sqrt(np.sum(diff ** 2, axis=-1))
    n = batch.shape[1]
    off = ~np.eye(n, dtype=bool)
    pair = dist[:, off]
    with np.errstate(divide="ignore"):
        terms = np.where(pair > 0, pair ** (-s), np.inf if s > 0 else 0.0)
    return _sign(s) * terms.sum(axis=1)


def brute_force_min_energy(
    n: int,
    d: int,
    s: float,
    budget: Optional[int] = None,
    seed: int = 0,
    steps: Optional[int] = None
) -> Tuple[PointConfig, float]:
    """
    Derivative-free minimum of the Riesz s-energy for small instances.

    Runs `budget` independent (1+1) evolution strategies side by side: every
    step perturbs all points of each candidate, re-normalizes, and keeps the
    move if the energy does not increase. Step widths adapt by the one-fifth
    success rule.

    Args:
        n: Number of points
        d: Ambient dimension
        s: Riesz exponent
        budget: Number of restarts (settings.BRUTE_FORCE_RESTARTS when None)
        seed: Base seed
        steps: Refinement steps (settings.BRUTE_FORCE_STEPS when None)

    Returns:
        Best configuration and its energy
    """
    if n < 2 or d < 2:
        raise InvalidInputError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
    if n * d > BRUTE_FORCE_MAX_SIZE:
        raise InvalidInputError(
            f"brute force is limited to n*d <= {BRUTE_FORCE_MAX_SIZE}, got {n * d}"
        )
    budget = budget or settings.BRUTE_FORCE_RESTARTS
    steps = steps or settings.BRUTE_FORCE_STEPS
    rng = make_rng(seed)

    current = rng.standard_normal((budget, n, d))
    current /= np.linalg.norm(current, axis=-1, keepdims=True)
    energy = _batched_energy(current, s)
    sigma = np.full(budget, 0.3)
    grow, shrink = 1.5, 1.5 ** -0.25

    for _ in range(steps):
        trial = current + sigma[:, None, None] * rng.standard_normal(current.shape)
        trial /= np.linalg.norm(trial, axis=-1, keepdims=True)
        trial_energy = _batched_energy(trial, s)
        better = trial_energy <= energy
        current[better] = trial[better]
        energy[better] = trial_energy[better]
        sigma = np.clip(np.where(better, sigma * grow, sigma * shrink), 1e-12, 1.0)

    best = int(np.argmin(energy))
    config = PointConfig(points=current[best])
    value = riesz_energy(config, s)
    logger.debug(f"brute force n={n} d={d} s={s}: {value:.12g} (restart {best} of {budget})")
    return config, value


def finite_diff_grad(
    f: Callable,
    p: Union[PointConfig, np.ndarray],
    h: float = 1e-5,
    project: bool = True
) -> np.ndarray:
    """
    Central-difference gradient of f at p.

    f receives the same kind of object as p; perturbed configurations are
    passed unchecked since they leave the sphere. With project=True the
    result is tangent-projected row by row for comparison with Riemannian
    gradients.
    """
    on_sphere = isinstance(p, PointConfig)
    base = np.array(p.points if on_sphere else p, dtype=np.float64)

    def evaluate(arr: np.ndarray) -> float:
        return float(f(PointConfig.unchecked(arr) if on_sphere else arr))

    grad = np.zeros_like(base)
    for index in np.ndindex(*base.shape):
        plus = base.copy()
        minus = base.copy()
        plus[index] += h
        minus[index] -= h
        grad[index] = (evaluate(plus) - evaluate(minus)) / (2.0 * h)

    if project:
        grad = project_rows(base, grad)
    return grad


def mc_uniform_pair_energy(
    d: int,
    s: float,
    samples: int = 1_000_000,
    seed: int = 0
) -> Tuple[float, float]:
    """
    Monte Carlo estimate of E sign(s) ||u - v||^(-s) for independent uniform
    u, v on the sphere in R^d.

    Batch b draws from derive_seed(seed, b).

    Returns:
        (estimate, standard error)

    Raises:
        DivergentError: If s >= d - 1
    """
    sign = _sign(s)
    if s >= d - 1:
        raise DivergentError(s, d)
    if samples < 2:
        raise InvalidInputError(f"need at least 2 samples, got {samples}", "samples")

    total = 0.0
    total_sq = 0.0
    remaining = samples
    batch = 0
    while remaining > 0:
        size = min(MC_BATCH, remaining)
        rng = make_rng(derive_seed(seed, batch))
        u = rng.standard_normal((size, d))
        v = rng.standard_normal((size, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        values = sign * np.linalg.norm(u - v, axis=1) ** (-s)
        total += float(values.sum())
        total_sq += float(np.sum(values ** 2))
        remaining -= size
        batch += 1

    mean = total / samples
    variance = max(total_sq / samples - mean ** 2, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(variance / samples)
