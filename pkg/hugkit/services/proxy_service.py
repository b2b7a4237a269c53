"""
Proxy strategies: learnable, static (random or energy-optimized) and
partially learnable (a learned rotation of a fixed base).

Rotations use the Cayley map R = (I - A)(I + A)^-1 of a skew-symmetric A.
"""
import math
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from hugkit.core.exceptions import InvalidInputError, SingularCayleyError
from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import PointConfig
from hugkit.models.proxy_set import ProxySet, ProxyStrategy, rotation_param_count
from hugkit.schemas.optim import OptimConfig
from hugkit.services.geometry_service import normalize_rows, sample_gaussian_sphere

logger = get_logger(__name__)

# Smallest admissible LU pivot of I + A
CAYLEY_PIVOT_TOL = 1e-12


def dimension_for_params(count: int) -> int:
    """Invert count = d(d-1)/2."""
    d = int(round((1 + math.sqrt(1 + 8 * count)) / 2))
    if rotation_param_count(d) != count:
        raise InvalidInputError(f"{count} is not a valid skew parameter count", "rotation_params")
    return d


def skew_from_params(params: np.ndarray, d: Optional[int] = None) -> np.ndarray:
    """Skew-symmetric A with the strict upper triangle filled row-major from params."""
    params = np.asarray(params, dtype=np.float64)
    if d is None:
        d = dimension_for_params(params.shape[0])
    upper = np.zeros((d, d))
    upper[np.triu_indices(d, k=1)] = params
    return upper - upper.T


def _cayley_factor(a: np.ndarray):
    d = a.shape[0]
    lu, piv = lu_factor(np.eye(d) + a)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if smallest < CAYLEY_PIVOT_TOL:
        raise SingularCayleyError(smallest)
    return lu, piv


def cayley_rotation(params: np.ndarray, d: Optional[int] = None) -> np.ndarray:
    """
    Orthogonal matrix (I - A)(I + A)^-1 with det +1.

    Raises:
        SingularCayleyError: If I + A has an LU pivot below 1e-12
    """
    a = skew_from_params(params, d)
    factor = _cayley_factor(a)
    # I - A and (I + A)^-1 commute
    return lu_solve(factor, np.eye(a.shape[0]) - a)


def effective_proxies(ps: ProxySet) -> PointConfig:
    """Base proxies, rotated by R for partially learnable sets and re-normalized."""
    if ps.strategy != ProxyStrategy.PARTIALLY_LEARNABLE:
        return ps.base
    rotation = cayley_rotation(ps.rotation_params, ps.base.d)
    return normalize_rows(ps.base.points @ rotation)


def route_proxy_gradient(ps: ProxySet, grad_proxies: np.ndarray) -> np.ndarray:
    """
    Map a proxy gradient onto the trainable parameters of the strategy.

    Learnable proxies get the gradient unchanged, static proxies a zero
    gradient, partially learnable proxies the chain-rule gradient with
    respect to the rotation parameters.
    """
    grad_proxies = np.asarray(grad_proxies, dtype=np.float64)
    if grad_proxies.shape != ps.base.points.shape:
        raise InvalidInputError(
            f"gradient shape {grad_proxies.shape} != proxies {ps.base.points.shape}", "grad_proxies"
        )
    if ps.strategy == ProxyStrategy.LEARNABLE:
        return grad_proxies
    if ps.strategy.is_static:
        return np.zeros_like(grad_proxies)

    d = ps.base.d
    a = skew_from_params(ps.rotation_params, d)
    factor = _cayley_factor(a)
    inverse = lu_solve(factor, np.eye(d))
    rotation = inverse @ (np.eye(d) - a)
    # dR = -(I + R) dA (I + A)^-1, so dL/dA_ij = -(T_ij - T_ji)
    t = (ps.base.points @ (np.eye(d) + rotation)).T @ grad_proxies @ inverse.T
    iu, ju = np.triu_indices(d, k=1)
    return -(t[iu, ju] - t[ju, iu])


def init_proxies(
    strategy: ProxyStrategy,
    num_classes: int,
    dim: int,
    seed: int,
    cfg: Optional[OptimConfig] = None
) -> ProxySet:
    """
    Build the initial proxy set for a strategy.

    StaticRandom and Learnable draw Gaussian directions; StaticOptimized
    minimizes the s=2 Riesz energy first; PartiallyLearnable starts from
    an optimized base with zero rotation parameters.
    """
    strategy = ProxyStrategy(strategy)
    if num_classes < 2 or dim < 2:
        raise InvalidInputError(f"need C >= 2 and d >= 2, got C={num_classes}, d={dim}")

    if strategy in (ProxyStrategy.LEARNABLE, ProxyStrategy.STATIC_RANDOM):
        return ProxySet(base=sample_gaussian_sphere(num_classes, dim, seed), strategy=strategy)

    from hugkit.services.optim_service import default_energy_config, minimize_energy

    if cfg is None:
        cfg = default_energy_config(seed=seed)
    minimum = minimize_energy(num_classes, dim, 2.0, cfg)
    logger.debug(
        f"Optimized {num_classes} proxies in R^{dim}: energy {minimum.energy:.6g}",
        extra={"details": {"strategy": strategy.value}}
    )

    params = None
    if strategy == ProxyStrategy.PARTIALLY_LEARNABLE:
        params = np.zeros(rotation_param_count(dim))
    return ProxySet(base=minimum.config, strategy=strategy, rotation_params=params)
