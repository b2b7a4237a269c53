"""
Hyperspherical uniformity characterizations: Riesz and logarithmic energies,
separation, and the Gaussian-kernel Gram log-determinant, with analytic
Riemannian gradients.

Energies are double sums over ordered pairs, so the average energy of n
points is E / (n(n-1)).
"""
import enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.linalg import cho_solve, cholesky, LinAlgError

from hugkit.core.config import settings
from hugkit.core.exceptions import CoincidentPointsError, InvalidInputError, SingularGramError
from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import Labels, PointConfig
from hugkit.services.geometry_service import as_array, project_rows, sq_dists

logger = get_logger(__name__)

# Pairs closer than this are treated as coincident
COINCIDENT_TOL = 1e-12

# Smallest admissible squared Cholesky pivot of the Gram matrix
GRAM_PIVOT_TOL = 1e-12


class KernelKind(str, enum.Enum):
    RIESZ = "riesz"
    LOGARITHMIC = "logarithmic"
    GAUSSIAN = "gaussian"


class KernelSpec(BaseModel):
    """
    Pair potential selector.
    """
    kind: KernelKind = Field(default=KernelKind.RIESZ)
    s: Optional[float] = Field(None, description="Riesz exponent (nonzero)")
    epsilon: Optional[float] = Field(None, gt=0, description="Gaussian width")

    model_config = {
        "frozen": True
    }

    @model_validator(mode="after")
    def check_params(self) -> "KernelSpec":
        if self.kind == KernelKind.RIESZ and not self.s:
            raise ValueError("Riesz kernel needs a nonzero exponent s")
        if self.kind == KernelKind.GAUSSIAN and self.epsilon is None:
            raise ValueError("Gaussian kernel needs epsilon")
        return self


# ========== Internal array kernels ==========

def first_coincident_pair(dist: np.ndarray) -> Optional[Tuple[int, int]]:
    """Lexicographically smallest i < j with dist[i, j] below COINCIDENT_TOL."""
    iu, ju = np.triu_indices(dist.shape[0], k=1)
    hits = np.flatnonzero(dist[iu, ju] < COINCIDENT_TOL)
    if hits.size == 0:
        return None
    return int(iu[hits[0]]), int(ju[hits[0]])


def riesz_terms(
    arr: np.ndarray,
    s: float,
    what: str = "points",
    with_grad: bool = True,
    mask: Optional[np.ndarray] = None
) -> Tuple[float, Optional[np.ndarray]]:
    """
    Riesz s-energy of the rows of arr and its Euclidean gradient.

    Works on any finite matrix (rows need not be unit length). For s < 0
    coincident pairs contribute zero energy and a zero subgradient. An
    optional symmetric boolean mask restricts the sum to selected pairs.

    Returns:
        (energy, gradient or None)
    """
    n = arr.shape[0]
    if n < 2:
        return 0.0, np.zeros_like(arr) if with_grad else None

    dist = np.sqrt(sq_dists(arr))
    if mask is not None:
        dist = np.where(mask, dist, np.inf)
    if s > 0:
        pair = first_coincident_pair(dist)
        if pair is not None:
            raise CoincidentPointsError(pair[0], pair[1], what)

    np.fill_diagonal(dist, 1.0)
    live = (dist >= COINCIDENT_TOL) & np.isfinite(dist)
    np.fill_diagonal(live, False)
    safe = np.where(live, dist, 1.0)

    sign = 1.0 if s > 0 else -1.0
    energy = sign * float(np.sum(np.where(live, safe ** (-s), 0.0)))
    if not with_grad:
        return energy, None

    # dE/dp_i = sum_j 2 * sign(s) * (-s) * r^(-s-2) (p_i - p_j)
    weights = np.where(live, -2.0 * abs(s) * safe ** (-s - 2.0), 0.0)
    grad = weights.sum(axis=1)[:, None] * arr - weights @ arr
    return energy, grad


def log_terms(arr: np.ndarray, what: str = "points") -> Tuple[float, np.ndarray]:
    """Logarithmic energy sum_{i != j} -log r_ij and its Euclidean gradient."""
    n = arr.shape[0]
    if n < 2:
        return 0.0, np.zeros_like(arr)
    dist = np.sqrt(sq_dists(arr))
    pair = first_coincident_pair(dist)
    if pair is not None:
        raise CoincidentPointsError(pair[0], pair[1], what)
    np.fill_diagonal(dist, 1.0)
    energy = -float(np.sum(np.log(dist)))
    weights = -2.0 / dist ** 2
    np.fill_diagonal(weights, 0.0)
    grad = weights.sum(axis=1)[:, None] * arr - weights @ arr
    return energy, grad


def log_det_gram_terms(arr: np.ndarray, epsilon: float) -> Tuple[float, np.ndarray]:
    """
    log det G with G_ij = exp(-eps^2 ||p_i - p_j||^2), via Cholesky, and its
    Euclidean gradient -4 eps^2 sum_j (G^-1 o G)_kj (p_k - p_j).
    """
    n = arr.shape[0]
    if n < 2:
        return 0.0, np.zeros_like(arr)

    gram = np.exp(-epsilon ** 2 * sq_dists(arr))
    try:
        lower = cholesky(gram, lower=True)
    except LinAlgError:
        raise SingularGramError()
    pivots = np.diag(lower) ** 2
    if pivots.min() < GRAM_PIVOT_TOL:
        raise SingularGramError(float(pivots.min()))

    value = 2.0 * float(np.sum(np.log(np.diag(lower))))
    inverse = cho_solve((lower, True), np.eye(n))
    weights = inverse * gram
    grad = -4.0 * epsilon ** 2 * (weights.sum(axis=1)[:, None] * arr - weights @ arr)
    return value, grad


def _riesz_parallel(points: np.ndarray, s: float) -> float:
    from hugkit.services.kernels import riesz_row_sums

    sign = 1.0 if s > 0 else -1.0
    return sign * float(np.sum(riesz_row_sums(np.ascontiguousarray(points), float(s), COINCIDENT_TOL)))


# ========== Public operations ==========

def riesz_energy(p: PointConfig, s: float, parallel: Optional[bool] = None) -> float:
    """
    Riesz s-energy sum_i sum_{j != i} sign(s) ||p_i - p_j||^(-s).

    Args:
        p: Point configuration
        s: Nonzero exponent
        parallel: Use the compiled parallel reduction (defaults to
            settings.ENERGY_PARALLEL); not bit-identical to the serial sum

    Raises:
        CoincidentPointsError: For s > 0 when two points coincide
    """
    if s == 0:
        raise InvalidInputError("Riesz exponent must be nonzero", "s")
    arr = as_array(p)
    use_parallel = settings.ENERGY_PARALLEL if parallel is None else parallel
    if use_parallel and arr.shape[0] > 1:
        if s > 0:
            pair = first_coincident_pair(np.sqrt(sq_dists(arr)))
            if pair is not None:
                raise CoincidentPointsError(*pair)
        return _riesz_parallel(arr, s)
    energy, _ = riesz_terms(arr, s, with_grad=False)
    return energy


def riesz_energy_grad(p: PointConfig, s: float) -> np.ndarray:
    """Riemannian gradient of riesz_energy (rows tangent-projected)."""
    if s == 0:
        raise InvalidInputError("Riesz exponent must be nonzero", "s")
    arr = as_array(p)
    _, grad = riesz_terms(arr, s)
    return project_rows(arr, grad)


def average_energy(p: PointConfig, s: float) -> float:
    """Riesz energy divided by the number of ordered pairs."""
    n = as_array(p).shape[0]
    return riesz_energy(p, s) / (n * (n - 1))


def log_energy(p: PointConfig) -> float:
    """Logarithmic energy sum_{i != j} -log ||p_i - p_j||."""
    energy, _ = log_terms(as_array(p))
    return energy


def log_energy_grad(p: PointConfig) -> np.ndarray:
    arr = as_array(p)
    _, grad = log_terms(arr)
    return project_rows(arr, grad)


def _extreme_pair(p: PointConfig, largest: bool) -> Tuple[float, Tuple[int, int]]:
    arr = as_array(p)
    if arr.shape[0] < 2:
        raise InvalidInputError("need at least two points", "points")
    iu, ju = np.triu_indices(arr.shape[0], k=1)
    dist = np.sqrt(sq_dists(arr))[iu, ju]
    # argmin/argmax return the first hit in row-major (i, j) order
    k = int(np.argmax(dist)) if largest else int(np.argmin(dist))
    return float(dist[k]), (int(iu[k]), int(ju[k]))


def separation(p: PointConfig) -> Tuple[float, Tuple[int, int]]:
    """Minimum pairwise distance and the lexicographically first pair achieving it."""
    return _extreme_pair(p, largest=False)


def max_pair_distance(p: PointConfig) -> Tuple[float, Tuple[int, int]]:
    """Maximum pairwise distance and the lexicographically first pair achieving it."""
    return _extreme_pair(p, largest=True)


def log_det_gram(p: PointConfig, epsilon: float) -> float:
    """
    Log-determinant of the Gaussian kernel Gram matrix.

    Raises:
        SingularGramError: If a Cholesky pivot falls below 1e-12
    """
    value, _ = log_det_gram_terms(as_array(p), epsilon)
    return value


def log_det_gram_grad(p: PointConfig, epsilon: float) -> np.ndarray:
    """Riemannian gradient of log_det_gram."""
    arr = as_array(p)
    _, grad = log_det_gram_terms(arr, epsilon)
    return project_rows(arr, grad)


def reverse_energy(features: PointConfig, labels: Labels) -> float:
    """Sum over classes of all ordered intra-class pair distances."""
    arr = as_array(features)
    total = 0.0
    for members in labels.index_sets():
        if members.size > 1:
            total += float(np.sum(np.sqrt(sq_dists(arr[members]))))
    return total


def kernel_energy(p: PointConfig, kernel: KernelSpec) -> float:
    """Energy of p under the selected kernel (Gaussian returns log det G)."""
    if kernel.kind == KernelKind.RIESZ:
        return riesz_energy(p, kernel.s)
    if kernel.kind == KernelKind.LOGARITHMIC:
        return log_energy(p)
    return log_det_gram(p, kernel.epsilon)
