"""
Shared pieces of the loss family: the result type and distance-term helpers.
"""
from typing import Tuple

import numpy as np
from scipy.special import logsumexp, softmax

from hugkit.models.base import ArrayModel
from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.energy_service import COINCIDENT_TOL
from hugkit.services.geometry_service import project_rows


class LossResult(ArrayModel):
    """
    Loss value, its additive terms and gradients.

    value = inter_term + intra_term + penalty_term. grad_proxies_intra is
    the part of grad_proxies that comes from the intra-class term.
    """
    value: float
    inter_term: float
    intra_term: float
    penalty_term: float = 0.0
    grad_features: np.ndarray
    grad_proxies: np.ndarray
    grad_proxies_intra: np.ndarray

    @property
    def grad_norm(self) -> float:
        return float(np.sqrt(np.sum(self.grad_features ** 2) + np.sum(self.grad_proxies ** 2)))


def finish(
    state: LabeledState,
    inter: float,
    intra: float,
    grad_features: np.ndarray,
    grad_proxies_inter: np.ndarray,
    grad_proxies_intra: np.ndarray,
    penalty: float = 0.0,
    project: bool = True
) -> LossResult:
    """Assemble a LossResult, tangent-projecting gradients for sphere states."""
    if project:
        grad_features = project_rows(state.X, grad_features)
        grad_proxies_inter = project_rows(state.W, grad_proxies_inter)
        grad_proxies_intra = project_rows(state.W, grad_proxies_intra)
    return LossResult(
        value=float(inter + intra + penalty),
        inter_term=float(inter),
        intra_term=float(intra),
        penalty_term=float(penalty),
        grad_features=grad_features,
        grad_proxies=grad_proxies_inter + grad_proxies_intra,
        grad_proxies_intra=grad_proxies_intra,
    )


def unit_differences(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row distances ||a_i - b_i|| and the unit directions (a_i - b_i)/||.||.

    Directions of coincident rows are zero (a valid subgradient).
    """
    diff = a - b
    dist = np.linalg.norm(diff, axis=1)
    live = dist >= COINCIDENT_TOL
    direction = np.zeros_like(diff)
    direction[live] = diff[live] / dist[live, None]
    return dist, direction


def anchor_distance_terms(
    X: np.ndarray,
    W: np.ndarray,
    y: np.ndarray
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    sum_i ||x_i - w_{y_i}|| with gradients for features and proxies.
    """
    dist, direction = unit_differences(X, W[y])
    grad_w = np.zeros_like(W)
    np.add.at(grad_w, y, -direction)
    return float(dist.sum()), direction, grad_w


def extreme_pair_terms(
    arr: np.ndarray,
    largest: bool,
    tau: float = 0.0
) -> Tuple[float, np.ndarray]:
    """
    Minimum (or maximum) pairwise distance of the rows and its gradient.

    With tau = 0 the gradient flows through the lexicographically first
    active pair. With tau > 0 the extreme is replaced by a log-sum-exp
    soft-min/soft-max at temperature tau.
    """
    n = arr.shape[0]
    grad = np.zeros_like(arr)
    if n < 2:
        return 0.0, grad

    iu, ju = np.triu_indices(n, k=1)
    dist, direction = unit_differences(arr[iu], arr[ju])

    if tau == 0.0:
        k = int(np.argmax(dist)) if largest else int(np.argmin(dist))
        grad[iu[k]] += direction[k]
        grad[ju[k]] -= direction[k]
        return float(dist[k]), grad

    sign = 1.0 if largest else -1.0
    value = sign * tau * float(logsumexp(sign * dist / tau))
    weights = softmax(sign * dist / tau)
    weighted = weights[:, None] * direction
    np.add.at(grad, iu, weighted)
    np.add.at(grad, ju, -weighted)
    return value, grad


def apply_stop_gradient(result: LossResult, spec: LossSpec) -> LossResult:
    """
    Drop the intra-class contribution to the proxy gradient when
    spec.stop_gradient_proxies is set; the inter-class part is kept.
    """
    if not spec.stop_gradient_proxies:
        return result
    return result.model_copy(update={
        "grad_proxies": result.grad_proxies - result.grad_proxies_intra,
        "grad_proxies_intra": np.zeros_like(result.grad_proxies_intra),
    })


def zeros_like_proxies(state: LabeledState) -> np.ndarray:
    return np.zeros_like(state.W)

