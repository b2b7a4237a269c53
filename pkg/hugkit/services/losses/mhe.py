"""
Minimum hyperspherical energy HUG: exact objective and its relaxation.
"""
import numpy as np

from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.energy_service import riesz_terms
from hugkit.services.losses.base import LossResult, anchor_distance_terms, finish


def mhe_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    alpha * E_{s_b}(proxies) - beta * sum_c E_{s_w}(class features + class proxy).

    The class proxy is a member of its class's intra-class point set.

    Raises:
        CoincidentPointsError: When two proxies coincide (s_b > 0)
    """
    X, W = state.X, state.W
    inter, grad_w_inter = riesz_terms(W, spec.s_b, what="proxies")

    intra = 0.0
    grad_x = np.zeros_like(X)
    grad_w_intra = np.zeros_like(W)
    for c, members in enumerate(state.labels.index_sets()):
        block = np.vstack([X[members], W[c:c + 1]])
        energy, grad = riesz_terms(block, spec.s_w, what=f"class {c} points")
        intra += energy
        grad_x[members] += grad[:-1]
        grad_w_intra[c] += grad[-1]

    return finish(
        state,
        inter=spec.alpha * inter,
        intra=-spec.beta * intra,
        grad_features=-spec.beta * grad_x,
        grad_proxies_inter=spec.alpha * grad_w_inter,
        grad_proxies_intra=-spec.beta * grad_w_intra,
    )


def mhe_hug_relaxed(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    alpha * E_{s_b}(proxies) + beta' * sum_i ||x_i - w_{y_i}||.

    Upper-bounds mhe_hug (s_w = -1) once beta' >= 2 * beta * max_c |A_c|.
    """
    X, W = state.X, state.W
    inter, grad_w_inter = riesz_terms(W, spec.s_b, what="proxies")
    spread, grad_x, grad_w = anchor_distance_terms(X, W, state.labels.y)
    beta_prime = spec.effective_beta_prime

    return finish(
        state,
        inter=spec.alpha * inter,
        intra=beta_prime * spread,
        grad_features=beta_prime * grad_x,
        grad_proxies_inter=spec.alpha * grad_w_inter,
        grad_proxies_intra=beta_prime * grad_w,
    )
