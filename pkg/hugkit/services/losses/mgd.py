"""
Maximum Gram determinant HUG.
"""
from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.energy_service import log_det_gram_terms
from hugkit.services.losses.base import LossResult, anchor_distance_terms, finish


def mgd_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    -alpha * log det G_eps(proxies) + beta' * sum_i ||x_i - w_{y_i}||.

    The intra-class term enters with the collapsing sign.

    Raises:
        SingularGramError: When the proxy Gram matrix is singular
    """
    X, W = state.X, state.W
    log_det, grad_w_det = log_det_gram_terms(W, spec.epsilon)
    spread, grad_x, grad_w = anchor_distance_terms(X, W, state.labels.y)
    beta_prime = spec.effective_beta_prime

    return finish(
        state,
        inter=-spec.alpha * log_det,
        intra=beta_prime * spread,
        grad_features=beta_prime * grad_x,
        grad_proxies_inter=-spec.alpha * grad_w_det,
        grad_proxies_intra=beta_prime * grad_w,
    )
