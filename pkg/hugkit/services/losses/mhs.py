"""
Maximum hyperspherical separation HUG and its nearest-neighbour surrogate.

Both are max-min objectives, returned negated so that smaller is better.
"""
import numpy as np
from scipy.special import logsumexp, softmax

from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.losses.base import LossResult, extreme_pair_terms, finish, unit_differences


def mhs_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    -[alpha * min_{c != c'} ||w_c - w_c'|| - beta * sum_c max-pair(class features + w_c)].
    """
    X, W = state.X, state.W
    sep, grad_w_sep = extreme_pair_terms(W, largest=False, tau=spec.tau)

    diameter_sum = 0.0
    grad_x = np.zeros_like(X)
    grad_w_intra = np.zeros_like(W)
    for c, members in enumerate(state.labels.index_sets()):
        block = np.vstack([X[members], W[c:c + 1]])
        diameter, grad = extreme_pair_terms(block, largest=True, tau=spec.tau)
        diameter_sum += diameter
        grad_x[members] += grad[:-1]
        grad_w_intra[c] += grad[-1]

    return finish(
        state,
        inter=-spec.alpha * sep,
        intra=spec.beta * diameter_sum,
        grad_features=spec.beta * grad_x,
        grad_proxies_inter=-spec.alpha * grad_w_sep,
        grad_proxies_intra=spec.beta * grad_w_intra,
    )


def mhs_hug_surrogate(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    -[alpha * min_{c != c'} ||w_c - w_c'|| - beta * sum_c max_{i in A_c} ||x_i - w_c||].
    """
    X, W = state.X, state.W
    sep, grad_w_sep = extreme_pair_terms(W, largest=False, tau=spec.tau)

    dist, direction = unit_differences(X, W[state.labels.y])
    radius_sum = 0.0
    grad_x = np.zeros_like(X)
    grad_w_intra = np.zeros_like(W)
    for c, members in enumerate(state.labels.index_sets()):
        local = dist[members]
        if spec.tau == 0.0:
            k = int(np.argmax(local))
            radius_sum += float(local[k])
            weights = np.zeros_like(local)
            weights[k] = 1.0
        else:
            radius_sum += spec.tau * float(logsumexp(local / spec.tau))
            weights = softmax(local / spec.tau)
        weighted = weights[:, None] * direction[members]
        grad_x[members] += weighted
        grad_w_intra[c] -= weighted.sum(axis=0)

    return finish(
        state,
        inter=-spec.alpha * sep,
        intra=spec.beta * radius_sum,
        grad_features=spec.beta * grad_x,
        grad_proxies_inter=-spec.alpha * grad_w_sep,
        grad_proxies_intra=spec.beta * grad_w_intra,
    )
