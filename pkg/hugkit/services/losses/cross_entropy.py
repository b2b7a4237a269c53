"""
Bias-free softmax cross-entropy on the sphere, its bounds and the
lower bound obtained by splitting CE into two convex parts.
"""
from typing import Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.special import logsumexp, softmax

from hugkit.core.exceptions import InvalidInputError
from hugkit.core.logging_config import get_logger
from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.losses.base import LossResult, finish

logger = get_logger(__name__)


class CeLowerBound(BaseModel):
    """
    Evaluated two-part lower bound at one lambda.
    """
    lam: float
    q1: float
    q2: float
    value: float
    ce: float
    holds: bool


def _logits(state: LabeledState) -> np.ndarray:
    return state.X @ state.W.T


def ce_loss(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    sum_i [logsumexp_c <w_c, x_i> - <w_{y_i}, x_i>].

    inter_term holds the log-partition sum and intra_term the negated
    target alignments, so value = inter_term + intra_term.
    """
    X, W = state.X, state.W
    y = state.labels.y
    n = X.shape[0]
    logits = _logits(state)
    targets = logits[np.arange(n), y]
    partition = logsumexp(logits, axis=1)

    probs = softmax(logits, axis=1)
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), y] = 1.0

    grad_x = probs @ W - W[y]
    grad_w_partition = probs.T @ X
    grad_w_alignment = -onehot.T @ X

    return finish(
        state,
        inter=float(partition.sum()),
        intra=-float(targets.sum()),
        grad_features=grad_x,
        grad_proxies_inter=grad_w_partition,
        grad_proxies_intra=grad_w_alignment,
        project=state.normalized,
    )


def ce_bounds(state: LabeledState) -> Tuple[float, float]:
    """
    Lower and upper bounds of ce_loss with rho = C - 1.

    lower = sum_i sum_{j != y_i} <w_j, x_i> - rho * sum_i <w_{y_i}, x_i>
    upper = sum_i log(1 + sum_{j != y_i} exp<w_j, x_i> + rho * exp(-<w_{y_i}, x_i>))

    The upper bound is accumulated per sample; for one sample it is the
    single-logarithm form.
    """
    y = state.labels.y
    n = state.X.shape[0]
    rho = state.num_classes - 1
    logits = _logits(state)
    targets = logits[np.arange(n), y]
    others = logits.copy()
    others[np.arange(n), y] = -np.inf

    lower = float(np.sum(logits) - np.sum(targets) - rho * np.sum(targets))
    inner = np.exp(others).sum(axis=1) + rho * np.exp(-targets)
    upper = float(np.sum(np.log1p(inner)))
    return lower, upper


def ce_boudiaf_lower(state: LabeledState, lam: float) -> CeLowerBound:
    """
    Q1(w*) + Q2(w*) lower bound of CE for the split

        Q1(w) = -sum_i <w_{y_i}, x_i> + (lam n / 2) sum_c ||w_c||^2
        Q2(w) = sum_i logsumexp_c <w_c, x_i> - (lam n / 2) sum_c ||w_c||^2

    with l_ic the softmax confidences at the current proxies. A bound above
    CE is reported through `holds`, never raised.
    """
    if lam <= 0:
        raise InvalidInputError("lambda must be positive", "lam")
    X = state.X
    y = state.labels.y
    n = X.shape[0]

    gram = X @ X.T
    same = y[:, None] == y[None, :]
    q1 = -float(np.sum(gram[same])) / (2.0 * lam * n)

    confidences = softmax(_logits(state), axis=1)
    scores = gram @ confidences / (lam * n)
    soft_means = confidences.T @ X / n
    q2 = float(np.sum(logsumexp(scores, axis=1))) - n / (2.0 * lam) * float(np.sum(soft_means ** 2))

    ce = ce_loss(state, LossSpec()).value
    value = q1 + q2
    return CeLowerBound(lam=lam, q1=q1, q2=q2, value=value, ce=ce, holds=value <= ce)


def boudiaf_sweep(state: LabeledState, lambdas: Iterable[float]) -> List[CeLowerBound]:
    """Evaluate the two-part lower bound over several lambdas."""
    results = [ce_boudiaf_lower(state, lam) for lam in lambdas]
    for result in results:
        if not result.holds:
            logger.info(
                f"CE lower bound exceeds CE at lambda={result.lam}",
                extra={"details": result.model_dump()}
            )
    return results
