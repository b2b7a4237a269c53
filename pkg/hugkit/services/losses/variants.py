"""
Proxy-free, coupled, unnormalized and class-mean HUG variants.
"""
import enum

import numpy as np

from hugkit.core.exceptions import CoincidentPointsError, DegenerateMeanError
from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec
from hugkit.services.energy_service import COINCIDENT_TOL, riesz_terms
from hugkit.services.geometry_service import ZERO_NORM_TOL, derive_seed, make_rng
from hugkit.services.losses.base import LossResult, finish


class PfMode(str, enum.Enum):
    RELAXED = "RELAXED"
    FULL = "FULL"


def _intra_pair_distances(X: np.ndarray, state: LabeledState):
    """sum_c sum_{i != j in A_c} ||x_i - x_j|| (ordered) with its gradient."""
    total = 0.0
    grad = np.zeros_like(X)
    for members in state.labels.index_sets():
        if members.size < 2:
            continue
        # E_{-1} = -sum of ordered pair distances
        energy, g = riesz_terms(X[members], -1.0)
        total -= energy
        grad[members] -= g
    return total, grad


def pf_hug(state: LabeledState, spec: LossSpec, mode: PfMode = PfMode.FULL, seed: int = 0) -> LossResult:
    """
    Proxy-free HUG on features only.

    FULL: alpha * sum over ordered cross-class feature pairs of K_{s_b}.
    RELAXED: alpha * E_{s_b} of one random representative per class, drawn
    deterministically from seed.
    Both add beta' * sum of ordered intra-class distances. Proxies get a
    zero gradient.

    Raises:
        EmptyClassError: If a class has no samples
    """
    state.labels.require_populated()
    X = state.X
    y = state.labels.y
    grad_x = np.zeros_like(X)

    if PfMode(mode) == PfMode.FULL:
        cross = y[:, None] != y[None, :]
        inter, grad_inter = riesz_terms(X, spec.s_b, what="features", mask=cross)
        grad_x += spec.alpha * grad_inter
    else:
        rng = make_rng(seed)
        reps = np.array([rng.choice(members) for members in state.labels.index_sets()])
        inter, grad_inter = riesz_terms(X[reps], spec.s_b, what="representatives")
        np.add.at(grad_x, reps, spec.alpha * grad_inter)

    spread, grad_spread = _intra_pair_distances(X, state)
    beta_prime = spec.effective_beta_prime
    grad_x += beta_prime * grad_spread

    zeros = np.zeros_like(state.W)
    return finish(
        state,
        inter=spec.alpha * inter,
        intra=beta_prime * spread,
        grad_features=grad_x,
        grad_proxies_inter=zeros,
        grad_proxies_intra=zeros.copy(),
    )


def coupled_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    alpha * sum_i sum_{c != y_i} K_{s_b}(x_i, w_c) + beta' * sum of ordered
    intra-class feature distances.

    Raises:
        CoincidentPointsError: When a feature sits on a wrong-class proxy (s_b > 0)
    """
    X, W = state.X, state.W
    y = state.labels.y
    n, C = X.shape[0], W.shape[0]
    s = spec.s_b

    diff = X[:, None, :] - W[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    wrong = np.ones((n, C), dtype=bool)
    wrong[np.arange(n), y] = False

    if s > 0:
        hits = np.argwhere(wrong & (dist < COINCIDENT_TOL))
        if hits.size:
            raise CoincidentPointsError(int(hits[0, 0]), int(hits[0, 1]), "feature/proxy")

    live = wrong & (dist >= COINCIDENT_TOL)
    safe = np.where(live, dist, 1.0)
    sign = 1.0 if s > 0 else -1.0
    inter = sign * float(np.sum(np.where(live, safe ** (-s), 0.0)))
    # d/dx K_s(x, w) = -|s| r^(-s-2) (x - w)
    weights = np.where(live, -abs(s) * safe ** (-s - 2.0), 0.0)
    pair_grad = weights[:, :, None] * diff
    grad_x = spec.alpha * pair_grad.sum(axis=1)
    grad_w_inter = -spec.alpha * pair_grad.sum(axis=0)

    spread, grad_spread = _intra_pair_distances(X, state)
    beta_prime = spec.effective_beta_prime
    grad_x += beta_prime * grad_spread

    return finish(
        state,
        inter=spec.alpha * inter,
        intra=beta_prime * spread,
        grad_features=grad_x,
        grad_proxies_inter=grad_w_inter,
        grad_proxies_intra=np.zeros_like(W),
    )


def _norm_penalty(arr: np.ndarray, target: float):
    """sum_i (||a_i|| - target)^2 and its Euclidean gradient."""
    norms = np.linalg.norm(arr, axis=1)
    gap = norms - target
    grad = np.zeros_like(arr)
    live = norms >= ZERO_NORM_TOL
    grad[live] = (2.0 * gap[live] / norms[live])[:, None] * arr[live]
    return float(np.sum(gap ** 2)), grad


def unnormalized_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    MHE-HUG on raw vectors with soft magnitude constraints:
    alpha * E_{s_b}(W) - beta * sum_c E_{s_w}(X_c + w_c)
    + lambda1 * sum_c (||w_c|| - s)^2 + lambda2 * sum_i (||x_i|| - s)^2.

    Gradients are Euclidean.
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

    proxy_penalty, grad_w_penalty = _norm_penalty(W, spec.s_target)
    feature_penalty, grad_x_penalty = _norm_penalty(X, spec.s_target)

    return finish(
        state,
        inter=spec.alpha * inter,
        intra=-spec.beta * intra,
        penalty=spec.lambda1 * proxy_penalty + spec.lambda2 * feature_penalty,
        grad_features=-spec.beta * grad_x + spec.lambda2 * grad_x_penalty,
        grad_proxies_inter=spec.alpha * grad_w_inter + spec.lambda1 * grad_w_penalty,
        grad_proxies_intra=-spec.beta * grad_w_intra,
        project=False,
    )


def class_mean_hug(state: LabeledState, spec: LossSpec) -> LossResult:
    """
    Proxy-free HUG over normalized class sums:
    alpha * E_{s_b}({mu_c / ||mu_c||}) - beta * sum_c E_{s_w}(X_c),
    with mu_c the sum of the class's features.

    Raises:
        DegenerateMeanError: When a class sum vanishes
        EmptyClassError: If a class has no samples
    """
    state.labels.require_populated()
    X = state.X
    y = state.labels.y
    C = state.num_classes

    sums = np.zeros((C, X.shape[1]))
    np.add.at(sums, y, X)
    norms = np.linalg.norm(sums, axis=1)
    short = np.flatnonzero(norms < ZERO_NORM_TOL)
    if short.size:
        raise DegenerateMeanError(int(short[0]))
    means = sums / norms[:, None]

    inter, grad_means = riesz_terms(means, spec.s_b, what="class means")
    # chain rule through mu -> mu / ||mu||
    radial = np.einsum("ij,ij->i", grad_means, means)
    grad_sums = (grad_means - radial[:, None] * means) / norms[:, None]
    grad_x = spec.alpha * grad_sums[y]

    intra = 0.0
    for members in state.labels.index_sets():
        energy, grad = riesz_terms(X[members], spec.s_w, what="features")
        intra += energy
        grad_x[members] -= spec.beta * grad

    zeros = np.zeros_like(state.W)
    return finish(
        state,
        inter=spec.alpha * inter,
        intra=-spec.beta * intra,
        grad_features=grad_x,
        grad_proxies_inter=zeros,
        grad_proxies_intra=zeros.copy(),
    )


def pf_seed(spec: LossSpec, iteration: int) -> int:
    """Representative stream of PF_HUG_RELAXED at a given iteration."""
    return derive_seed(spec.seed, iteration)
