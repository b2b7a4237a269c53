"""
Generalized neural collapse diagnostics.

Class means come in two flavours: raw means (nearest-mean rule, feature-mean
reverse energy after normalization) and centered normalized means
(mu_c - mu_G) / ||mu_c - mu_G|| for the class-mean energy, self-duality and
the structural deviations.
"""
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import pinv

from hugkit.core.exceptions import DegenerateMeanError, InvalidInputError, WrongCountError
from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import Labels, PointConfig
from hugkit.schemas.gnc import GncReport
from hugkit.services.energy_service import average_energy, reverse_energy
from hugkit.services.geometry_service import (
    ZERO_NORM_TOL,
    MatrixLike,
    as_array,
    class_means,
    normalize_rows,
    raw_class_means,
    resultant_norm,
    sq_dists,
)

logger = get_logger(__name__)

# Relative singular-value cutoff of the between-class pseudoinverse
PINV_RTOL = 1e-10

# Matched pairs with a larger inner product are not antipodal-like
MISMATCH_INNER = -0.5


class CrossPolytopeFit(NamedTuple):
    deviation: float
    pairs: List[Tuple[int, int]]
    mismatch: bool


def _check_multiclass(labels: Labels, what: str) -> None:
    if labels.num_classes < 2:
        raise InvalidInputError(f"{what} needs at least two classes", "labels")


def ace(proxies: MatrixLike) -> float:
    """Average s=2 energy of the normalized proxies."""
    return average_energy(normalize_rows(proxies), 2.0)


def acme(normalized_means: PointConfig) -> float:
    """Average s=2 energy of the normalized class means."""
    return average_energy(normalized_means, 2.0)


def afre(features: MatrixLike, labels: Labels) -> float:
    """
    Average feature reverse-energy.

    Mean ordered-pair distance inside each class, averaged over classes.
    Singleton classes contribute 0; empty classes raise EmptyClassError.
    """
    labels.require_populated()
    arr = as_array(features)
    total = 0.0
    for members in labels.index_sets():
        k = members.size
        if k > 1:
            total += float(np.sum(np.sqrt(sq_dists(arr[members])))) / (k * (k - 1))
    return total / labels.num_classes


def afmre(features: MatrixLike, labels: Labels) -> float:
    """
    Average feature-mean reverse-energy.

    Mean distance of each feature to the normalized mean mu_c / ||mu_c|| of
    its class, averaged over classes.

    Raises:
        DegenerateMeanError: If a class mean vanishes
    """
    arr = as_array(features)
    means = raw_class_means(arr, labels)
    norms = np.linalg.norm(means, axis=1)
    degenerate = np.flatnonzero(norms < ZERO_NORM_TOL)
    if degenerate.size:
        raise DegenerateMeanError(int(degenerate[0]))
    unit_means = means / norms[:, None]

    distances = np.linalg.norm(arr - unit_means[labels.y], axis=1)
    per_class = np.zeros(labels.num_classes)
    np.add.at(per_class, labels.y, distances)
    return float(np.mean(per_class / labels.counts))


def fda_traces(features: MatrixLike, labels: Labels) -> Tuple[float, float]:
    """
    Traces of the between- and within-class scatter matrices.

    tr(S_b) = sum_c n_c ||mu_c - mu||^2 and tr(S_w) = sum_i ||x_i - mu_{y_i}||^2.
    """
    arr = as_array(features)
    means = raw_class_means(arr, labels)
    centered = means - arr.mean(axis=0)
    trace_sb = float(np.sum(labels.counts * np.sum(centered ** 2, axis=1)))
    trace_sw = float(np.sum((arr - means[labels.y]) ** 2))
    return trace_sb, trace_sw


def collapse_metric(features: MatrixLike, labels: Labels) -> float:
    """
    Within-class variability collapse, trace(pinv(Sigma_B) Sigma_W).

    Sigma_W averages over samples, Sigma_B over classes. Singular values of
    Sigma_B below 1e-10 * sigma_max are truncated.
    """
    _check_multiclass(labels, "collapse_metric")
    arr = as_array(features)
    means = raw_class_means(arr, labels)
    within = arr - means[labels.y]
    between = means - arr.mean(axis=0)

    sigma_w = within.T @ within / arr.shape[0]
    sigma_b = between.T @ between / labels.num_classes
    if not np.any(sigma_b):
        return 0.0
    value = float(np.trace(pinv(sigma_b, atol=0.0, rtol=PINV_RTOL) @ sigma_w))
    return max(value, 0.0)


def equinorm_cv(features: MatrixLike, labels: Labels) -> float:
    """
    Coefficient of variation of the centered class-mean norms.

    Raises:
        DegenerateMeanError: If the mean of the norms is below 1e-12
    """
    _check_multiclass(labels, "equinorm_cv")
    arr = as_array(features)
    norms = np.linalg.norm(raw_class_means(arr, labels) - arr.mean(axis=0), axis=1)
    mean = float(norms.mean())
    if mean < ZERO_NORM_TOL:
        raise DegenerateMeanError()
    return float(norms.std()) / mean


def self_duality_gap(proxies: MatrixLike, features: MatrixLike, labels: Labels) -> float:
    """Largest distance between a normalized proxy and its centered normalized class mean."""
    unit_proxies = normalize_rows(proxies).points
    means = class_means(features, labels).normalized_means.points
    return float(np.max(np.linalg.norm(unit_proxies - means, axis=1)))


def nearest_mean_agreement(proxies: MatrixLike, features: MatrixLike, labels: Labels) -> float:
    """
    Fraction of samples where argmax_c <w_c, x> equals argmin_c ||x - mu_c||.

    No bias term. Both rules break ties toward the lowest class index.
    """
    arr = as_array(features)
    w = as_array(proxies)
    means = raw_class_means(arr, labels)
    by_proxy = np.argmax(arr @ w.T, axis=1)
    dist = np.sum((arr[:, None, :] - means[None, :, :]) ** 2, axis=2)
    by_mean = np.argmin(dist, axis=1)
    return float(np.mean(by_proxy == by_mean))


def etf_deviation(p: MatrixLike) -> float:
    """max over i != j of |<p_i, p_j> + 1/(C-1)|."""
    arr = as_array(p)
    c = arr.shape[0]
    if c < 2:
        return 0.0
    gram = arr @ arr.T
    off = ~np.eye(c, dtype=bool)
    return float(np.max(np.abs(gram[off] + 1.0 / (c - 1))))


def cross_polytope_fit(p: MatrixLike) -> CrossPolytopeFit:
    """
    Match every point to an antipodal partner and measure the residual.

    Points are visited in index order; each unmatched point takes the
    unmatched partner with the most negative inner product (lowest index on
    ties). The deviation is the largest |<>+1| over matched pairs and |<>|
    over the remaining pairs.

    Raises:
        WrongCountError: If n != 2d
    """
    arr = as_array(p)
    n, d = arr.shape
    if n != 2 * d:
        raise WrongCountError(2 * d, n)
    gram = arr @ arr.T

    partner = np.full(n, -1)
    for i in range(n):
        if partner[i] >= 0:
            continue
        candidates = np.where(partner < 0, gram[i], np.inf)
        candidates[i] = np.inf
        j = int(np.argmin(candidates))
        partner[i], partner[j] = j, i

    pairs = [(i, int(partner[i])) for i in range(n) if i < partner[i]]
    matched = np.zeros((n, n), dtype=bool)
    for i, j in pairs:
        matched[i, j] = matched[j, i] = True
    off = ~np.eye(n, dtype=bool) & ~matched

    deviation = max(
        float(np.max(np.abs(gram[matched] + 1.0))),
        float(np.max(np.abs(gram[off]))) if off.any() else 0.0,
    )
    mismatch = bool(np.any(gram[matched] > MISMATCH_INNER))
    return CrossPolytopeFit(deviation=deviation, pairs=pairs, mismatch=mismatch)


def cross_polytope_deviation(p: MatrixLike) -> float:
    return cross_polytope_fit(p).deviation


def uniformity_stats(p: MatrixLike) -> Tuple[float, float]:
    """
    Resultant norm and the Frobenius distance of the second moment
    (1/n) P^T P from I/d.
    """
    arr = as_array(p)
    n, d = arr.shape
    moment = arr.T @ arr / n
    return resultant_norm(arr), float(np.linalg.norm(moment - np.eye(d) / d))


def gnc_report(
    features: MatrixLike,
    labels: Labels,
    proxies: MatrixLike
) -> GncReport:
    """
    Full diagnostic vector of a labeled state.

    Features and proxies are normalized first, so raw states are diagnosed on
    the sphere. Structural measures (ETF, cross-polytope when C = 2d,
    uniformity) are taken on the centered normalized class means.

    Raises:
        DegenerateMeanError: If a class mean (raw or centered) vanishes
        EmptyClassError: If a class has no samples
        CoincidentPointsError: If two normalized proxies or class means coincide
    """
    _check_multiclass(labels, "gnc_report")
    labels.require_populated()
    x = normalize_rows(features)
    w = normalize_rows(proxies)
    means = class_means(x, labels).normalized_means
    trace_sb, trace_sw = fda_traces(x, labels)
    res_norm, cov_dev = uniformity_stats(means)

    cross_dev: Optional[float] = None
    if means.n == 2 * means.d:
        cross_dev = cross_polytope_deviation(means)

    return GncReport(
        ace=ace(w),
        acme=acme(means),
        afre=afre(x, labels),
        afmre=afmre(x, labels),
        reverse_energy=reverse_energy(x, labels),
        trace_sb=trace_sb,
        trace_sw=trace_sw,
        collapse_metric=collapse_metric(x, labels),
        equinorm_cv=equinorm_cv(x, labels),
        self_duality_gap=self_duality_gap(w, x, labels),
        nearest_mean_agreement=nearest_mean_agreement(w, x, labels),
        etf_deviation=etf_deviation(means),
        cross_polytope_deviation=cross_dev,
        resultant_norm=res_norm,
        covariance_deviation=cov_dev,
    )
