"""
Dispatch from LossSpec.variant to the loss implementations.
"""
from typing import Callable, Dict

from hugkit.models.geometry import Labels
from hugkit.models.state import LabeledState
from hugkit.schemas.loss import LossSpec, LossVariant
from hugkit.services.losses.base import LossResult, apply_stop_gradient
from hugkit.services.losses.cross_entropy import ce_loss
from hugkit.services.losses.mgd import mgd_hug
from hugkit.services.losses.mhe import mhe_hug, mhe_hug_relaxed
from hugkit.services.losses.mhs import mhs_hug, mhs_hug_surrogate
from hugkit.services.losses.variants import (
    PfMode,
    class_mean_hug,
    coupled_hug,
    pf_hug,
    pf_seed,
    unnormalized_hug,
)

LossFn = Callable[[LabeledState, LossSpec], LossResult]

LOSSES: Dict[LossVariant, LossFn] = {
    LossVariant.MHE_HUG: mhe_hug,
    LossVariant.MHE_HUG_RELAXED: mhe_hug_relaxed,
    LossVariant.MHS_HUG: mhs_hug,
    LossVariant.MHS_HUG_SURROGATE: mhs_hug_surrogate,
    LossVariant.MGD_HUG: mgd_hug,
    LossVariant.COUPLED_HUG: coupled_hug,
    LossVariant.UNNORMALIZED_HUG: unnormalized_hug,
    LossVariant.CLASS_MEAN_HUG: class_mean_hug,
    LossVariant.CE: ce_loss,
}


def compute_loss(state: LabeledState, spec: LossSpec, iteration: int = 0) -> LossResult:
    """
    Evaluate the configured loss, with stop-gradient applied.

    Args:
        state: Current features, labels and proxies
        spec: Loss configuration
        iteration: Optimizer iteration; selects the PF_HUG_RELAXED representatives

    Raises:
        EmptyClassError: If a class has no samples and the variant is not CE
    """
    if spec.variant != LossVariant.CE:
        state.labels.require_populated()
    if spec.variant == LossVariant.PF_HUG_FULL:
        result = pf_hug(state, spec, PfMode.FULL)
    elif spec.variant == LossVariant.PF_HUG_RELAXED:
        result = pf_hug(state, spec, PfMode.RELAXED, pf_seed(spec, iteration))
    else:
        result = LOSSES[spec.variant](state, spec)
    return apply_stop_gradient(result, spec)


def matched_beta_prime(beta: float, labels: Labels) -> float:
    """
    Smallest beta' for which the relaxed MHE objective (s_w = -1) bounds the
    exact one from above: by the triangle inequality through the proxy each
    class needs 2 * |A_c| * beta.
    """
    return 2.0 * beta * float(labels.counts.max())
