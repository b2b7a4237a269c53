"""
HUG loss family and the cross-entropy baseline.
"""
from hugkit.services.losses.base import LossResult, apply_stop_gradient
from hugkit.services.losses.cross_entropy import (
    CeLowerBound,
    boudiaf_sweep,
    ce_bounds,
    ce_boudiaf_lower,
    ce_loss,
)
from hugkit.services.losses.mgd import mgd_hug
from hugkit.services.losses.mhe import mhe_hug, mhe_hug_relaxed
from hugkit.services.losses.mhs import mhs_hug, mhs_hug_surrogate
from hugkit.services.losses.registry import compute_loss, matched_beta_prime
from hugkit.services.losses.variants import (
    PfMode,
    class_mean_hug,
    coupled_hug,
    pf_hug,
    unnormalized_hug,
)

__all__ = [
    "LossResult", "apply_stop_gradient", "compute_loss", "matched_beta_prime",
    "mhe_hug", "mhe_hug_relaxed", "mhs_hug", "mhs_hug_surrogate", "mgd_hug",
    "pf_hug", "PfMode", "coupled_hug", "unnormalized_hug", "class_mean_hug",
    "ce_loss", "ce_bounds", "ce_boudiaf_lower", "boudiaf_sweep", "CeLowerBound",
]
