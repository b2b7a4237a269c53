"""
Pydantic schemas describing HUG and CE loss configurations.
"""
import enum
from typing import Optional
from pydantic import BaseModel, Field, model_validator


class LossVariant(str, enum.Enum):
    """
    Loss family members.
    """
    MHE_HUG = "MHE_HUG"
    MHE_HUG_RELAXED = "MHE_HUG_RELAXED"
    MHS_HUG = "MHS_HUG"
    MHS_HUG_SURROGATE = "MHS_HUG_SURROGATE"
    MGD_HUG = "MGD_HUG"
    PF_HUG_RELAXED = "PF_HUG_RELAXED"
    PF_HUG_FULL = "PF_HUG_FULL"
    COUPLED_HUG = "COUPLED_HUG"
    UNNORMALIZED_HUG = "UNNORMALIZED_HUG"
    CLASS_MEAN_HUG = "CLASS_MEAN_HUG"
    CE = "CE"

    @property
    def uses_proxies(self) -> bool:
        return self not in (
            LossVariant.PF_HUG_RELAXED,
            LossVariant.PF_HUG_FULL,
            LossVariant.CLASS_MEAN_HUG,
        )

    @property
    def normalized(self) -> bool:
        return self != LossVariant.UNNORMALIZED_HUG


class LossSpec(BaseModel):
    """
    Loss variant, kernel parameters and weights.

    beta_prime weights the relaxed intra-class terms; when unset it falls
    back to beta.
    """
    variant: LossVariant = Field(default=LossVariant.MHE_HUG_RELAXED)
    alpha: float = Field(default=0.15, ge=0, description="Inter-class weight")
    beta: float = Field(default=0.015, ge=0, description="Intra-class weight")
    beta_prime: Optional[float] = Field(None, ge=0, description="Relaxed intra-class weight")
    s_b: float = Field(default=2.0, description="Riesz exponent between classes")
    s_w: float = Field(default=-1.0, description="Riesz exponent within classes")
    epsilon: float = Field(default=1.0, gt=0, description="Gaussian kernel width (MGD)")
    tau: float = Field(default=0.0, ge=0, description="Log-sum-exp temperature (MHS)")
    stop_gradient_proxies: bool = False
    lambda1: float = Field(default=0.01, ge=0, description="Proxy norm penalty")
    lambda2: float = Field(default=0.01, ge=0, description="Feature norm penalty")
    s_target: float = Field(default=1.0, gt=0, description="Target norm")
    seed: int = Field(default=0, description="Representative draws for PF_HUG_RELAXED")

    model_config = {
        "extra": "forbid"
    }

    @model_validator(mode="after")
    def check_weights(self) -> "LossSpec":
        if self.s_b == 0 or self.s_w == 0:
            raise ValueError("Riesz exponents s_b and s_w must be nonzero")
        if self.variant != LossVariant.CE:
            if not (self.alpha > 0 or self.beta > 0 or (self.beta_prime or 0) > 0):
                raise ValueError("alpha or beta must be positive")
        return self

    @property
    def effective_beta_prime(self) -> float:
        return self.beta if self.beta_prime is None else self.beta_prime

    @classmethod
    def recommended(cls, variant: LossVariant, **overrides) -> "LossSpec":
        """Standard weights: alpha 0.15, beta 0.015 (0.03 for MGD)."""
        values = {"variant": variant, "alpha": 0.15, "beta": 0.015}
        if variant == LossVariant.MGD_HUG:
            values["beta"] = 0.03
        values.update(overrides)
        return cls(**values)
