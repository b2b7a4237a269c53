"""
Generalized neural collapse diagnostic report.
"""
import math
from typing import Optional
from pydantic import BaseModel, Field, model_validator

# Columns appended to trajectory CSV files, in order
TRAJECTORY_GNC_COLUMNS = (
    "ace",
    "acme",
    "afre",
    "afmre",
    "collapse_metric",
    "equinorm_cv",
    "self_duality_gap",
    "nearest_mean_agreement",
)


class GncReport(BaseModel):
    """
    Full diagnostic vector of a labeled state.
    """
    ace: float = Field(..., ge=0, description="Average classifier (proxy) energy")
    acme: float = Field(..., ge=0, description="Average normalized class-mean energy")
    afre: float = Field(..., ge=0, description="Average feature reverse-energy")
    afmre: float = Field(..., ge=0, description="Average feature-to-mean reverse-energy")
    reverse_energy: float = Field(..., ge=0)
    trace_sb: float = Field(..., ge=0)
    trace_sw: float = Field(..., ge=0)
    collapse_metric: float = Field(..., ge=0, description="trace(pinv(Sigma_B) Sigma_W)")
    equinorm_cv: float = Field(..., ge=0)
    self_duality_gap: float = Field(..., ge=0)
    nearest_mean_agreement: float = Field(..., ge=0, le=1)
    etf_deviation: float = Field(..., ge=0)
    cross_polytope_deviation: Optional[float] = Field(None, ge=0)
    resultant_norm: float = Field(..., ge=0)
    covariance_deviation: float = Field(..., ge=0)

    model_config = {
        "frozen": True
    }

    @model_validator(mode="after")
    def check_finite(self) -> "GncReport":
        for name, value in self.model_dump().items():
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} is not finite")
        return self
