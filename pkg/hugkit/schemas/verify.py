"""
Verification suite reports.
"""
import enum
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field


class VerifySuite(str, enum.Enum):
    ETF = "etf"
    CROSS_POLYTOPE = "cross_polytope"
    ASYMPTOTIC = "asymptotic"
    INIT_ENERGY = "init_energy"
    ENERGY_ORDER = "energy_order"
    MHS_LIMIT = "mhs_limit"
    CE_BOUNDS = "ce_bounds"
    SURROGATE_BOUND = "surrogate_bound"
    CIRCLE = "circle"
    GRADIENTS = "gradients"
    ORACLE = "oracle"
    GNC_CONVERGENCE = "gnc_convergence"
    CE_CONVERGENCE = "ce_convergence"


class VerifyCheck(BaseModel):
    """
    One measured quantity against its target.

    Informational checks (required=False) are reported but do not decide
    the suite outcome.
    """
    name: str
    measured: float
    target: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool
    required: bool = True
    details: Dict[str, Any] = Field(default_factory=dict)


class VerifyReport(BaseModel):
    suite: VerifySuite
    seed: int
    passed: bool
    checks: List[VerifyCheck]
    duration_ms: float
