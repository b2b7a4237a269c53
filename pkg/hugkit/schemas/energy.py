"""
Request and response schemas of the energy endpoints.
"""
from typing import List, Optional
from pydantic import BaseModel, Field, field_validator


class OptimizeRequest(BaseModel):
    n: int = Field(..., ge=2, le=2000, description="Number of points")
    d: int = Field(..., ge=2, le=512, description="Ambient dimension")
    s: float = Field(default=2.0, description="Riesz exponent")
    restarts: int = Field(default=8, ge=1, le=64)
    seed: int = 0

    @field_validator("s")
    @classmethod
    def check_exponent(cls, value: float) -> float:
        if value == 0:
            raise ValueError("s must be nonzero")
        return value


class OptimizeResponse(BaseModel):
    n: int
    d: int
    s: float
    energy: float
    average_energy: float
    restart: int
    energies: List[float]
    points: List[List[float]]


class EvaluateRequest(BaseModel):
    points: List[List[float]]
    s: float = Field(default=2.0)
    epsilon: Optional[float] = Field(None, gt=0, description="Also evaluate log det G when set")


class EvaluateResponse(BaseModel):
    riesz_energy: float
    average_energy: float
    log_energy: Optional[float] = None
    log_det_gram: Optional[float] = None
    separation: float
    separation_pair: List[int]
