"""
Experiment, sweep and run-manifest schemas.
"""
import math
from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from hugkit.models.proxy_set import ProxyStrategy
from hugkit.schemas.gnc import GncReport
from hugkit.schemas.loss import LossSpec, LossVariant
from hugkit.schemas.optim import OptimConfig


class ExperimentConfig(BaseModel):
    """
    One unconstrained-features experiment.

    Balanced runs draw samples_per_class features per class. With
    imbalance_ratio set, class c draws ceil(samples_per_class * IR^(c/(C-1)))
    so the head/tail ratio is 1/IR.
    """
    num_classes: int = Field(..., alias="C", ge=2)
    dim: int = Field(..., alias="d", ge=2)
    samples_per_class: int = Field(default=10, ge=1)
    imbalance_ratio: Optional[float] = Field(None, gt=0, le=1)
    loss: LossSpec = Field(default_factory=LossSpec)
    proxy_strategy: ProxyStrategy = Field(default=ProxyStrategy.LEARNABLE)
    optim: OptimConfig = Field(default_factory=OptimConfig)
    gnc_every: Optional[int] = Field(None, ge=1)
    seed: int = 0
    output_dir: Optional[str] = None

    model_config = {
        "populate_by_name": True,
        "extra": "forbid"
    }

    @model_validator(mode="after")
    def check_consistency(self) -> "ExperimentConfig":
        if self.gnc_every is not None and self.gnc_every % self.optim.record_every != 0:
            raise ValueError("gnc_every must be a multiple of optim.record_every")
        if (self.loss.variant == LossVariant.UNNORMALIZED_HUG
                and self.proxy_strategy != ProxyStrategy.LEARNABLE):
            raise ValueError("unnormalized states only support learnable proxies")
        return self

    def class_counts(self) -> List[int]:
        if self.imbalance_ratio is None:
            return [self.samples_per_class] * self.num_classes
        last = self.num_classes - 1
        return [
            math.ceil(self.samples_per_class * self.imbalance_ratio ** (c / last))
            for c in range(self.num_classes)
        ]


class SweepConfig(BaseModel):
    """
    Parameter grid over a base experiment.

    grid maps dotted ExperimentConfig paths (e.g. "loss.alpha", "C") to the
    values to try; the sweep runs the Cartesian product.
    """
    base: ExperimentConfig
    grid: Dict[str, List[Any]] = Field(default_factory=dict)
    output_dir: str = "runs/sweep"
    workers: Optional[int] = Field(None, ge=1)

    model_config = {
        "extra": "forbid"
    }

    @model_validator(mode="after")
    def check_grid(self) -> "SweepConfig":
        for key, values in self.grid.items():
            if not values:
                raise ValueError(f"grid entry {key} has no values")
        return self


class RunManifest(BaseModel):
    """
    Record of one experiment: config echo, versions, timing, final report and
    SHA-256 digests of the emitted files.
    """
    run_id: str
    config: ExperimentConfig
    seed: int
    version: str
    started_at: datetime
    finished_at: datetime
    iterations: int
    converged: bool
    final_loss: float
    report: GncReport
    digests: Dict[str, str] = Field(default_factory=dict)
