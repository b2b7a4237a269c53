"""
Pydantic schemas for the projected gradient optimizer.
"""
import enum
import math
from typing import List, Optional
from pydantic import BaseModel, Field, field_validator


class ScheduleKind(str, enum.Enum):
    CONSTANT = "constant"
    STEP_DECAY = "step_decay"


class StepSchedule(BaseModel):
    """
    Step-size schedule.

    Step decay multiplies by `factor` every `every_k` iterations when set,
    otherwise at each fractional milestone of max_iters.
    """
    kind: ScheduleKind = Field(default=ScheduleKind.STEP_DECAY)
    factor: float = Field(default=0.1, gt=0, le=1)
    every_k: Optional[int] = Field(None, ge=1)
    milestones: List[float] = Field(default_factory=lambda: [0.6, 0.9])

    @field_validator("milestones")
    @classmethod
    def check_milestones(cls, value: List[float]) -> List[float]:
        if any(not 0 < m < 1 for m in value):
            raise ValueError("milestones must lie in (0, 1)")
        return sorted(value)

    def step_at(self, base: float, iteration: int, max_iters: int) -> float:
        if self.kind == ScheduleKind.CONSTANT:
            return base
        if self.every_k is not None:
            decays = iteration // self.every_k
        else:
            decays = sum(1 for m in self.milestones if iteration >= math.floor(m * max_iters))
        return base * self.factor ** decays


class OptimConfig(BaseModel):
    """
    Projected gradient descent settings.

    line_search enables monotone backtracking (halve on increase);
    max_displacement clips each row update to that Euclidean length.
    """
    step_size: float = Field(default=0.1, gt=0)
    momentum: float = Field(default=0.0, ge=0, lt=1)
    max_iters: int = Field(default=2000, ge=1)
    grad_tol: float = Field(default=1e-10, gt=0)
    schedule: StepSchedule = Field(default_factory=StepSchedule)
    seed: int = 0
    restarts: int = Field(default=1, ge=1)
    record_every: int = Field(default=10, ge=1)
    line_search: bool = False
    max_displacement: Optional[float] = Field(None, gt=0)

    model_config = {
        "extra": "forbid"
    }
