"""
Class proxy sets and their training strategies.
"""
import enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import field_serializer, field_validator, model_validator

from hugkit.core.exceptions import InvalidInputError
from hugkit.models.base import ArrayModel
from hugkit.models.geometry import PointConfig


class ProxyStrategy(str, enum.Enum):
    """
    How class proxies behave during training.
    """
    LEARNABLE = "learnable"
    STATIC_RANDOM = "static_random"
    STATIC_OPTIMIZED = "static_optimized"
    PARTIALLY_LEARNABLE = "partially_learnable"

    @property
    def is_static(self) -> bool:
        return self in (ProxyStrategy.STATIC_RANDOM, ProxyStrategy.STATIC_OPTIMIZED)


def rotation_param_count(d: int) -> int:
    """Number of free entries of a d x d skew-symmetric matrix."""
    return d * (d - 1) // 2


class ProxySet(ArrayModel):
    """
    Proxy base configuration plus strategy.

    Fields:
        base: C x d unit vectors
        strategy: training behaviour
        rotation_params: skew parameters of the learned rotation
            (partially learnable proxies only, length d(d-1)/2)
    """
    base: PointConfig
    strategy: ProxyStrategy
    rotation_params: Optional[np.ndarray] = None

    @field_validator("rotation_params", mode="before")
    @classmethod
    def coerce_params(cls, value: Any) -> Optional[np.ndarray]:
        if value is None:
            return None
        arr = np.array(value, dtype=np.float64)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise InvalidInputError("rotation_params must be a finite vector", "rotation_params")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_params(self) -> "ProxySet":
        expected = rotation_param_count(self.base.d)
        if self.strategy == ProxyStrategy.PARTIALLY_LEARNABLE:
            if self.rotation_params is None:
                zeros = np.zeros(expected)
                zeros.setflags(write=False)
                object.__setattr__(self, "rotation_params", zeros)
            elif self.rotation_params.shape[0] != expected:
                raise InvalidInputError(
                    f"expected {expected} rotation parameters, got {self.rotation_params.shape[0]}",
                    "rotation_params"
                )
        elif self.rotation_params is not None:
            raise InvalidInputError(
                f"{self.strategy.value} proxies take no rotation parameters", "rotation_params"
            )
        return self

    @field_serializer("rotation_params")
    def serialize_params(self, value: Optional[np.ndarray]) -> Optional[List[float]]:
        return None if value is None else value.tolist()

    @property
    def num_classes(self) -> int:
        return self.base.n

    def with_params(self, params: np.ndarray) -> "ProxySet":
        return ProxySet(base=self.base, strategy=self.strategy, rotation_params=params)

    def with_base(self, base: PointConfig) -> "ProxySet":
        return ProxySet(base=base, strategy=self.strategy, rotation_params=self.rotation_params)

    def to_document(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "base": self.base.to_document(),
            "rotation_params": [] if self.rotation_params is None else self.rotation_params.tolist(),
        }

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "ProxySet":
        strategy = ProxyStrategy(doc["strategy"])
        params = doc.get("rotation_params") or None
        return cls(
            base=PointConfig.from_document(doc["base"]),
            strategy=strategy,
            rotation_params=params,
        )
