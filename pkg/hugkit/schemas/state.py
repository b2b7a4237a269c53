"""
On-disk document of a labeled state.
"""
from typing import List, Optional
from pydantic import BaseModel, Field


class ProxySetDocument(BaseModel):
    strategy: str
    base: List[List[float]]
    rotation_params: List[float] = Field(default_factory=list)


class StateDocument(BaseModel):
    """
    Versioned JSON document of a LabeledState.

    normalized selects PointConfig (true) or RawMatrix (false) for
    features and proxies.
    """
    schema_version: int
    normalized: bool = True
    num_classes: int = Field(..., ge=1)
    allow_empty_classes: bool = False
    labels: List[int]
    features: List[List[float]]
    proxies: List[List[float]]
    proxy_set: Optional[ProxySetDocument] = None

    model_config = {
        "extra": "forbid"
    }
