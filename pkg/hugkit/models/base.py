"""
Base classes for value-semantic array models.
All domain types hold numpy arrays inside frozen pydantic models.
"""
from typing import Any

import numpy as np
from pydantic import BaseModel

from hugkit.core.exceptions import InvalidInputError


class ArrayModel(BaseModel):
    """
    Frozen pydantic model that may carry numpy arrays.

    Arrays are copied and marked read-only on validation, so instances
    behave as values and are safe to share between threads.
    """
    model_config = {
        "arbitrary_types_allowed": True,
        "frozen": True
    }

    def __repr__(self) -> str:
        shapes = {
            name: getattr(value, "shape", value)
            for name, value in self.__dict__.items()
        }
        return f"<{self.__class__.__name__}({shapes})>"


def as_float_matrix(value: Any, field: str) -> np.ndarray:
    """
    Coerce input into a finite, read-only float64 matrix.

    Args:
        value: Nested sequence or array
        field: Field name used in error messages

    Returns:
        A fresh read-only 2-D array
    """
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{field} is not a numeric matrix: {exc}", field)

    if arr.ndim != 2:
        raise InvalidInputError(f"{field} must be 2-D, got shape {arr.shape}", field)
    if arr.shape[0] < 1:
        raise InvalidInputError(f"{field} must have at least one row", field)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{field} contains non-finite entries", field)

    arr.setflags(write=False)
    return arr
