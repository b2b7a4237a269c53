"""
Point configurations on the unit hypersphere, raw matrices and class labels.
"""
from typing import Any, Dict, List

import numpy as np
from pydantic import Field, field_serializer, field_validator, model_validator

from hugkit.core.exceptions import EmptyClassError, InvalidInputError
from hugkit.models.base import ArrayModel, as_float_matrix

# Maximum deviation of a row norm from 1
NORM_TOL = 1e-9


class PointConfig(ArrayModel):
    """
    Ordered set of n unit vectors in R^d.

    Fields:
        points: n x d matrix, every row of norm 1 within NORM_TOL
    """
    points: np.ndarray

    @field_validator("points", mode="before")
    @classmethod
    def coerce_points(cls, value: Any) -> np.ndarray:
        return as_float_matrix(value, "points")

    @model_validator(mode="after")
    def check_sphere(self) -> "PointConfig":
        if self.points.shape[1] < 2:
            raise InvalidInputError("points need ambient dimension d >= 2", "points")
        deviation = np.abs(np.linalg.norm(self.points, axis=1) - 1.0)
        worst = int(np.argmax(deviation))
        if deviation[worst] > NORM_TOL:
            raise InvalidInputError(
                f"row {worst} has norm deviation {deviation[worst]:.3e} from 1",
                "points"
            )
        return self

    @field_serializer("points")
    def serialize_points(self, value: np.ndarray) -> List[List[float]]:
        return value.tolist()

    @classmethod
    def unchecked(cls, points: np.ndarray) -> "PointConfig":
        """Wrap an array without validation (finite-difference probes)."""
        return cls.model_construct(points=np.asarray(points, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self.points

    def to_document(self) -> Dict[str, Any]:
        return {"d": self.d, "n": self.n, "points": self.points.tolist()}

    @classmethod
    def from_document(cls, doc: Dict[str, Any]) -> "PointConfig":
        config = cls(points=doc["points"])
        if doc.get("n", config.n) != config.n or doc.get("d", config.d) != config.d:
            raise InvalidInputError("declared n/d do not match points", "points")
        return config


class RawMatrix(ArrayModel):
    """
    Unnormalized n x d matrix (unnormalized HUG states, class means).
    """
    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def coerce_entries(cls, value: Any) -> np.ndarray:
        return as_float_matrix(value, "entries")

    @field_serializer("entries")
    def serialize_entries(self, value: np.ndarray) -> List[List[float]]:
        return value.tolist()

    @classmethod
    def unchecked(cls, entries: np.ndarray) -> "RawMatrix":
        return cls.model_construct(entries=np.asarray(entries, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def d(self) -> int:
        return self.entries.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self.entries

    def to_document(self) -> Dict[str, Any]:
        return {"d": self.d, "n": self.n, "entries": self.entries.tolist()}


class Labels(ArrayModel):
    """
    Class index per sample.

    Fields:
        y: integer labels in [0, num_classes)
        num_classes: class count; every class owns at least one sample
            unless allow_empty is set
        allow_empty: admit classes without samples (CE and its bounds only;
            class-mean and GNC computations still raise EmptyClassError)

    Single-class label sets are accepted so that per-class diagnostics can
    be evaluated on one class; the losses require two or more classes.
    """
    y: np.ndarray
    num_classes: int = Field(..., ge=1)
    allow_empty: bool = False

    @field_validator("y", mode="before")
    @classmethod
    def coerce_labels(cls, value: Any) -> np.ndarray:
        arr = np.array(value)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("labels must be a non-empty 1-D sequence", "y")
        if arr.dtype.kind == "f":
            if not np.all(arr == np.round(arr)):
                raise InvalidInputError("labels must be integers", "y")
        elif arr.dtype.kind not in "iu":
            raise InvalidInputError("labels must be integers", "y")
        arr = arr.astype(np.int64)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_classes(self) -> "Labels":
        if self.y.min() < 0 or self.y.max() >= self.num_classes:
            raise InvalidInputError(
                f"labels must lie in [0, {self.num_classes})", "y"
            )
        if not self.allow_empty:
            self.require_populated()
        return self

    def require_populated(self) -> None:
        """Raise EmptyClassError for the first class without samples."""
        empty = np.flatnonzero(self.counts == 0)
        if empty.size:
            raise EmptyClassError(int(empty[0]))

    @field_serializer("y")
    def serialize_labels(self, value: np.ndarray) -> List[int]:
        return value.tolist()

    @classmethod
    def from_counts(cls, counts) -> "Labels":
        """Labels ordered by class: counts[0] zeros, then counts[1] ones, ..."""
        counts = [int(c) for c in counts]
        for c, count in enumerate(counts):
            if count < 1:
                raise EmptyClassError(c)
        y = np.repeat(np.arange(len(counts)), counts)
        return cls(y=y, num_classes=len(counts))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.num_classes)

    def index_sets(self) -> List[np.ndarray]:
        """Sample indices A_c of each class, in ascending order."""
        return [np.flatnonzero(self.y == c) for c in range(self.num_classes)]
