"""
Labeled optimization state: features, labels and class proxies.
"""
from typing import Optional, Union

import numpy as np
from pydantic import model_validator

from hugkit.core.exceptions import InvalidInputError
from hugkit.models.base import ArrayModel
from hugkit.models.geometry import Labels, PointConfig, RawMatrix

Matrix = Union[PointConfig, RawMatrix]


class LabeledState(ArrayModel):
    """
    Unconstrained features, their labels and one proxy per class.

    Fields:
        features: n x d features (PointConfig, or RawMatrix for the unnormalized variant)
        labels: class of each feature
        proxies: C x d proxies of the same kind as the features
    """
    features: Matrix
    labels: Labels
    proxies: Matrix

    @model_validator(mode="after")
    def check_shapes(self) -> "LabeledState":
        if type(self.features) is not type(self.proxies):
            raise InvalidInputError(
                "features and proxies must both be normalized or both raw", "proxies"
            )
        if self.features.d != self.proxies.d:
            raise InvalidInputError(
                f"feature dimension {self.features.d} != proxy dimension {self.proxies.d}",
                "proxies"
            )
        if self.labels.n != self.features.n:
            raise InvalidInputError(
                f"{self.labels.n} labels for {self.features.n} features", "labels"
            )
        if self.labels.num_classes != self.proxies.n:
            raise InvalidInputError(
                f"{self.labels.num_classes} classes but {self.proxies.n} proxies", "proxies"
            )
        return self

    @property
    def normalized(self) -> bool:
        return isinstance(self.features, PointConfig)

    @property
    def X(self) -> np.ndarray:
        return self.features.array

    @property
    def W(self) -> np.ndarray:
        return self.proxies.array

    @property
    def num_classes(self) -> int:
        return self.labels.num_classes

    def with_arrays(
        self,
        features: Optional[np.ndarray] = None,
        proxies: Optional[np.ndarray] = None,
        checked: bool = True
    ) -> "LabeledState":
        """
        Return a copy with replaced feature and/or proxy arrays.

        Args:
            features: New feature matrix, or None to keep the current one
            proxies: New proxy matrix, or None to keep the current one
            checked: Validate the new matrices (disable for derivative probes)
        """
        kind = type(self.features)
        update = {}
        for name, value in (("features", features), ("proxies", proxies)):
            if value is None:
                continue
            if checked:
                update[name] = kind.model_validate({_field_name(kind): value})
            else:
                update[name] = kind.unchecked(value)
        if not update:
            return self
        if checked:
            return LabeledState(
                features=update.get("features", self.features),
                labels=self.labels,
                proxies=update.get("proxies", self.proxies),
            )
        return self.model_copy(update=update)


def _field_name(kind: type) -> str:
    return "points" if kind is PointConfig else "entries"
