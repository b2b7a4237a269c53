"""
Per-iteration optimization records.
"""
import math
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field, model_validator

from hugkit.core.exceptions import InvalidInputError
from hugkit.schemas.gnc import TRAJECTORY_GNC_COLUMNS, GncReport

BASE_COLUMNS = ("iteration", "loss", "inter_term", "intra_term", "grad_norm")


class TrajectoryRecord(BaseModel):
    """
    One recorded iteration.
    """
    iteration: int = Field(..., ge=0)
    loss: float
    inter_term: float
    intra_term: float
    grad_norm: float = Field(..., ge=0)
    proxy_energy: Optional[float] = None
    gnc: Optional[GncReport] = None

    model_config = {
        "frozen": True
    }

    @model_validator(mode="after")
    def check_finite(self) -> "TrajectoryRecord":
        for name in ("loss", "inter_term", "intra_term", "grad_norm"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")
        return self


class Trajectory(BaseModel):
    """
    Ordered records with strictly increasing iterations.
    """
    records: List[TrajectoryRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_order(self) -> "Trajectory":
        iterations = [r.iteration for r in self.records]
        if any(b <= a for a, b in zip(iterations, iterations[1:])):
            raise ValueError("trajectory iterations must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: TrajectoryRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise InvalidInputError(
                f"iteration {record.iteration} does not follow {self.records[-1].iteration}",
                "iteration"
            )
        self.records.append(record)

    @property
    def has_gnc(self) -> bool:
        return any(r.gnc is not None for r in self.records)

    def to_frame(self) -> pd.DataFrame:
        """
        Tabulate the trajectory.

        GNC columns are present when any record carries a snapshot and are
        empty on records without one. proxy_energy follows them when recorded.
        """
        columns = list(BASE_COLUMNS)
        with_gnc = self.has_gnc
        with_proxy_energy = any(r.proxy_energy is not None for r in self.records)
        if with_gnc:
            columns += list(TRAJECTORY_GNC_COLUMNS)
        if with_proxy_energy:
            columns.append("proxy_energy")

        rows = []
        for record in self.records:
            row = {name: getattr(record, name) for name in BASE_COLUMNS}
            if with_gnc:
                for name in TRAJECTORY_GNC_COLUMNS:
                    row[name] = getattr(record.gnc, name) if record.gnc is not None else None
            if with_proxy_energy:
                row["proxy_energy"] = record.proxy_energy
            rows.append(row)

        frame = pd.DataFrame(rows, columns=columns)
        return frame.astype({"iteration": "int64"})

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the trajectory with round-trip float precision."""
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path
