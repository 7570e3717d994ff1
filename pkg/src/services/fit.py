"""Least-squares fits on log-log axes."""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import pandas as pd

from src.errors import InvalidParameterError

MIN_RECORDS = 3


@dataclass(frozen=True)
class ScalingRecord:
    """One generated-and-triangulated size of a scaling run.

    Attributes:
        abscissa: The quantity the fit is taken against (n, m or row count)
        n: Points in the cloud
        spread: Measured spread
        n_edges: Finite Delaunay edges
        measure: The count the fit is taken on (n_edges unless the family says otherwise)
        n_triangles, n_tets: Remaining complexity counts
        euler_ok: Euler identity and the triangle/tet bounds held
        wall_time: Seconds spent triangulating
    """

    abscissa: float
    n: int
    spread: float
    n_edges: int
    measure: int
    n_triangles: int = 0
    n_tets: int = 0
    euler_ok: bool = True
    wall_time: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        row = {
            "abscissa": self.abscissa,
            "n": self.n,
            "spread": self.spread,
            "n_edges": self.n_edges,
            "measure": self.measure,
            "n_triangles": self.n_triangles,
            "n_tets": self.n_tets,
            "euler_ok": self.euler_ok,
        }
        if timings:
            row["wall_time"] = self.wall_time
        return row


def loglog_fit(x: Union[Sequence[float], pd.Series], y: Union[Sequence[float], pd.Series]) -> tuple[float, float, float]:
    """Fit log y = slope * log x + intercept.

    Args:
        x: Positive abscissae
        y: Positive values

    Returns:
        (slope, intercept, residual) where residual is the RMS of the log-space residuals
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise InvalidParameterError("log-log fit needs two equally long series of length >= 2")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParameterError("log-log fit needs strictly positive values")

    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), residual


@dataclass(frozen=True)
class ScalingFit:
    """Records of a scaling run and the fitted exponent of measure against abscissa."""

    records: tuple
    slope: float
    intercept: float
    residual: float

    def __post_init__(self):
        if len(self.records) < MIN_RECORDS:
            raise InvalidParameterError(f"a scaling fit needs at least {MIN_RECORDS} records, got {len(self.records)}")
        xs = [r.abscissa for r in self.records]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidParameterError("abscissae must be strictly increasing")
        if not math.isfinite(self.slope):
            raise InvalidParameterError("fitted slope is not finite")

    @classmethod
    def from_records(cls, records: Sequence[ScalingRecord]) -> "ScalingFit":
        records = tuple(sorted(records, key=lambda r: r.abscissa))
        if len(records) < MIN_RECORDS:
            raise InvalidParameterError(f"a scaling fit needs at least {MIN_RECORDS} records, got {len(records)}")
        slope, intercept, residual = loglog_fit([r.abscissa for r in records], [r.measure for r in records])
        return cls(records, slope, intercept, residual)

    def predicted(self, x: float) -> float:
        return math.exp(self.intercept) * x ** self.slope

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residual": self.residual,
                "records": len(self.records)}


def records_frame(records: Sequence[ScalingRecord], timings: bool = False) -> pd.DataFrame:
    """Records as a DataFrame sorted by abscissa."""
    columns = list(ScalingRecord(0.0, 0, 0.0, 0, 0).to_dict(timings))
    if not records:
        return pd.DataFrame(columns=columns)
    df = pd.DataFrame([r.to_dict(timings) for r in records], columns=columns)
    return df.sort_values("abscissa").reset_index(drop=True)
