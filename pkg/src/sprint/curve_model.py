"""Characteristic curves: percent-of-total cumulative profiles on a common grid.

A raw :class:`MeasurementSeries` (absolute values over normalized time) is
resampled to ``m`` equidistant checkpoints ``1/m, 2/m, ..., 1`` and rescaled
so the final checkpoint sits at 100 percent. Curves produced this way are
directly comparable between projects of different size and duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    BadPrefix,
    EmptyInput,
    GranularityMismatch,
    InvalidCurve,
    InvalidGranularity,
    MalformedSeries,
    ZeroTotal,
)

DEFAULT_GRANULARITY = 10
CURVE_TOL = 1e-9

Mode = Literal["incremental", "cumulative"]


def check_granularity(m: int) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 2:
        raise InvalidGranularity(f"granularity must be an integer >= 2, got {m!r}")
    return int(m)


def checkpoints(m: int) -> np.ndarray:
    m = check_granularity(m)
    return np.arange(1, m + 1, dtype=float) / m


@dataclass(frozen=True)
class MeasurementSeries:
    """Absolute attribute values of one project over normalized time."""

    project_id: str
    points: tuple[tuple[float, float], ...]
    mode: Mode = "cumulative"

    def __post_init__(self) -> None:
        pts = tuple((float(t), float(v)) for t, v in self.points)
        object.__setattr__(self, "points", pts)
        if self.mode not in ("incremental", "cumulative"):
            raise MalformedSeries(f"{self.project_id}: unknown mode {self.mode!r}")
        if len(pts) < 2:
            raise MalformedSeries(f"{self.project_id}: need at least 2 points, got {len(pts)}")
        times = [t for t, _ in pts]
        values = [v for _, v in pts]
        if any(not (0.0 <= t <= 1.0) or math.isnan(t) for t in times):
            raise MalformedSeries(f"{self.project_id}: times must lie in [0, 1]")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise MalformedSeries(f"{self.project_id}: times must be strictly increasing")
        if any(not (v >= 0.0) or math.isinf(v) for v in values):
            raise MalformedSeries(f"{self.project_id}: values must be finite and non-negative")
        if self.mode == "cumulative" and any(b < a for a, b in zip(values, values[1:])):
            raise MalformedSeries(f"{self.project_id}: cumulative values must be nondecreasing")
        if self.cumulative()[-1] <= 0.0:
            raise ZeroTotal(f"{self.project_id}: final cumulative value is 0")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.points])

    def cumulative(self) -> np.ndarray:
        values = np.array([v for _, v in self.points])
        if self.mode == "incremental":
            return np.cumsum(values)
        return values

    @property
    def total(self) -> float:
        return float(self.cumulative()[-1])

    def scaled(self, factor: float) -> "MeasurementSeries":
        return MeasurementSeries(
            self.project_id, tuple((t, v * factor) for t, v in self.points), self.mode
        )


@dataclass(frozen=True)
class CharacteristicCurve:
    """Cumulative percentages at checkpoints ``1..m``; the last one is 100."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise InvalidCurve(f"curve needs at least 2 checkpoints, got {len(vals)}")
        if any(math.isnan(v) or v < -CURVE_TOL or v > 100.0 + CURVE_TOL for v in vals):
            raise InvalidCurve("curve values must lie in [0, 100]")
        if any(b < a - CURVE_TOL for a, b in zip(vals, vals[1:])):
            raise InvalidCurve("curve values must be nondecreasing")
        if abs(vals[-1] - 100.0) > CURVE_TOL:
            raise InvalidCurve(f"curve must end at 100, ends at {vals[-1]!r}")

    @property
    def m(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def _resample(times: np.ndarray, cum: np.ndarray, grid: np.ndarray, total: float) -> np.ndarray:
    # np.interp holds the end values constant outside [times[0], times[-1]]
    pct = np.interp(grid, times, cum) / total * 100.0
    return np.maximum.accumulate(pct)


def normalize_series(series: MeasurementSeries, m: int = DEFAULT_GRANULARITY) -> CharacteristicCurve:
    """Resample ``series`` to ``m`` checkpoints as percent of its final total.

    Incremental series are summed first. Between samples the cumulative
    series is interpolated linearly; before the first sample it is held at
    the first value and after the last sample at the final value.
    """
    grid = checkpoints(m)
    cum = series.cumulative()
    total = float(cum[-1])
    if total <= 0.0:
        raise ZeroTotal(f"{series.project_id}: final cumulative value is 0")
    pct = np.clip(_resample(series.times, cum, grid, total), 0.0, 100.0)
    pct[-1] = 100.0
    return CharacteristicCurve(tuple(pct.tolist()))


def observed_percentages(
    points: Sequence[tuple[float, float]],
    baseline_total: float,
    m: int = DEFAULT_GRANULARITY,
    mode: Mode = "cumulative",
) -> list[float]:
    """Cumulative actuals as percent of ``baseline_total`` at every reached checkpoint.

    ``points`` are (normalized time, value) pairs of an in-flight project.
    Checkpoint ``i`` counts as reached once a sample exists at or after
    ``i/m``. Values may exceed 100 when the project overruns its plan.
    """
    if not points:
        return []
    grid = checkpoints(m)
    times = np.array([float(t) for t, _ in points])
    values = np.array([float(v) for _, v in points])
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise MalformedSeries("in-flight times must be non-negative and strictly increasing")
    if np.any(values < 0):
        raise MalformedSeries("in-flight values must be non-negative")
    cum = np.cumsum(values) if mode == "incremental" else values
    if np.any(np.diff(cum) < 0):
        raise MalformedSeries("cumulative in-flight values must be nondecreasing")
    reached = grid[grid <= times[-1] + 1e-12]
    if reached.size == 0:
        return []
    return _resample(times, cum, reached, float(baseline_total)).tolist()


def _same_length(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise GranularityMismatch(f"granularity mismatch: {len(a)} vs {len(b)}")


def curve_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two curves of equal granularity."""
    _same_length(a, b)
    return math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(a, b)))


def prefix_distance(a: Sequence[float], b: Sequence[float], k: int) -> float:
    """Root-mean-square difference over the first ``k`` checkpoints.

    Either argument may be a bare prefix of length ``>= k``; when both are
    full curves they must share their granularity.
    """
    if isinstance(a, CharacteristicCurve) and isinstance(b, CharacteristicCurve):
        _same_length(a, b)
    limit = min(len(a), len(b))
    if not 1 <= k <= limit:
        raise BadPrefix(f"prefix length {k} outside 1..{limit}")
    return math.sqrt(math.fsum((a[i] - b[i]) ** 2 for i in range(k)) / k)


def mean_curve(curves: Iterable[CharacteristicCurve]) -> CharacteristicCurve:
    """Pointwise arithmetic mean of curves sharing one granularity."""
    curves = list(curves)
    if not curves:
        raise EmptyInput("mean_curve needs at least one curve")
    m = len(curves[0])
    for c in curves[1:]:
        _same_length(curves[0], c)
    n = len(curves)
    return CharacteristicCurve(tuple(math.fsum(c[i] for c in curves) / n for i in range(m)))
