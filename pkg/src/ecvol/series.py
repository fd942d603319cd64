"""Plain containers for observed data."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("series values must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Ordered real-valued observations, optionally dated (ISO-8601 strings)."""

    values: np.ndarray
    dates: tuple[str, ...] | None = None
    diagnostics: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_vector(self.values))
        if self.dates is not None:
            object.__setattr__(self, "dates", tuple(self.dates))
            if len(self.dates) != len(self.values):
                raise ValueError("dates and values differ in length")

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Strictly positive prices in chronological order."""

    prices: np.ndarray
    dates: tuple[str, ...] | None = None
    diagnostics: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "prices", _as_vector(self.prices))
        if self.dates is not None:
            object.__setattr__(self, "dates", tuple(self.dates))
            if len(self.dates) != len(self.prices):
                raise ValueError("dates and prices differ in length")

    def __len__(self) -> int:
        return len(self.prices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.prices, other.prices)


def as_values(series) -> np.ndarray:
    if isinstance(series, ReturnSeries):
        return series.values
    return np.asarray(series, dtype=float)
