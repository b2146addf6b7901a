"""Domain entities for empirical ideology panels and their experiments."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(slots=True)
class IdeologyPanel:
    """Unit-by-congress ideology scores with the president's party per congress."""

    units: list[str]
    congresses: np.ndarray
    values: np.ndarray
    regime: np.ndarray
    dropped_units: list[str] = field(default_factory=list)
    clamped: int = 0
    sources: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.congresses = np.asarray(self.congresses, dtype=int)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        self.regime = np.asarray(self.regime, dtype=int)
        if self.values.shape != (len(self.units), self.congresses.size):
            raise ValueError("panel values must be units x congresses")
        if self.regime.shape != self.congresses.shape:
            raise ValueError("one regime label per congress is required")

    def column(self, congress: int) -> int:
        hits = np.flatnonzero(self.congresses == congress)
        if hits.size == 0:
            raise KeyError(congress)
        return int(hits[0])

    def select(self, units: list[str]) -> "IdeologyPanel":
        missing = [unit for unit in units if unit not in self.units]
        if missing:
            raise KeyError(", ".join(missing))
        rows = [self.units.index(unit) for unit in units]
        return IdeologyPanel(
            units=list(units),
            congresses=self.congresses.copy(),
            values=self.values[rows],
            regime=self.regime.copy(),
            dropped_units=list(self.dropped_units),
            clamped=self.clamped,
            sources=dict(self.sources),
        )

    def window(self, first: int, last: int) -> "IdeologyPanel":
        mask = (self.congresses >= first) & (self.congresses <= last)
        return IdeologyPanel(
            units=list(self.units),
            congresses=self.congresses[mask],
            values=self.values[:, mask],
            regime=self.regime[mask],
            dropped_units=list(self.dropped_units),
            clamped=self.clamped,
            sources=dict(self.sources),
        )


@dataclass(slots=True)
class PredictionReport:
    units: list[str]
    congresses: np.ndarray
    observed: np.ndarray
    switching: np.ndarray
    fixed: np.ndarray
    errors_switching: np.ndarray
    errors_fixed: np.ndarray

    @property
    def mean_switching(self) -> float:
        return float(np.mean(self.errors_switching))

    @property
    def mean_fixed(self) -> float:
        return float(np.mean(self.errors_fixed))

    @property
    def switching_wins(self) -> int:
        return int(np.sum(self.errors_switching < self.errors_fixed))


@dataclass(slots=True)
class SanityReport:
    entries_bounded: bool
    offsets_bounded: bool
    trajectories_bounded: bool | None
    entry_violations: list[tuple[int, int, int, float]] = field(default_factory=list)
    offset_values: list[float] = field(default_factory=list)
    offset_violations: list[int] = field(default_factory=list)
    max_excursion: float | None = None

    @property
    def passed(self) -> bool:
        return self.entries_bounded and self.offsets_bounded and self.trajectories_bounded is not False
