"""Domain entities for regime estimation and social inference."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


@dataclass(slots=True)
class Segment:
    """Contiguous same-regime observations ``y(k) .. y(p)`` (rows)."""

    vartheta: int
    ys: np.ndarray
    k: int = 1
    p: int | None = None

    def __post_init__(self) -> None:
        self.ys = np.atleast_2d(np.asarray(self.ys, dtype=float))
        if self.p is None:
            self.p = self.k + self.ys.shape[0] - 1
        if self.p - self.k + 1 != self.ys.shape[0]:
            raise ValueError("segment indices do not match the number of samples")

    @property
    def length(self) -> int:
        return int(self.ys.shape[0])

    @property
    def n(self) -> int:
        return int(self.ys.shape[1])


@dataclass(slots=True)
class DataMatrices:
    """Differenced regressors ``X`` and shifted targets ``Y`` (columns are pairs)."""

    vartheta: int
    X: np.ndarray
    Y: np.ndarray
    pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def N(self) -> int:
        return int(self.X.shape[1])


@dataclass(slots=True)
class RegimeEstimate:
    vartheta: int
    A: np.ndarray
    a: np.ndarray
    gram_min_singular: float
    pairs: int
    transitions: int


@dataclass(slots=True)
class EstimationResult:
    A_plus: np.ndarray
    A_minus: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    gram_min_singular: dict[int, float] = field(default_factory=dict)
    provenance: dict[str, object] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.A_plus.shape[0])

    def regime(self, vartheta: int) -> tuple[np.ndarray, np.ndarray]:
        if vartheta == 1:
            return self.a_plus, self.A_plus
        return self.a_minus, self.A_minus


class RowStatus(str, Enum):
    OK = "ok"
    NEUTRAL_BIAS_UNRECOVERABLE = "neutral_bias_unrecoverable"
    ERROR = "error"


@dataclass(slots=True)
class InferenceSolution:
    """Recovered ``(W, s, eps, eta)``; rows not ``ok`` hold NaN where undefined."""

    W_inf: np.ndarray
    s_inf: np.ndarray
    eps_inf: np.ndarray
    eta_inf: np.ndarray
    row_status: list[RowStatus]
    warnings: dict[int, list[str]] = field(default_factory=dict)
    errors: dict[int, str] = field(default_factory=dict)
    residuals: dict[int, float] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.row_status)

    @property
    def ok_rows(self) -> list[int]:
        return [i for i, status in enumerate(self.row_status) if status is RowStatus.OK]

    @property
    def flagged_rows(self) -> list[int]:
        return [
            i for i, status in enumerate(self.row_status) if status is RowStatus.NEUTRAL_BIAS_UNRECOVERABLE
        ]

    @property
    def errored_rows(self) -> list[int]:
        return [i for i, status in enumerate(self.row_status) if status is RowStatus.ERROR]
