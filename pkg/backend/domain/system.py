"""Domain entities for the biased opinion-dynamics model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(slots=True)
class NoiseSpec:
    """Process/observation noise description for synthetic runs."""

    sigma_p: float = 0.0
    sigma_o: float = 0.0
    mu_o: float = 0.0
    seed: int | None = None


@dataclass(slots=True)
class SocialSystem:
    """Ground-truth parameters of one social system.

    ``W[i, j]`` is the influence of individual ``j`` on individual ``i``.
    """

    W: np.ndarray
    s: np.ndarray
    eps: np.ndarray
    eta: np.ndarray
    chi: np.ndarray
    m: int = 1
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self) -> None:
        self.W = np.atleast_2d(np.asarray(self.W, dtype=float))
        n = self.W.shape[0]
        self.s = _vector(self.s, n)
        self.eps = _vector(self.eps, n)
        self.eta = _vector(self.eta, n)
        self.chi = _vector(self.chi, n)
        if self.W.shape != (n, n):
            raise ValueError(f"W must be square, got shape {self.W.shape}")
        if self.m < 1:
            raise ValueError("a system needs at least one information source")
        for name in ("s", "eps", "eta", "chi"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if np.any(np.abs(self.s) > 1.0):
            raise ValueError("s must lie in [-1, 1]")
        for name in ("eps", "eta", "chi"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be nonnegative")

    @property
    def n(self) -> int:
        return int(self.W.shape[0])

    @property
    def row_sums(self) -> np.ndarray:
        return self.W.sum(axis=1)


@dataclass(slots=True)
class RegimeModel:
    """One extremal-opinion regime ``x(k+1) = a + A x(k)``."""

    vartheta: int
    a: np.ndarray
    A: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.a + self.A @ x


@dataclass(slots=True)
class Schedule:
    """Ordered runs of extremal opinions, each ``(vartheta, length)``."""

    segments: list[tuple[int, int]]

    def __post_init__(self) -> None:
        cleaned: list[tuple[int, int]] = []
        for vartheta, length in self.segments:
            if vartheta not in (-1, 1):
                raise ValueError(f"regime label must be -1 or +1, got {vartheta!r}")
            if int(length) < 1:
                raise ValueError("segment lengths must be at least 1")
            cleaned.append((int(vartheta), int(length)))
        if not cleaned:
            raise ValueError("schedule needs at least one segment")
        self.segments = cleaned

    @classmethod
    def two_block(cls, minus_length: int, plus_length: int) -> "Schedule":
        return cls([(-1, minus_length), (1, plus_length)])

    @property
    def length(self) -> int:
        return sum(length for _, length in self.segments)

    def labels(self) -> np.ndarray:
        return np.concatenate(
            [np.full(length, vartheta, dtype=int) for vartheta, length in self.segments]
        )

    def runs(self) -> list[tuple[int, int, int]]:
        """Return ``(vartheta, k, p)`` per run with 1-based inclusive steps."""
        out: list[tuple[int, int, int]] = []
        start = 1
        for vartheta, length in self.segments:
            out.append((vartheta, start, start + length - 1))
            start += length
        return out

    @property
    def p_minus(self) -> int | None:
        """End of the leading -1 block, if the schedule starts with one."""
        vartheta, length = self.segments[0]
        return length if vartheta == -1 else None


@dataclass(slots=True)
class Trajectory:
    """Observed (and, for synthetic runs, latent) opinions over time.

    Row ``q - 1`` holds step ``q``. The label of step ``q`` governs the
    transition ``q -> q + 1``.
    """

    y: np.ndarray
    vartheta: np.ndarray
    x: np.ndarray | None = None
    process_noise: np.ndarray | None = None
    observation_noise: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.y = np.atleast_2d(np.asarray(self.y, dtype=float))
        self.vartheta = np.asarray(self.vartheta, dtype=int)
        if self.vartheta.shape != (self.y.shape[0],):
            raise ValueError("one regime label per step is required")
        if self.x is not None:
            self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
            if self.x.shape != self.y.shape:
                raise ValueError("latent and observed states must align")

    @property
    def steps(self) -> int:
        return int(self.y.shape[0])

    @property
    def n(self) -> int:
        return int(self.y.shape[1])


@dataclass(slots=True)
class RowFeasibility:
    index: int
    passed: bool
    margin: float
    reason: str | None = None


@dataclass(slots=True)
class FeasibilityReport:
    rows: list[RowFeasibility]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def violations(self) -> list[RowFeasibility]:
        return [row for row in self.rows if not row.passed]


def _vector(values, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    arr = arr.reshape(-1)
    if arr.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got {arr.shape}")
    return arr
