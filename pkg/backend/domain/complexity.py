"""Value objects reported by the sample-complexity checks."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(slots=True, frozen=True)
class PairCounts:
    l: int
    l_hat: int


@dataclass(slots=True)
class ConditionReport:
    """Both sides of the concentration and excitation conditions for one window."""

    k: int
    p: int
    n: int
    concentration: bool
    excitation: bool
    concentration_lhs: float
    concentration_rhs: float
    excitation_lhs: float
    excitation_rhs: float
    note: str | None = None

    @property
    def concentration_margin(self) -> float:
        return self.concentration_lhs - self.concentration_rhs

    @property
    def excitation_margin(self) -> float:
        return self.excitation_lhs - self.excitation_rhs

    @property
    def passed(self) -> bool:
        return self.concentration and self.excitation


@dataclass(slots=True)
class DwellResult:
    n: int
    k_start: int
    reachable: bool
    p: int | None = None
    report: ConditionReport | None = None

    @property
    def tau(self) -> int | None:
        if self.p is None:
            return None
        return self.p - self.k_start + 1


@dataclass(slots=True)
class NetworkSizeReport:
    """Scan over ``n = 1 .. n_limit``; pass vectors are indexed by ``n - 1``."""

    n_max: int
    require: tuple[str, ...]
    windows: tuple[tuple[int, int], ...]
    concentration: dict[tuple[int, int], list[bool]] = field(default_factory=dict)
    excitation: dict[tuple[int, int], list[bool]] = field(default_factory=dict)
    passed: list[bool] = field(default_factory=list)

    def passing_sizes(self) -> list[int]:
        return [index + 1 for index, ok in enumerate(self.passed) if ok]
