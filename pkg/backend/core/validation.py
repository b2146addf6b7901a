from __future__ import annotations

from typing import Iterable

import numpy as np


class ValidationError(Exception):
    """Raised when domain validation fails."""


class DomainError(ValidationError):
    """Input lies outside the admissible domain of an operation."""


class InfeasibleSystemError(ValidationError):
    """Resistance would turn negative for some reachable state."""


class RankDeficiencyError(ValidationError):
    """The regressor Gram matrix is singular at working precision."""

    def __init__(self, message: str, directions: np.ndarray, singular_values: np.ndarray) -> None:
        super().__init__(message)
        self.directions = directions
        self.singular_values = singular_values


class InsufficientDataError(ValidationError):
    """Not enough samples to form a single differenced pair or transition."""


class ConfigError(ValidationError):
    """Configuration values are invalid or make a condition undefined."""


class DwellNotReachableError(ValidationError):
    """The dwell-time search exhausted its cap."""

    def __init__(self, message: str, cap: int) -> None:
        super().__init__(message)
        self.cap = cap


class InputError(ValidationError):
    """Malformed input file or unknown token."""


def require_unit_interval(name: str, values: float | Iterable[float], *, atol: float = 0.0) -> None:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < -1.0 - atol) or np.any(arr > 1.0 + atol):
        raise DomainError(f"{name} must lie in [-1, 1]")


def require_nonnegative(name: str, values: float | Iterable[float]) -> None:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be finite and nonnegative")


def require_regime(vartheta: int) -> int:
    if vartheta not in (-1, 1):
        raise DomainError(f"regime label must be -1 or +1, got {vartheta!r}")
    return int(vartheta)
