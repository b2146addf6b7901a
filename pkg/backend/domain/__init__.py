"""Domain layer definitions."""

from .complexity import ConditionReport, DwellResult, NetworkSizeReport, PairCounts
from .estimation import DataMatrices, EstimationResult, InferenceSolution, RegimeEstimate, RowStatus, Segment
from .panel import IdeologyPanel, PredictionReport, SanityReport
from .system import FeasibilityReport, NoiseSpec, RegimeModel, RowFeasibility, Schedule, SocialSystem, Trajectory

__all__ = [
    "ConditionReport",
    "DataMatrices",
    "DwellResult",
    "EstimationResult",
    "FeasibilityReport",
    "IdeologyPanel",
    "InferenceSolution",
    "NetworkSizeReport",
    "NoiseSpec",
    "PairCounts",
    "PredictionReport",
    "RegimeEstimate",
    "RegimeModel",
    "RowFeasibility",
    "RowStatus",
    "SanityReport",
    "Schedule",
    "Segment",
    "SocialSystem",
    "Trajectory",
]
