"""Monte Carlo workers."""

from .trials import (
    PacReport,
    RoundTripReport,
    TrialRunner,
    pac_experiment,
    pooled_regime_segments,
    round_trip_experiment,
    sweep_round_trip,
)

__all__ = [
    "PacReport",
    "RoundTripReport",
    "TrialRunner",
    "pac_experiment",
    "pooled_regime_segments",
    "round_trip_experiment",
    "sweep_round_trip",
]
