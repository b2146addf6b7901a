"""Application services."""

from .harness import FittedModels, fit_models, predict, regime_windows, sanity_checks, split_regime_segments

__all__ = [
    "FittedModels",
    "fit_models",
    "predict",
    "regime_windows",
    "sanity_checks",
    "split_regime_segments",
]
