"""Output writers."""

from .estimation_json import write_estimation, write_inference
from .plot_data import write_panel, write_prediction_errors, write_prediction_trajectories

__all__ = [
    "write_estimation",
    "write_inference",
    "write_panel",
    "write_prediction_errors",
    "write_prediction_trajectories",
]
