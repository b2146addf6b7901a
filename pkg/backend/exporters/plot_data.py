"""Tidy CSV tables for external plotting tools."""

from __future__ import annotations

from pathlib import Path

from backend.core.csvio import write_records_to_csv
from backend.domain import IdeologyPanel, PredictionReport

FLOAT_FORMAT = "%.10f"


def write_prediction_trajectories(path: Path, report: PredictionReport) -> Path:
    rows = []
    for i, unit in enumerate(report.units):
        for q, congress in enumerate(report.congresses):
            for model, values in (
                ("observed", report.observed),
                ("switching", report.switching),
                ("fixed", report.fixed),
            ):
                rows.append({"unit": unit, "congress": int(congress), "model": model, "value": float(values[i, q])})
    return write_records_to_csv(path, rows, float_format=FLOAT_FORMAT)


def write_prediction_errors(path: Path, report: PredictionReport) -> Path:
    rows = []
    for i, unit in enumerate(report.units):
        rows.append({"unit": unit, "model": "switching", "error": float(report.errors_switching[i])})
        rows.append({"unit": unit, "model": "fixed", "error": float(report.errors_fixed[i])})
    return write_records_to_csv(path, rows, float_format=FLOAT_FORMAT)


def write_panel(path: Path, panel: IdeologyPanel) -> Path:
    """Sorted long-format panel; identical panels give identical bytes."""
    order = sorted(range(len(panel.units)), key=lambda i: panel.units[i])
    rows = [
        {
            "unit": panel.units[i],
            "congress": int(congress),
            "value": float(panel.values[i, q]),
            "regime": int(panel.regime[q]),
        }
        for i in order
        for q, congress in enumerate(panel.congresses)
    ]
    return write_records_to_csv(path, rows, float_format=FLOAT_FORMAT)
