from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from backend.core.validation import InputError
from backend.domain import Trajectory

TRAJECTORY_COLUMNS = ["step", "regime", "unit", "y"]


def write_records_to_csv(path: Path, rows: Iterable[dict], *, float_format: str | None = None) -> Path:
    df = pd.DataFrame(rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=float_format)
    return path


def write_trajectory(path: Path, traj: Trajectory) -> Path:
    """Long format, one row per (step, unit); steps are 1-based."""
    steps, n = traj.y.shape
    frame = pd.DataFrame(
        {
            "step": np.repeat(np.arange(1, steps + 1), n),
            "regime": np.repeat(traj.vartheta, n),
            "unit": np.tile(np.arange(n), steps),
            "y": traj.y.reshape(-1),
        }
    )
    if traj.x is not None:
        frame["x"] = traj.x.reshape(-1)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def read_trajectory(path: Path) -> Trajectory:
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise InputError(f"{path.name}: {exc}") from exc

    missing = [column for column in TRAJECTORY_COLUMNS if column not in frame.columns]
    if missing:
        raise InputError(f"{path.name}: missing columns {', '.join(missing)}")
    if frame.empty:
        raise InputError(f"{path.name}: no rows")
    if frame[TRAJECTORY_COLUMNS].isna().any().any():
        raise InputError(f"{path.name}: blank cells")

    labels = frame.groupby("step")["regime"].agg(["min", "max"]).sort_index()
    if (labels["min"] != labels["max"]).any():
        raise InputError(f"{path.name}: regime label differs across units of one step")
    if not labels["min"].isin([-1, 1]).all():
        raise InputError(f"{path.name}: regime labels must be -1 or +1")
    steps = labels.index.to_numpy()
    if not np.array_equal(steps, np.arange(1, steps.size + 1)):
        raise InputError(f"{path.name}: steps must run 1..T without gaps")

    y = frame.pivot(index="step", columns="unit", values="y").sort_index()
    if y.isna().any().any():
        raise InputError(f"{path.name}: every unit needs a value at every step")
    x = None
    if "x" in frame.columns and frame["x"].notna().all():
        x = frame.pivot(index="step", columns="unit", values="x").sort_index().to_numpy()
    return Trajectory(y=y.to_numpy(), vartheta=labels["min"].to_numpy(), x=x)
