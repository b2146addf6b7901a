"""Parser for Voteview-style member ideology and presidential party tables."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from backend.core.hashing import sha256_file
from backend.core.validation import InputError
from backend.domain import IdeologyPanel

# raw Voteview member export -> simplified columns
RAW_COLUMNS = {
    "state_abbrev": "unit",
    "nokken_poole_dim1": "score",
}

PARTY_TOKENS = {
    "r": 1,
    "rep": 1,
    "republican": 1,
    "200": 1,
    "d": -1,
    "dem": -1,
    "democrat": -1,
    "democratic": -1,
    "100": -1,
}


def _read(path: Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise InputError(f"{path.name}: {exc}") from exc
    return frame.rename(columns={col: str(col).strip() for col in frame.columns})


def _normalise_members(frame: pd.DataFrame, chamber: str | None, source: str) -> pd.DataFrame:
    if "unit" not in frame.columns or "score" not in frame.columns:
        frame = frame.rename(columns={raw: new for raw, new in RAW_COLUMNS.items() if new not in frame.columns})
    missing = [column for column in ("congress", "unit", "score") if column not in frame.columns]
    if missing:
        raise InputError(f"{source}: missing columns {', '.join(missing)}")
    if chamber and "chamber" in frame.columns:
        frame = frame[frame["chamber"].astype(str).str.strip().str.lower() == chamber.lower()]
    frame = frame[["congress", "unit", "score"]].copy()
    frame["congress"] = pd.to_numeric(frame["congress"], errors="coerce")
    frame["score"] = pd.to_numeric(frame["score"], errors="coerce")
    frame["unit"] = frame["unit"].astype(str).str.strip()
    blank = frame["congress"].isna() | (frame["unit"] == "")
    if blank.any():
        raise InputError(f"{source}: {int(blank.sum())} rows without congress or unit")
    return frame.dropna(subset=["score"]).astype({"congress": int})


def party_label(token: object) -> int:
    key = str(token).strip().lower()
    if key.endswith(".0"):
        key = key[:-2]
    if key not in PARTY_TOKENS:
        raise InputError(f"unknown party token {token!r}")
    return PARTY_TOKENS[key]


def _presidents(frame: pd.DataFrame, source: str) -> dict[int, int]:
    missing = [column for column in ("congress", "party") if column not in frame.columns]
    if missing:
        raise InputError(f"{source}: missing columns {', '.join(missing)}")
    labels: dict[int, int] = {}
    for congress, party in zip(frame["congress"], frame["party"]):
        try:
            index = int(congress)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{source}: bad congress {congress!r}") from exc
        label = party_label(party)
        if labels.get(index, label) != label:
            raise InputError(f"{source}: congress {index} has conflicting parties")
        labels[index] = label
    return labels


def ingest_ideology(
    member_csv: Path,
    president_csv: Path,
    *,
    first: int | None = None,
    last: int | None = None,
    chamber: str | None = "Senate",
    units: list[str] | None = None,
) -> IdeologyPanel:
    """Per-unit mean ideology per congress with the president's party as regime."""
    members = _normalise_members(_read(member_csv), chamber, member_csv.name)
    parties = _presidents(_read(president_csv), president_csv.name)
    if members.empty:
        raise InputError(f"{member_csv.name}: no member scores")

    first = int(members["congress"].min()) if first is None else first
    last = int(members["congress"].max()) if last is None else last
    congresses = np.arange(first, last + 1)
    if congresses.size == 0:
        raise InputError(f"empty congress range {first}..{last}")
    absent = [int(c) for c in congresses if c not in parties]
    if absent:
        raise InputError(f"{president_csv.name}: no president party for congresses {absent}")

    in_range = members[(members["congress"] >= first) & (members["congress"] <= last)]
    if in_range.empty:
        raise InputError(f"no member scores within {first}..{last}")
    table = in_range.groupby(["unit", "congress"])["score"].mean().unstack("congress")
    table = table.reindex(columns=congresses)
    if units is not None:
        unknown = sorted(set(units) - set(table.index))
        if unknown:
            raise InputError(f"requested units without data: {unknown}")
        table = table.loc[list(units)]
    else:
        table = table.sort_index()

    gaps = table.isna().any(axis=1)
    dropped = sorted(table.index[gaps].tolist())
    if dropped:
        logger.bind(dropped=dropped).warning("dropping units with missing congresses")
    table = table[~gaps]
    if table.empty:
        raise InputError("every unit has a missing congress in the requested range")

    values = table.to_numpy(dtype=float)
    clamped = int(np.sum(np.abs(values) > 1.0))
    if clamped:
        logger.bind(clamped=clamped).warning("clamping ideology scores to [-1, 1]")
    values = np.clip(values, -1.0, 1.0)

    return IdeologyPanel(
        units=[str(unit) for unit in table.index],
        congresses=congresses,
        values=values,
        regime=np.array([parties[int(c)] for c in congresses]),
        dropped_units=dropped,
        clamped=clamped,
        sources={"members": sha256_file(member_csv), "presidents": sha256_file(president_csv)},
    )
