from __future__ import annotations

import numpy as np
from fastapi import APIRouter, HTTPException

from backend.core.dynamics import build_regime, feasibility_check, simulate
from backend.core.schema import SocialSystemDocument
from backend.core.validation import ValidationError
from backend.domain import Schedule
from backend.routes._common import bad_request, parse

router = APIRouter(tags=["system"])


@router.post("/systems/feasibility")
async def check_feasibility(payload: dict) -> dict:
    system = parse(SocialSystemDocument, payload.get("system"), "system").to_domain()
    report = feasibility_check(system)
    return {
        "passed": report.passed,
        "rows": [
            {"index": row.index, "passed": row.passed, "margin": row.margin, "reason": row.reason}
            for row in report.rows
        ],
    }


@router.post("/systems/regimes")
async def regime_model(payload: dict) -> dict:
    system = parse(SocialSystemDocument, payload.get("system"), "system").to_domain()
    vartheta = payload.get("vartheta")
    if vartheta not in (-1, 1):
        raise HTTPException(status_code=400, detail="vartheta must be -1 or 1")
    try:
        regime = build_regime(system, vartheta)
    except ValidationError as exc:
        raise bad_request(exc) from exc
    return {"vartheta": vartheta, "a": regime.a.tolist(), "A": regime.A.tolist()}


@router.post("/simulations")
async def run_simulation(payload: dict) -> dict:
    system = parse(SocialSystemDocument, payload.get("system"), "system").to_domain()
    segments = payload.get("schedule")
    if not segments:
        raise HTTPException(status_code=400, detail="schedule is required")
    try:
        schedule = Schedule([tuple(item) for item in segments])
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"schedule: {exc}") from exc
    seed = payload.get("seed", system.noise.seed)
    try:
        traj = simulate(system, schedule, payload.get("x1"), rng=np.random.default_rng(seed))
    except ValidationError as exc:
        raise bad_request(exc) from exc
    return {"vartheta": traj.vartheta.tolist(), "y": traj.y.tolist(), "x": traj.x.tolist()}
