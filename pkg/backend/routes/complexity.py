from __future__ import annotations

from fastapi import APIRouter, HTTPException

from backend.core.complexity import CONDITIONS, max_network_size, min_dwell
from backend.core.validation import ValidationError
from backend.routes._common import bad_request, harness_config, pac_config

router = APIRouter(tags=["complexity"])


@router.post("/dwell")
async def dwell_time(payload: dict) -> dict:
    n = payload.get("n")
    if not isinstance(n, int) or n < 1:
        raise HTTPException(status_code=400, detail="n must be a positive integer")
    cfg = pac_config(payload)
    try:
        cap = payload.get("cap") or harness_config().dwell_cap
        result = min_dwell(n, cfg, int(payload.get("k_start", 1)), cap)
    except ValidationError as exc:
        raise bad_request(exc) from exc
    body: dict = {"n": n, "k_start": result.k_start, "reachable": result.reachable, "p": result.p, "tau": result.tau}
    if result.report is not None:
        body["concentration_margin"] = result.report.concentration_margin
        body["excitation_margin"] = result.report.excitation_margin
    return body


@router.post("/network-size")
async def network_size(payload: dict) -> dict:
    windows = payload.get("windows")
    if not isinstance(windows, list) or len(windows) != 2 or any(len(window) != 2 for window in windows):
        raise HTTPException(status_code=400, detail="windows must be two [k, p] pairs")
    cfg = pac_config(payload)
    require = payload.get("require") or list(CONDITIONS)
    (k_minus, p_minus), (k_plus, p_plus) = windows
    try:
        report = max_network_size(k_minus, p_minus, k_plus, p_plus, cfg, require=require)
    except ValidationError as exc:
        raise bad_request(exc) from exc
    return {"n_max": report.n_max, "require": list(report.require), "passing": report.passing_sizes()}
