from __future__ import annotations

from fastapi import APIRouter, HTTPException

from backend.core.estimator import estimate
from backend.core.inference import infer
from backend.core.schema import EstimationDocument, InferenceDocument
from backend.core.validation import ValidationError
from backend.domain import Trajectory
from backend.routes._common import bad_request, harness_config, parse

router = APIRouter(tags=["estimation"])


@router.post("/estimations")
async def run_estimation(payload: dict) -> dict:
    y = payload.get("y")
    labels = payload.get("vartheta")
    if not y or not labels:
        raise HTTPException(status_code=400, detail="y and vartheta are required")
    if not isinstance(labels, list) or any(label not in (-1, 1) for label in labels):
        raise HTTPException(status_code=400, detail="vartheta labels must be -1 or 1")
    try:
        traj = Trajectory(y=y, vartheta=labels)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    try:
        est = estimate(traj)
    except ValidationError as exc:
        raise bad_request(exc) from exc
    return EstimationDocument.from_domain(est).model_dump(mode="json")


@router.post("/inferences")
async def run_inference(payload: dict) -> dict:
    est = parse(EstimationDocument, payload.get("estimation"), "estimation").to_domain()
    harness = harness_config()
    tol_s = payload.get("tol_s", harness.tol_s)
    try:
        sol = infer(est, tol_s=float(tol_s), plausible=(harness.plausible_low, harness.plausible_high))
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail="tol_s must be a number") from exc
    except ValidationError as exc:
        raise bad_request(exc) from exc
    return InferenceDocument.from_domain(sol).model_dump(mode="json")
