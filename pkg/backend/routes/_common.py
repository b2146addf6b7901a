from __future__ import annotations

from typing import Any

from fastapi import HTTPException
from pydantic import BaseModel, ValidationError as PydanticValidationError

from backend.core.schema import HarnessConfig, PacConfig, load_harness_config, load_pac_config
from backend.core.settings import get_settings
from backend.core.validation import ValidationError


def parse(model: type[BaseModel], data: Any, field: str) -> Any:
    if data is None:
        raise HTTPException(status_code=400, detail=f"{field} is required")
    try:
        return model.model_validate(data)
    except PydanticValidationError as exc:
        raise HTTPException(status_code=400, detail=f"{field}: {exc.errors()[0]['msg']}") from exc


def pac_config(payload: dict) -> PacConfig:
    overrides = payload.get("config") or {}
    if not isinstance(overrides, dict):
        raise HTTPException(status_code=400, detail="config must be an object")
    try:
        return load_pac_config(get_settings().pac_config, **overrides)
    except ValidationError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def bad_request(exc: ValidationError) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def harness_config() -> HarnessConfig:
    try:
        return load_harness_config(get_settings().harness_config)
    except ValidationError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
