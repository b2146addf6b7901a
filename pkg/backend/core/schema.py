from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from backend.core.settings import CONFIG_DIR
from backend.core.validation import ConfigError, InputError
from backend.domain import EstimationResult, InferenceSolution, NoiseSpec, RowStatus, SocialSystem

FORMAT_VERSION = 1
COLUMN_ORDER = "g-major: for g=k..p-2, for j=g+1..p-1"


class PacConfig(BaseModel):
    """Constants of the dwell-time conditions."""

    model_config = ConfigDict(extra="forbid")

    phi: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)
    eps_net: float = Field(ge=0, lt=0.5)
    rho: float | None = Field(default=None, gt=0)
    varrho1: float = Field(gt=0)
    varrho2: float = Field(gt=0)
    c_univ: float = Field(gt=0)
    kappa: float = Field(gt=0)
    gamma: float = Field(gt=0)
    s_upper: float = Field(gt=0, le=1)
    s_lower: float = Field(gt=0)
    sigma_o: float = Field(ge=0)
    sigma_p: float = Field(ge=0)

    @model_validator(mode="after")
    def _rho_below_varrho1(self) -> "PacConfig":
        if self.resolved_rho >= self.varrho1:
            raise ValueError("rho must be strictly below varrho1")
        return self

    @property
    def resolved_rho(self) -> float:
        return self.rho if self.rho is not None else self.varrho1 / 1.06

    def with_overrides(self, **updates: Any) -> "PacConfig":
        data = self.model_dump()
        data.update({key: value for key, value in updates.items() if value is not None})
        try:
            return PacConfig.model_validate(data)
        except PydanticValidationError as exc:
            raise ConfigError(str(exc)) from exc


class HarnessConfig(BaseModel):
    sanity_horizon: int = Field(default=100, ge=1)
    sanity_initial_conditions: int = Field(default=1000, ge=1)
    sanity_seed: int = Field(default=0, ge=0)
    tol_s: float = Field(default=1e-6, gt=0)
    plausible_low: float = -0.5
    plausible_high: float = 1.5
    dwell_cap: int = Field(default=100_000, ge=3)
    fit_first: int = 40
    fit_last: int = 106
    predict_first: int = 107
    predict_last: int = 116
    chamber: str = "Senate"


def _load_yaml(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with path.open("r", encoding="utf-8") as fp:
        data = yaml.safe_load(fp) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file must hold a mapping: {path}")
    return data


def load_pac_config(path: Path | None = None, **overrides: Any) -> PacConfig:
    data = _load_yaml(path or CONFIG_DIR / "pac.default.yaml")
    data.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return PacConfig.model_validate(data)
    except PydanticValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_harness_config(path: Path | None = None) -> HarnessConfig:
    try:
        return HarnessConfig.model_validate(_load_yaml(path or CONFIG_DIR / "harness.default.yaml"))
    except PydanticValidationError as exc:
        raise ConfigError(str(exc)) from exc


class NoiseDocument(BaseModel):
    sigma_p: float = Field(default=0.0, ge=0)
    sigma_o: float = Field(default=0.0, ge=0)
    mu_o: float = 0.0
    seed: int | None = None


class SocialSystemDocument(BaseModel):
    format_version: Literal[1] = FORMAT_VERSION
    n: int = Field(ge=1)
    m: int = Field(default=1, ge=1)
    W: list[list[float]]
    s: list[float]
    eps: list[float]
    eta: list[float]
    chi: list[float]
    noise: NoiseDocument = Field(default_factory=NoiseDocument)

    @model_validator(mode="after")
    def _shapes(self) -> "SocialSystemDocument":
        if len(self.W) != self.n or any(len(row) != self.n for row in self.W):
            raise ValueError("W must be n x n")
        for name in ("s", "eps", "eta", "chi"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name} must have length n")
        if any(not -1.0 <= value <= 1.0 for value in self.s):
            raise ValueError("s must lie in [-1, 1]")
        for name in ("eps", "eta", "chi"):
            if any(not value >= 0 for value in getattr(self, name)):
                raise ValueError(f"{name} must be nonnegative")
        return self

    def to_domain(self) -> SocialSystem:
        return SocialSystem(
            W=np.array(self.W),
            s=np.array(self.s),
            eps=np.array(self.eps),
            eta=np.array(self.eta),
            chi=np.array(self.chi),
            m=self.m,
            noise=NoiseSpec(**self.noise.model_dump()),
        )

    @classmethod
    def from_domain(cls, sys: SocialSystem) -> "SocialSystemDocument":
        return cls(
            n=sys.n,
            m=sys.m,
            W=sys.W.tolist(),
            s=sys.s.tolist(),
            eps=sys.eps.tolist(),
            eta=sys.eta.tolist(),
            chi=sys.chi.tolist(),
            noise=NoiseDocument(
                sigma_p=sys.noise.sigma_p, sigma_o=sys.noise.sigma_o, mu_o=sys.noise.mu_o, seed=sys.noise.seed
            ),
        )


class EstimationDocument(BaseModel):
    format_version: Literal[1] = FORMAT_VERSION
    n: int = Field(ge=1)
    layout: Literal["row-major"] = "row-major"
    column_order: str = COLUMN_ORDER
    A_plus: list[list[float]]
    A_minus: list[list[float]]
    a_plus: list[float]
    a_minus: list[float]
    gram_min_singular: dict[str, float] = Field(default_factory=dict)
    provenance: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _shapes(self) -> "EstimationDocument":
        for name in ("A_plus", "A_minus"):
            matrix = getattr(self, name)
            if len(matrix) != self.n or any(len(row) != self.n for row in matrix):
                raise ValueError(f"{name} must be n x n")
        for name in ("a_plus", "a_minus"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name} must have length n")
        arrays = (self.A_plus, self.A_minus, self.a_plus, self.a_minus)
        if not all(np.isfinite(np.asarray(values, dtype=float)).all() for values in arrays):
            raise ValueError("estimation entries must be finite")
        return self

    def to_domain(self) -> EstimationResult:
        return EstimationResult(
            A_plus=np.array(self.A_plus),
            A_minus=np.array(self.A_minus),
            a_plus=np.array(self.a_plus),
            a_minus=np.array(self.a_minus),
            gram_min_singular={int(key): value for key, value in self.gram_min_singular.items()},
            provenance=dict(self.provenance),
        )

    @classmethod
    def from_domain(cls, est: EstimationResult) -> "EstimationDocument":
        return cls(
            n=est.n,
            A_plus=est.A_plus.tolist(),
            A_minus=est.A_minus.tolist(),
            a_plus=est.a_plus.tolist(),
            a_minus=est.a_minus.tolist(),
            gram_min_singular={f"{key:+d}": float(value) for key, value in est.gram_min_singular.items()},
            provenance=dict(est.provenance),
        )


class InferenceRowDocument(BaseModel):
    index: int
    status: RowStatus
    s: float | None = None
    eps: float | None = None
    eta: float | None = None
    W: list[float] | None = None
    warnings: list[str] = Field(default_factory=list)
    error: str | None = None
    residual: float | None = None


class InferenceDocument(BaseModel):
    format_version: Literal[1] = FORMAT_VERSION
    n: int
    rows: list[InferenceRowDocument]

    @classmethod
    def from_domain(cls, sol: InferenceSolution) -> "InferenceDocument":
        rows: list[InferenceRowDocument] = []
        for i, status in enumerate(sol.row_status):
            ok = status is RowStatus.OK
            s_value = sol.s_inf[i]
            rows.append(
                InferenceRowDocument(
                    index=i,
                    status=status,
                    s=None if np.isnan(s_value) else float(s_value),
                    eps=float(sol.eps_inf[i]) if ok else None,
                    eta=float(sol.eta_inf[i]) if ok else None,
                    W=sol.W_inf[i].tolist() if ok else None,
                    warnings=list(sol.warnings.get(i, [])),
                    error=sol.errors.get(i),
                    residual=sol.residuals.get(i),
                )
            )
        return cls(n=sol.n, rows=rows)


def read_document(path: Path, model: type[BaseModel]) -> Any:
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except PydanticValidationError as exc:
        raise InputError(f"{path.name}: {exc}") from exc


def write_document(path: Path, document: BaseModel) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    return path
