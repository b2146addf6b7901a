"""Recovery of topology and bias parameters from the two regime estimates."""
from __future__ import annotations

import numpy as np
from loguru import logger

from backend.core.validation import DomainError
from backend.domain import EstimationResult, InferenceSolution, RowStatus

DENOMINATOR_ATOL = 1e-12
SCALE_ATOL = 1e-9
COHERENCE_ATOL = 1e-9
PLAUSIBLE_RANGE = (-0.5, 1.5)


def _row_forms(w_row: np.ndarray, i: int, s: float, eps: float, eta: float) -> tuple[np.ndarray, np.ndarray, float, float]:
    total = w_row.sum()
    plus = w_row + (s - 1.0) * eta / total * w_row
    minus = w_row - (1.0 + s) * eta / total * w_row
    plus[i] += (1.0 - s) * eps
    minus[i] += (1.0 + s) * eps
    a_plus = (1.0 - total) * s + (eps + eta) * (1.0 - s)
    a_minus = (1.0 - total) * s - (eps + eta) * (1.0 + s)
    return plus, minus, a_plus, a_minus


def infer(
    est: EstimationResult,
    tol_s: float = 1e-6,
    *,
    plausible: tuple[float, float] = PLAUSIBLE_RANGE,
) -> InferenceSolution:
    if tol_s <= 0:
        raise DomainError("tol_s must be positive")
    arrays = (est.A_plus, est.A_minus, est.a_plus, est.a_minus)
    if not all(np.all(np.isfinite(values)) for values in arrays):
        raise DomainError("estimation contains non-finite entries")

    n = est.n
    W_inf = np.full((n, n), np.nan)
    s_inf = np.full(n, np.nan)
    eps_inf = np.full(n, np.nan)
    eta_inf = np.full(n, np.nan)
    status: list[RowStatus] = []
    warnings: dict[int, list[str]] = {}
    errors: dict[int, str] = {}
    residuals: dict[int, float] = {}

    for i in range(n):
        plus_row, minus_row = est.A_plus[i], est.A_minus[i]
        a_plus, a_minus = est.a_plus[i], est.a_minus[i]
        diff_rows = plus_row.sum() - minus_row.sum()
        sum_rows = plus_row.sum() + minus_row.sum()
        diff_offsets = a_plus - a_minus

        denominator = 2.0 - diff_offsets - sum_rows
        if abs(denominator) < DENOMINATOR_ATOL:
            status.append(RowStatus.ERROR)
            errors[i] = "subconscious bias denominator vanishes"
            continue
        s = (a_plus + a_minus + diff_rows) / denominator
        s_inf[i] = s
        if abs(s) < tol_s:
            status.append(RowStatus.NEUTRAL_BIAS_UNRECOVERABLE)
            continue

        eps = diff_offsets / 4.0 - diff_rows / (4.0 * s)
        eta = diff_offsets / 4.0 + diff_rows / (4.0 * s)
        total = sum_rows / 2.0 + eta - eps
        if total <= 0:
            status.append(RowStatus.ERROR)
            errors[i] = "inferred influence sum is nonpositive"
            continue
        scale = 1.0 - eta / total
        if abs(scale) < SCALE_ATOL:
            status.append(RowStatus.ERROR)
            errors[i] = "topology scale singular"
            continue
        w_row = (plus_row + minus_row) / (2.0 * scale)
        w_row[i] -= eps / scale
        if abs(w_row.sum() - total) > COHERENCE_ATOL * max(1.0, float(np.abs(w_row).sum())):
            status.append(RowStatus.ERROR)
            errors[i] = "recovered influence row disagrees with its inferred sum"
            continue

        notes: list[str] = []
        low, high = plausible
        if not low <= eps <= high:
            notes.append(f"confirmation bias {eps:.4g} outside [{low}, {high}]")
        if not low <= eta <= high:
            notes.append(f"negativity bias {eta:.4g} outside [{low}, {high}]")
        negative = np.flatnonzero(w_row < 0)
        if negative.size:
            notes.append("negative influence weights at columns " + ", ".join(str(j) for j in negative))
        if notes:
            warnings[i] = notes

        rebuilt = _row_forms(w_row, i, s, eps, eta)
        residuals[i] = float(
            max(
                np.max(np.abs(rebuilt[0] - plus_row)),
                np.max(np.abs(rebuilt[1] - minus_row)),
                abs(rebuilt[2] - a_plus),
                abs(rebuilt[3] - a_minus),
            )
        )
        W_inf[i] = w_row
        eps_inf[i] = eps
        eta_inf[i] = eta
        status.append(RowStatus.OK)

    solution = InferenceSolution(
        W_inf=W_inf,
        s_inf=s_inf,
        eps_inf=eps_inf,
        eta_inf=eta_inf,
        row_status=status,
        warnings=warnings,
        errors=errors,
        residuals=residuals,
    )
    if solution.flagged_rows or solution.errored_rows or warnings:
        logger.bind(
            flagged=solution.flagged_rows,
            errored=solution.errored_rows,
            warned=sorted(warnings),
        ).warning("inference finished with unrecovered or suspicious rows")
    return solution


def rebuild(sol: InferenceSolution) -> EstimationResult:
    """Forward regime pair implied by an inference solution."""
    pending = [i for i, status in enumerate(sol.row_status) if status is not RowStatus.OK]
    if pending:
        raise DomainError(f"cannot rebuild rows that were not recovered: {pending}")
    n = sol.n
    A_plus, A_minus = np.empty((n, n)), np.empty((n, n))
    a_plus, a_minus = np.empty(n), np.empty(n)
    for i in range(n):
        if sol.W_inf[i].sum() <= 0:
            raise DomainError(f"row {i} has a nonpositive influence sum")
        A_plus[i], A_minus[i], a_plus[i], a_minus[i] = _row_forms(
            sol.W_inf[i], i, sol.s_inf[i], sol.eps_inf[i], sol.eta_inf[i]
        )
    return EstimationResult(A_plus=A_plus, A_minus=A_minus, a_plus=a_plus, a_minus=a_minus)
