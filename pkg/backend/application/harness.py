"""Use cases on empirical ideology panels: splitting, fitting, prediction, sanity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from backend.core.estimator import estimate, estimate_fixed
from backend.core.validation import DomainError, InsufficientDataError
from backend.domain import EstimationResult, IdeologyPanel, PredictionReport, RegimeEstimate, SanityReport, Segment

BOUND_ATOL = 1e-12


@dataclass(slots=True)
class FittedModels:
    switching: EstimationResult
    fixed: RegimeEstimate


def _columns(panel: IdeologyPanel, first: int | None, last: int | None) -> np.ndarray:
    first = int(panel.congresses[0]) if first is None else first
    last = int(panel.congresses[-1]) if last is None else last
    mask = (panel.congresses >= first) & (panel.congresses <= last)
    if not mask.any():
        raise DomainError(f"no congresses within {first}..{last}")
    return np.flatnonzero(mask)


def split_regime_segments(
    panel: IdeologyPanel,
    first: int | None = None,
    last: int | None = None,
    *,
    strict: bool = False,
) -> dict[int, list[Segment]]:
    """Maximal same-party runs pooled per regime.

    Runs of one sample are dropped; with ``strict`` runs shorter than three
    (no differenced pair) are dropped as well.
    """
    cols = _columns(panel, first, last)
    labels = panel.regime[cols]
    shortest = 3 if strict else 2
    pools: dict[int, list[Segment]] = {1: [], -1: []}
    start = 0
    for q in range(1, labels.size + 1):
        if q == labels.size or labels[q] != labels[start]:
            if q - start >= shortest:
                pools[int(labels[start])].append(
                    Segment(
                        vartheta=int(labels[start]),
                        ys=panel.values[:, cols[start:q]].T,
                        k=start + 1,
                        p=q,
                    )
                )
            start = q
    for vartheta, segs in pools.items():
        if not segs:
            raise InsufficientDataError(f"regime {vartheta:+d} has no run long enough to difference")
    return pools


def regime_windows(n_minus: int, n_plus: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Concatenated windows for pooled regime sizes: minus first, then plus."""
    if n_minus < 1 or n_plus < 1:
        raise DomainError("pooled regime sizes must be positive")
    return (1, n_minus), (n_minus + 1, n_minus + n_plus)


def fit_models(panel: IdeologyPanel, first: int | None = None, last: int | None = None) -> FittedModels:
    """Switching pair from party-separated runs and one fixed model from the mixed block."""
    pools = split_regime_segments(panel, first, last, strict=True)
    switching = estimate(pools[1] + pools[-1])
    cols = _columns(panel, first, last)
    mixed = Segment(vartheta=0, ys=panel.values[:, cols].T, k=1)
    fixed = estimate_fixed([mixed])
    logger.bind(units=len(panel.units), congresses=int(cols.size)).info("fitted switching and fixed models")
    return FittedModels(switching=switching, fixed=fixed)


def predict(panel: IdeologyPanel, models: FittedModels, first: int, last: int) -> PredictionReport:
    """Roll both models from the observed values at ``first`` through ``last``.

    The error averages over every congress of the horizon, the shared
    starting congress included.
    """
    if last < first:
        raise DomainError("horizon end precedes its start")
    try:
        start = panel.column(first)
        stop = panel.column(last)
    except KeyError as exc:
        raise DomainError(f"horizon congress {exc.args[0]} is outside the panel") from exc
    if stop - start != last - first:
        raise DomainError("panel congresses are not contiguous over the horizon")

    observed = panel.values[:, start : stop + 1]
    horizon = observed.shape[1]
    switching = np.empty_like(observed)
    fixed = np.empty_like(observed)
    switching[:, 0] = observed[:, 0]
    fixed[:, 0] = observed[:, 0]
    for q in range(horizon - 1):
        a, A = models.switching.regime(int(panel.regime[start + q]))
        switching[:, q + 1] = a + A @ switching[:, q]
        fixed[:, q + 1] = models.fixed.a + models.fixed.A @ fixed[:, q]

    return PredictionReport(
        units=list(panel.units),
        congresses=panel.congresses[start : stop + 1].copy(),
        observed=observed,
        switching=switching,
        fixed=fixed,
        errors_switching=np.abs(observed - switching).mean(axis=1),
        errors_fixed=np.abs(observed - fixed).mean(axis=1),
    )


def sanity_checks(
    est: EstimationResult,
    *,
    horizon: int | None = 100,
    initial_conditions: int = 1000,
    rng: np.random.Generator | None = None,
    seed: int = 0,
) -> SanityReport:
    """Entry bounds, the +1 offset-plus-row-sum bound, and boundedness from random starts.

    Starts are drawn from ``rng`` when given, otherwise from a generator seeded with ``seed``.
    """
    entry_violations: list[tuple[int, int, int, float]] = []
    for vartheta in (1, -1):
        _, A = est.regime(vartheta)
        for i, j in zip(*np.nonzero(np.abs(A) >= 1.0)):
            entry_violations.append((vartheta, int(i), int(j), float(A[i, j])))

    mass = est.a_plus + est.A_plus.sum(axis=1)
    offset_violations = [int(i) for i in np.flatnonzero((mass < 0.0) | (mass > 1.0))]

    bounded: bool | None = None
    excursion: float | None = None
    if horizon:
        rng = rng or np.random.default_rng(seed)
        excursion = 0.0
        for vartheta in (1, -1):
            a, A = est.regime(vartheta)
            states = rng.uniform(-1.0, 1.0, size=(initial_conditions, est.n))
            for _ in range(horizon):
                states = a + states @ A.T
                excursion = max(excursion, float(np.max(np.abs(states))))
                if not np.isfinite(excursion):
                    break
        bounded = excursion <= 1.0 + BOUND_ATOL

    report = SanityReport(
        entries_bounded=not entry_violations,
        offsets_bounded=not offset_violations,
        trajectories_bounded=bounded,
        entry_violations=entry_violations,
        offset_values=[float(value) for value in mass],
        offset_violations=offset_violations,
        max_excursion=excursion,
    )
    if not report.passed:
        logger.bind(
            entries=len(entry_violations),
            offsets=offset_violations,
            excursion=excursion,
        ).warning("sanity checks failed")
    return report
