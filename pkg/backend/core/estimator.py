"""Differenced least-squares identification of the two regimes.

Pairs ``(g, j)`` never straddle segments: pooled segments are stacked
block by block. ``X`` holds ``y(g) - y(j)`` for ``k <= g < j <= p - 1`` and
``Y`` the one-step shifted pair ``(g + 1, j + 1)``, so ``Y = A X`` in the
absence of noise.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from loguru import logger

from backend.core.validation import DomainError, InsufficientDataError, RankDeficiencyError, require_regime
from backend.domain import DataMatrices, EstimationResult, RegimeEstimate, Segment, Trajectory

RANK_RTOL = 1e-10


def difference_pairs(seg: Segment) -> list[tuple[int, int, np.ndarray]]:
    if seg.length < 2:
        raise InsufficientDataError("a segment needs at least two samples to difference")
    out: list[tuple[int, int, np.ndarray]] = []
    for a in range(seg.length - 1):
        for b in range(a + 1, seg.length):
            out.append((seg.k + a, seg.k + b, seg.ys[a] - seg.ys[b]))
    return out


def _stack(segs: Sequence[Segment], vartheta: int) -> DataMatrices:
    if not segs:
        raise InsufficientDataError("no segments supplied")
    n = segs[0].n
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    pairs: list[tuple[int, int]] = []
    for seg in segs:
        if seg.n != n:
            raise DomainError("all segments must observe the same individuals")
        last = seg.length - 1
        for a in range(last - 1):
            for b in range(a + 1, last):
                xs.append(seg.ys[a] - seg.ys[b])
                ys.append(seg.ys[a + 1] - seg.ys[b + 1])
                pairs.append((seg.k + a, seg.k + b))
    if not pairs:
        raise InsufficientDataError("segments are too short to form a differenced pair")
    return DataMatrices(vartheta=vartheta, X=np.column_stack(xs), Y=np.column_stack(ys), pairs=pairs)


def build_matrices(segs: Sequence[Segment], vartheta: int) -> DataMatrices:
    vartheta = require_regime(vartheta)
    for seg in segs:
        if seg.vartheta != vartheta:
            raise DomainError(f"segment {seg.k}..{seg.p} is labelled {seg.vartheta}, expected {vartheta}")
    return _stack(segs, vartheta)


def gram(dm: DataMatrices) -> np.ndarray:
    return dm.X @ dm.X.T


def _rank_check(dm: DataMatrices) -> np.ndarray:
    n = dm.X.shape[0]
    U, sv, _ = np.linalg.svd(dm.X, full_matrices=True)
    padded = np.zeros(n)
    padded[: sv.size] = sv
    largest = padded.max() if padded.size else 0.0
    deficient = padded <= RANK_RTOL * largest if largest > 0 else np.ones(n, dtype=bool)
    if np.any(deficient):
        logger.bind(vartheta=dm.vartheta, pairs=dm.N, deficient=int(deficient.sum())).warning(
            "regressor matrix is rank deficient"
        )
        raise RankDeficiencyError(
            f"X X^T is singular: {int(deficient.sum())} of {n} directions unexcited",
            directions=U[:, deficient],
            singular_values=padded,
        )
    return padded


def estimate_matrix(dm: DataMatrices) -> np.ndarray:
    """Least-squares ``A`` minimising ``||Y - A X||_F``; raises on rank deficiency."""
    _rank_check(dm)
    solution, *_ = np.linalg.lstsq(dm.X.T, dm.Y.T, rcond=None)
    return solution.T


def estimate_offset(seg_ys: np.ndarray, A_hat: np.ndarray) -> np.ndarray:
    ys = np.atleast_2d(np.asarray(seg_ys, dtype=float))
    if ys.shape[0] < 2:
        raise InsufficientDataError("offset estimation needs at least two samples")
    return np.mean(ys[1:] - ys[:-1] @ A_hat.T, axis=0)


def pooled_offset(segs: Iterable[Segment], A_hat: np.ndarray) -> tuple[np.ndarray, int]:
    """Offset averaged over every within-segment transition."""
    total: np.ndarray | None = None
    count = 0
    for seg in segs:
        if seg.length < 2:
            continue
        residual = (seg.ys[1:] - seg.ys[:-1] @ A_hat.T).sum(axis=0)
        total = residual if total is None else total + residual
        count += seg.length - 1
    if total is None:
        raise InsufficientDataError("offset estimation needs at least two samples")
    return total / count, count


def estimate_regime(segs: Sequence[Segment], vartheta: int) -> RegimeEstimate:
    dm = build_matrices(segs, vartheta)
    return _fit(dm, segs)


def estimate_fixed(segs: Sequence[Segment]) -> RegimeEstimate:
    """Single regime-agnostic model fitted on mixed data."""
    dm = _stack(segs, 0)
    return _fit(dm, segs)


def _fit(dm: DataMatrices, segs: Sequence[Segment]) -> RegimeEstimate:
    A_hat = estimate_matrix(dm)
    a_hat, transitions = pooled_offset(segs, A_hat)
    gram_sv = np.linalg.svd(gram(dm), compute_uv=False)
    return RegimeEstimate(
        vartheta=dm.vartheta,
        A=A_hat,
        a=a_hat,
        gram_min_singular=float(gram_sv.min()),
        pairs=dm.N,
        transitions=transitions,
    )


def segments_from_trajectory(traj: Trajectory) -> list[Segment]:
    """Maximal same-label runs of a trajectory."""
    segs: list[Segment] = []
    start = 0
    labels = traj.vartheta
    for q in range(1, labels.size + 1):
        if q == labels.size or labels[q] != labels[start]:
            segs.append(Segment(vartheta=int(labels[start]), ys=traj.y[start:q], k=start + 1, p=q))
            start = q
    return segs


def estimate(source: Trajectory | Sequence[Segment]) -> EstimationResult:
    segs = segments_from_trajectory(source) if isinstance(source, Trajectory) else list(source)
    fits: dict[int, RegimeEstimate] = {}
    for vartheta in (1, -1):
        pool = [seg for seg in segs if seg.vartheta == vartheta]
        if not pool:
            raise InsufficientDataError(f"no segments for regime {vartheta:+d}")
        fits[vartheta] = estimate_regime(pool, vartheta)
    logger.bind(
        pairs_plus=fits[1].pairs,
        pairs_minus=fits[-1].pairs,
    ).info("estimated both regimes")
    return EstimationResult(
        A_plus=fits[1].A,
        A_minus=fits[-1].A,
        a_plus=fits[1].a,
        a_minus=fits[-1].a,
        gram_min_singular={1: fits[1].gram_min_singular, -1: fits[-1].gram_min_singular},
        provenance={
            "segments": [
                {"vartheta": seg.vartheta, "k": seg.k, "p": seg.p} for seg in segs
            ],
            "pairs": {"+1": fits[1].pairs, "-1": fits[-1].pairs},
            "transitions": {"+1": fits[1].transitions, "-1": fits[-1].transitions},
        },
    )
