"""Monte Carlo experiments on synthetic systems.

Each trial receives its own generator spawned from one seed sequence, so
results do not depend on the worker count.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from scipy.stats import beta

from backend.core.complexity import min_dwell
from backend.core.dynamics import build_regime, forward_estimate, sample_feasible_system, simulate
from backend.core.estimator import estimate
from backend.core.inference import infer
from backend.core.schema import PacConfig
from backend.core.settings import get_settings
from backend.core.validation import DomainError, DwellNotReachableError, RankDeficiencyError
from backend.domain import NoiseSpec, Schedule, Segment, SocialSystem

T = TypeVar("T")


def binomial_lower_bound(successes: int, trials: int, confidence: float = 0.95) -> float:
    """One-sided Clopper-Pearson lower bound on a success probability."""
    if successes <= 0:
        return 0.0
    return float(beta.ppf(1.0 - confidence, successes, trials - successes + 1))


class TrialRunner:
    def __init__(self, n_jobs: int | None = None) -> None:
        self.n_jobs = get_settings().n_jobs if n_jobs is None else n_jobs

    def run(self, fn: Callable[[np.random.Generator], T], trials: int, seed: int | None) -> list[T]:
        children = np.random.SeedSequence(seed).spawn(trials)
        if self.n_jobs == 1:
            return [fn(np.random.default_rng(child)) for child in children]
        return Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(fn)(np.random.default_rng(child)) for child in children
        )


@dataclass(slots=True)
class RoundTripReport:
    n: int
    seed: int | None
    resamples: int
    error_A: float
    error_a: float
    error_W: float
    error_s: float
    error_eps: float
    error_eta: float
    flagged_rows: list[int] = field(default_factory=list)
    errored_rows: list[int] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max(self.error_A, self.error_a, self.error_W, self.error_s, self.error_eps, self.error_eta)


def pooled_regime_segments(sys: SocialSystem, rng: np.random.Generator, length: int, starts: int) -> list[Segment]:
    """Single-regime runs from fresh uniform starts, numbered one after another."""
    segs: list[Segment] = []
    offset = 0
    for _ in range(starts):
        for vartheta in (-1, 1):
            traj = simulate(sys, Schedule([(vartheta, length)]), rng=rng)
            segs.append(Segment(vartheta=vartheta, ys=traj.y, k=offset + 1))
            offset += length
    return segs


def round_trip_experiment(
    n: int,
    seed: int | None = None,
    *,
    sigma_o: float = 0.0,
    segment_length: int | None = None,
    starts: int | None = None,
    max_resamples: int = 5,
) -> RoundTripReport:
    """Sample a system, simulate both regimes, estimate, infer and compare with the truth."""
    if n < 2:
        raise DomainError("round trips need at least two individuals")
    rng = np.random.default_rng(seed)
    length = segment_length or max(12, 2 * n + 4)
    runs = starts or max(2, n)
    last_error: RankDeficiencyError | None = None
    for attempt in range(max_resamples):
        sys = sample_feasible_system(n, rng, s_floor=0.05, noise=NoiseSpec(sigma_o=sigma_o))
        try:
            est = estimate(pooled_regime_segments(sys, rng, length, runs))
        except RankDeficiencyError as exc:
            last_error = exc
            logger.bind(attempt=attempt).warning("round trip resampling after rank failure")
            continue
        truth = forward_estimate(sys)
        sol = infer(est)
        ok = sol.ok_rows

        def worst(values: np.ndarray, target: np.ndarray) -> float:
            return float(np.max(np.abs(values - target))) if ok else float("nan")

        return RoundTripReport(
            n=n,
            seed=seed,
            resamples=attempt,
            error_A=float(max(np.max(np.abs(est.A_plus - truth.A_plus)), np.max(np.abs(est.A_minus - truth.A_minus)))),
            error_a=float(max(np.max(np.abs(est.a_plus - truth.a_plus)), np.max(np.abs(est.a_minus - truth.a_minus)))),
            error_W=worst(sol.W_inf[ok], sys.W[ok]),
            error_s=worst(sol.s_inf[ok], sys.s[ok]),
            error_eps=worst(sol.eps_inf[ok], sys.eps[ok]),
            error_eta=worst(sol.eta_inf[ok], sys.eta[ok]),
            flagged_rows=sol.flagged_rows,
            errored_rows=sol.errored_rows,
        )
    raise last_error if last_error else DomainError("round trip did not run")


def sweep_round_trip(n: int, sigmas: Sequence[float], seeds: Sequence[int]) -> dict[float, float]:
    """Median largest matrix error per observation-noise level."""
    out: dict[float, float] = {}
    for sigma in sigmas:
        errors = [round_trip_experiment(n, seed, sigma_o=sigma).error_A for seed in seeds]
        out[float(sigma)] = float(np.median(errors))
    return out


@dataclass(slots=True)
class PacReport:
    n: int
    trials: int
    tau_minus: int
    tau_plus: int
    successes: dict[int, int]
    norms: dict[int, list[float]]
    delta: float

    def fraction(self, vartheta: int) -> float:
        return self.successes[vartheta] / self.trials

    def lower_bound(self, vartheta: int) -> float:
        return binomial_lower_bound(self.successes[vartheta], self.trials)

    @property
    def certified(self) -> bool:
        return all(self.lower_bound(vartheta) > 1.0 - self.delta for vartheta in (1, -1))


def pac_experiment(
    n: int,
    cfg: PacConfig,
    trials: int,
    seed: int | None = None,
    *,
    cap: int | None = None,
    system: SocialSystem | None = None,
    runner: TrialRunner | None = None,
) -> PacReport:
    """Empirical ``P(||A_hat - A|| <= phi)`` per regime at the computed dwell times."""
    if trials <= 0:
        raise DomainError("trials must be positive")
    minus = min_dwell(n, cfg, 1, cap)
    if not minus.reachable:
        raise DwellNotReachableError(f"no dwell time for n={n} within cap", cap=cap or 0)
    plus = min_dwell(n, cfg, minus.p + 1, cap)
    if not plus.reachable:
        raise DwellNotReachableError(f"no second dwell time for n={n} within cap", cap=cap or 0)

    if system is None:
        chi_max = 0.05 if cfg.sigma_p > 0 else 0.0
        system = sample_feasible_system(n, np.random.default_rng(seed), chi_max=chi_max)
    system = SocialSystem(
        W=system.W,
        s=system.s,
        eps=system.eps,
        eta=system.eta,
        chi=system.chi,
        m=system.m,
        noise=NoiseSpec(sigma_p=cfg.sigma_p, sigma_o=cfg.sigma_o),
    )
    truth = {vartheta: build_regime(system, vartheta).A for vartheta in (1, -1)}
    schedule = Schedule.two_block(minus.tau, plus.tau)

    def trial(rng: np.random.Generator) -> dict[int, float]:
        try:
            est = estimate(simulate(system, schedule, rng=rng))
        except RankDeficiencyError:
            return {1: float("inf"), -1: float("inf")}
        return {
            vartheta: float(np.linalg.norm(est.regime(vartheta)[1] - truth[vartheta], 2)) for vartheta in (1, -1)
        }

    results = (runner or TrialRunner()).run(trial, trials, seed)
    norms = {vartheta: [result[vartheta] for result in results] for vartheta in (1, -1)}
    successes = {vartheta: int(sum(value <= cfg.phi for value in norms[vartheta])) for vartheta in (1, -1)}
    report = PacReport(
        n=n,
        trials=trials,
        tau_minus=minus.tau,
        tau_plus=plus.tau,
        successes=successes,
        norms=norms,
        delta=cfg.delta,
    )
    logger.bind(
        n=n,
        tau_minus=report.tau_minus,
        tau_plus=report.tau_plus,
        success_plus=report.fraction(1),
        success_minus=report.fraction(-1),
    ).info("pac experiment finished")
    return report
