"""Biased Friedkin-Johnsen dynamics and its two extremal-opinion regimes."""
from __future__ import annotations

from typing import Sequence

import numpy as np
from loguru import logger
from scipy.stats import truncnorm

from backend.core.validation import (
    DomainError,
    InfeasibleSystemError,
    require_nonnegative,
    require_regime,
    require_unit_interval,
)
from backend.domain import (
    EstimationResult,
    FeasibilityReport,
    RegimeModel,
    RowFeasibility,
    Schedule,
    SocialSystem,
    Trajectory,
)

FEASIBILITY_ATOL = 1e-12


def confirmation_weight(x_i, h, eps_i):
    """Weight ``2 eps - eps |x_i - h|`` given to a source close to one's own opinion."""
    require_unit_interval("x_i", x_i)
    require_unit_interval("h", h)
    require_nonnegative("eps_i", eps_i)
    value = 2.0 * np.asarray(eps_i, dtype=float) - np.asarray(eps_i, dtype=float) * np.abs(
        np.asarray(x_i, dtype=float) - np.asarray(h, dtype=float)
    )
    return float(value) if np.ndim(value) == 0 else value


def negativity_weight(xbar_i, h, eta_i):
    """Weight ``eta |xbar_i - h|`` given to a source far from the neighbourhood expectation."""
    require_unit_interval("xbar_i", xbar_i)
    require_unit_interval("h", h)
    require_nonnegative("eta_i", eta_i)
    value = np.asarray(eta_i, dtype=float) * np.abs(np.asarray(xbar_i, dtype=float) - np.asarray(h, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def sensed_expectation(W_row: Sequence[float], x: Sequence[float]) -> float:
    row = np.asarray(W_row, dtype=float)
    state = np.asarray(x, dtype=float)
    total = row.sum()
    if total <= 0:
        raise DomainError("sensed expectation needs a positive influence row sum")
    return float(row @ state / total)


def _sensed_expectations(W: np.ndarray, x: np.ndarray) -> np.ndarray:
    totals = W.sum(axis=1)
    if np.any(totals <= 0):
        raise DomainError("every influence row needs a positive sum")
    return (W @ x) / totals


def _source_weights(sys: SocialSystem, x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xbar = _sensed_expectations(sys.W, x)
    conf = sys.eps[:, None] * (2.0 - np.abs(x[:, None] - h[None, :]))
    neg = sys.eta[:, None] * np.abs(xbar[:, None] - h[None, :])
    return conf, neg


def parameter_violation(sys: SocialSystem, i: int) -> str | None:
    """Reason individual ``i`` lies outside the model's parameter domain, if it does."""
    if not -1.0 <= sys.s[i] <= 1.0:
        return "subconscious bias outside [-1, 1]"
    if not sys.eps[i] >= 0:
        return "negative confirmation gain"
    if not sys.eta[i] >= 0:
        return "negative negativity gain"
    if not sys.chi[i] >= 0:
        return "negative process-noise bound"
    return None


def require_parameters(sys: SocialSystem) -> None:
    for i in range(sys.n):
        reason = parameter_violation(sys, i)
        if reason is not None:
            raise DomainError(f"individual {i}: {reason}")


def _check_sources(sys: SocialSystem, h) -> np.ndarray:
    sources = np.atleast_1d(np.asarray(h, dtype=float))
    if sources.size < 1 or sources.size > sys.m:
        raise DomainError(f"expected between 1 and {sys.m} source opinions, got {sources.size}")
    require_unit_interval("h", sources)
    return sources


def _resistances(sys: SocialSystem, x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    conf, neg = _source_weights(sys, x, h)
    alpha = 1.0 - sys.row_sums - conf.sum(axis=1) - neg.sum(axis=1) - sys.chi
    return alpha, conf + neg


def resistance(sys: SocialSystem, i: int, x: Sequence[float], h) -> float:
    state = np.asarray(x, dtype=float)
    require_unit_interval("x", state)
    sources = _check_sources(sys, h)
    require_parameters(sys)
    alpha, _ = _resistances(sys, state, sources)
    if alpha[i] < -FEASIBILITY_ATOL:
        raise InfeasibleSystemError(f"resistance of individual {i} is negative ({alpha[i]:.3g})")
    return float(alpha[i])


def step(sys: SocialSystem, x: Sequence[float], h, p_noise: Sequence[float] | None = None) -> np.ndarray:
    state = np.asarray(x, dtype=float)
    require_unit_interval("x", state, atol=1e-12)
    sources = _check_sources(sys, h)
    require_parameters(sys)
    if p_noise is None:
        noise = np.zeros(sys.n)
    else:
        noise = np.asarray(p_noise, dtype=float)
        if np.any((noise != 0) & (np.abs(noise) >= sys.chi)):
            raise DomainError("process noise must stay strictly inside the per-individual bound chi")
    alpha, gains = _resistances(sys, state, sources)
    if np.any(alpha < -FEASIBILITY_ATOL):
        worst = int(np.argmin(alpha))
        raise InfeasibleSystemError(f"resistance of individual {worst} is negative ({alpha[worst]:.3g})")
    return alpha * sys.s + sys.W @ state + gains @ sources + noise


def build_regime(sys: SocialSystem, vartheta: int, *, process_mean: float | Sequence[float] = 0.0) -> RegimeModel:
    """Exact linear model of ``step`` while every source broadcasts ``vartheta``.

    A constant process-noise mean folds into the offset.
    """
    vartheta = require_regime(vartheta)
    totals = sys.row_sums
    if np.any(totals <= 0):
        raise DomainError("every influence row needs a positive sum")
    s, eps, eta = sys.s, sys.eps, sys.eta
    base = (1.0 - totals - sys.chi) * s
    if vartheta == 1:
        A = sys.W + ((s - 1.0) * eta / totals)[:, None] * sys.W + np.diag((1.0 - s) * eps)
        a = base + (eps + eta) * (1.0 - s)
    else:
        A = sys.W - ((1.0 + s) * eta / totals)[:, None] * sys.W + np.diag((1.0 + s) * eps)
        a = base - (eps + eta) * (1.0 + s)
    return RegimeModel(vartheta=vartheta, a=a + np.asarray(process_mean, dtype=float), A=A)


def draw_process_noise(sys: SocialSystem, rng: np.random.Generator, size: int) -> np.ndarray:
    """Gaussian process noise truncated to ``(-chi_i, chi_i)``, one row per transition."""
    sigma = sys.noise.sigma_p
    draws = np.zeros((size, sys.n))
    active = sys.chi > 0
    if sigma <= 0 or size == 0 or not np.any(active):
        return draws
    bound = sys.chi[active] / sigma
    draws[:, active] = truncnorm.rvs(-bound, bound, loc=0.0, scale=sigma, size=(size, int(active.sum())), random_state=rng)
    limit = np.nextafter(sys.chi, 0.0)
    return np.clip(draws, -limit, limit)


def draw_observation_noise(sys: SocialSystem, rng: np.random.Generator, size: int) -> np.ndarray:
    if sys.noise.sigma_o <= 0:
        return np.full((size, sys.n), float(sys.noise.mu_o))
    return rng.normal(sys.noise.mu_o, sys.noise.sigma_o, size=(size, sys.n))


def simulate(
    sys: SocialSystem,
    schedule: Schedule,
    x1: Sequence[float] | None = None,
    *,
    rng: np.random.Generator | None = None,
) -> Trajectory:
    """Run the nonlinear dynamics with all sources at ``vartheta(k)``.

    Extremal sources are collapsed into one, so the step always sees a
    single source opinion.
    """
    require_parameters(sys)
    if rng is None:
        rng = np.random.default_rng(sys.noise.seed)
    if x1 is None:
        x1 = rng.uniform(-1.0, 1.0, size=sys.n)
    state = np.asarray(x1, dtype=float)
    if state.shape != (sys.n,):
        raise DomainError(f"initial state must have length {sys.n}")
    require_unit_interval("x1", state)

    labels = schedule.labels()
    steps = labels.size
    process = draw_process_noise(sys, rng, steps - 1)
    xs = np.empty((steps, sys.n))
    xs[0] = state
    for q in range(steps - 1):
        xs[q + 1] = step(sys, xs[q], [float(labels[q])], process[q])
    observation = draw_observation_noise(sys, rng, steps)
    return Trajectory(
        y=xs + observation,
        vartheta=labels,
        x=xs,
        process_noise=process,
        observation_noise=observation,
    )


def _propagator(labels: np.ndarray, regimes: dict[int, RegimeModel], start: int, stop: int, n: int) -> np.ndarray:
    """Product of regime matrices for transitions ``start .. stop - 1`` (1-based), latest on the left."""
    out = np.eye(n)
    q = start
    while q < stop:
        vartheta = int(labels[q - 1])
        end = q
        while end < stop and labels[end - 1] == vartheta:
            end += 1
        out = np.linalg.matrix_power(regimes[vartheta].A, end - q) @ out
        q = end
    return out


def closed_form_state(sys: SocialSystem, schedule: Schedule, j: int, record: Trajectory) -> np.ndarray:
    """Observation ``y(j)`` from regime-matrix products and the recorded noise."""
    labels = schedule.labels()
    if j < 1 or j > labels.size or j > record.steps:
        raise DomainError(f"step {j} outside 1..{min(labels.size, record.steps)}")
    if record.observation_noise is None:
        raise DomainError("closed form needs the recorded observation noise")
    x1 = record.x[0] if record.x is not None else record.y[0] - record.observation_noise[0]
    process = record.process_noise if record.process_noise is not None else np.zeros((labels.size - 1, sys.n))
    regimes = {vartheta: build_regime(sys, vartheta) for vartheta in (-1, 1)}

    state = _propagator(labels, regimes, 1, j, sys.n) @ x1
    for q in range(1, j):
        drive = regimes[int(labels[q - 1])].a + process[q - 1]
        state = state + _propagator(labels, regimes, q + 1, j, sys.n) @ drive
    return state + record.observation_noise[j - 1]


def feasibility_check(sys: SocialSystem, m: int | None = None) -> FeasibilityReport:
    sources = sys.m if m is None else m
    totals = sys.row_sums
    load = totals + 2 * sources * sys.eps + 2 * sources * sys.eta + sys.chi
    rows: list[RowFeasibility] = []
    for i in range(sys.n):
        margin = float(1.0 - load[i])
        violation = parameter_violation(sys, i)
        if violation is not None:
            rows.append(RowFeasibility(i, False, margin, violation))
        elif totals[i] <= 0:
            rows.append(RowFeasibility(i, False, margin, "zero influence row sum"))
        elif np.any(sys.W[i] < 0):
            rows.append(RowFeasibility(i, False, margin, "negative influence weight"))
        elif margin < -FEASIBILITY_ATOL:
            rows.append(RowFeasibility(i, False, margin, "worst-case resistance negative"))
        else:
            rows.append(RowFeasibility(i, True, margin))
    report = FeasibilityReport(rows)
    if not report.passed:
        logger.bind(violations=[row.index for row in report.violations]).warning("social system is infeasible")
    return report


def sample_feasible_system(
    n: int,
    rng: np.random.Generator,
    *,
    m: int = 1,
    s_floor: float = 0.0,
    chi_max: float = 0.0,
    load: tuple[float, float] = (0.5, 0.95),
    density: float = 1.0,
    noise=None,
) -> SocialSystem:
    """Random system whose worst-case load stays within ``load``."""
    if n < 1:
        raise DomainError("n must be positive")
    if not 0 <= chi_max < load[0]:
        raise DomainError("chi_max must be below the lower load bound")
    raw = rng.uniform(0.05, 1.0, size=(n, n))
    if density < 1.0:
        raw *= rng.uniform(size=(n, n)) < density
        raw[np.arange(n), np.arange(n)] = np.maximum(raw[np.arange(n), np.arange(n)], 0.05)
    chi = rng.uniform(0.0, chi_max, size=n) if chi_max > 0 else np.zeros(n)
    total = rng.uniform(load[0], load[1], size=n)
    w_share = rng.uniform(0.4, 0.8, size=n)
    w_sum = (total - chi) * w_share
    bias_budget = (total - chi) * (1.0 - w_share)
    split = rng.uniform(0.2, 0.8, size=n)
    eps = bias_budget * split / (2 * m)
    eta = bias_budget * (1.0 - split) / (2 * m)
    W = raw * (w_sum / raw.sum(axis=1))[:, None]
    s = rng.uniform(-1.0, 1.0, size=n)
    if s_floor > 0:
        small = np.abs(s) < s_floor
        s[small] = np.where(s[small] < 0, -s_floor, s_floor)
    kwargs = {} if noise is None else {"noise": noise}
    return SocialSystem(W=W, s=s, eps=eps, eta=eta, chi=chi, m=m, **kwargs)


def forward_estimate(sys: SocialSystem) -> EstimationResult:
    """Exact regime pair of a system packaged as an estimation result."""
    plus = build_regime(sys, 1)
    minus = build_regime(sys, -1)
    return EstimationResult(A_plus=plus.A, A_minus=minus.A, a_plus=plus.a, a_minus=minus.a)
