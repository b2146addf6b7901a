"""Sample-complexity conditions, dwell times and certifiable network sizes.

Two conditions are evaluated per window ``(k, p)``:

* concentration: ``min{(1-2e)^2 n rho^2 / (l j^2 ||C||), (1-2e) rho / j}
  >= (gamma^2 / 2)(ln 4 + n ln(2/e + 1) - ln delta)``
* excitation: ``f >= 32 c kappa^2 varrho2 / (phi^2 (varrho1 - rho))
  * (n/2 ln((varrho1 - rho) / (2 varrho1)) + ln 2 + n ln 5 - ln delta)``
  with a strictly positive right-hand side.

Everything is kept as sums of logarithms.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from loguru import logger

from backend.core.schema import PacConfig
from backend.core.validation import ConfigError, DomainError
from backend.domain import ConditionReport, DwellResult, NetworkSizeReport, PairCounts

CONDITIONS = ("concentration", "excitation")
DEFAULT_DWELL_CAP = 100_000


def _window(k: int, p: int, *, min_gap: int = 1) -> None:
    if k < 1:
        raise DomainError("window start must be at least 1")
    if p - k < min_gap:
        raise DomainError(f"window ({k}, {p}) needs p - k >= {min_gap}")


def pair_counts(k: int, p: int, n: int) -> PairCounts:
    _window(k, p)
    if n < 1:
        raise DomainError("network size must be positive")
    gap = p - k
    span = gap - 1
    # sum_{i=1}^{p-k-1} (p-k-i)(p-1-i) = sum_{m=1}^{span} m (m + k - 1)
    l_hat = span * (span + 1) * (2 * span + 1) // 6 + (k - 1) * span * (span + 1) // 2
    return PairCounts(l=gap * (gap - 1) // 2 * n, l_hat=l_hat * n)


def noise_floor(k: int, p: int, n: int, cfg: PacConfig) -> tuple[float, float]:
    _window(k, p, min_gap=2)
    counts = pair_counts(k, p, n)
    f = 2.0 * (counts.l / n) * cfg.sigma_o**2 + cfg.s_lower * (counts.l_hat / n) * cfg.sigma_p**2
    if f <= 0:
        raise ConfigError("noise floor is zero: excitation condition undefined without noise")
    return f, cfg.s_upper / f


def multiplicities(k: int, p: int) -> np.ndarray:
    """Repetitions of each base process-noise step ``t = 1 .. p-2`` in the stacked noise."""
    _window(k, p, min_gap=2)
    t = np.arange(1, p - 1)
    i = np.arange(k, p - 1)
    counts = (p - 1) - np.maximum(i[None, :], t[:, None])
    return np.clip(counts, 0, None).sum(axis=1)


def stacked_selection(k: int, p: int, n: int) -> np.ndarray:
    """Explicit 0/1 map from base process noise to its stacked copies."""
    _window(k, p, min_gap=2)
    rows: list[np.ndarray] = []
    width = (p - 2) * n
    for i in range(k, p - 1):
        for j in range(i + 1, p):
            for t in range(1, j):
                for c in range(n):
                    row = np.zeros(width)
                    row[(t - 1) * n + c] = 1.0
                    rows.append(row)
    return np.vstack(rows)


def covariance_norm(k: int, p: int, n: int, cfg: PacConfig) -> float:
    _window(k, p, min_gap=2)
    if n < 1:
        raise DomainError("network size must be positive")
    mu_max = (p - k) * (p - k - 1) // 2
    return max(2.0 * cfg.sigma_o**2, cfg.sigma_p**2 * mu_max)


def concentration_threshold(n: int, cfg: PacConfig) -> float:
    if cfg.eps_net == 0:
        return math.inf
    return 0.5 * cfg.gamma**2 * (math.log(4.0) + n * math.log(2.0 / cfg.eps_net + 1.0) - math.log(cfg.delta))


def excitation_threshold(n: int, cfg: PacConfig) -> float:
    rho = cfg.resolved_rho
    gap = cfg.varrho1 - rho
    coefficient = 32.0 * cfg.c_univ * cfg.kappa**2 * cfg.varrho2 / (cfg.phi**2 * gap)
    bracket = (
        0.5 * n * math.log(gap / (2.0 * cfg.varrho1))
        + math.log(2.0)
        + n * math.log(5.0)
        - math.log(cfg.delta)
    )
    return coefficient * bracket


def check_conditions(k: int, p: int, n: int, cfg: PacConfig) -> ConditionReport:
    counts = pair_counts(k, p, n)
    f, j = noise_floor(k, p, n, cfg)
    c_norm = covariance_norm(k, p, n, cfg)
    rho = cfg.resolved_rho
    shrink = 1.0 - 2.0 * cfg.eps_net
    if counts.l == 0:
        lhs = 0.0
    else:
        lhs = min(shrink**2 * n * rho**2 / (counts.l * j**2 * c_norm), shrink * rho / j)
    rhs = concentration_threshold(n, cfg)
    threshold = excitation_threshold(n, cfg)
    note = None
    excitation = f >= threshold
    if threshold <= 0:
        excitation = False
        note = "excitation threshold is nonpositive"
    return ConditionReport(
        k=k,
        p=p,
        n=n,
        concentration=lhs >= rhs,
        excitation=excitation,
        concentration_lhs=lhs,
        concentration_rhs=rhs,
        excitation_lhs=f,
        excitation_rhs=threshold,
        note=note,
    )


def min_dwell(n: int, cfg: PacConfig, k_start: int = 1, p_max: int | None = None) -> DwellResult:
    """Smallest ``p`` (scanned exhaustively) where both conditions hold from ``k_start``."""
    cap = DEFAULT_DWELL_CAP if p_max is None else p_max
    if k_start < 1:
        raise DomainError("k_start must be at least 1")
    if excitation_threshold(n, cfg) <= 0:
        raise ConfigError(f"excitation threshold is nonpositive for n={n}")
    for p in range(k_start + 2, k_start + cap):
        report = check_conditions(k_start, p, n, cfg)
        if report.passed:
            logger.bind(n=n, k=k_start, p=p).debug("dwell time found")
            return DwellResult(n=n, k_start=k_start, reachable=True, p=p, report=report)
    logger.bind(n=n, k=k_start, cap=cap).warning("dwell time not reachable within cap")
    return DwellResult(n=n, k_start=k_start, reachable=False)


def max_network_size(
    k_minus: int,
    p_minus: int,
    k_plus: int,
    p_plus: int,
    cfg: PacConfig,
    *,
    require: Iterable[str] = CONDITIONS,
    n_limit: int = 1000,
) -> NetworkSizeReport:
    """Largest ``n`` for which the required conditions hold on both windows.

    The scan does not assume monotonicity in ``n``; it returns the last size
    that passes and keeps the full pass vectors.
    """
    required = tuple(require)
    if not required or any(name not in CONDITIONS for name in required):
        raise ConfigError(f"require must be a non-empty subset of {CONDITIONS}")
    windows = ((k_minus, p_minus), (k_plus, p_plus))
    for k, p in windows:
        _window(k, p)
    report = NetworkSizeReport(n_max=0, require=required, windows=windows)
    for window in windows:
        report.concentration[window] = []
        report.excitation[window] = []
    for n in range(1, n_limit + 1):
        ok = True
        for window in windows:
            k, p = window
            if p - k < 2:
                conc = exc = False
            else:
                result = check_conditions(k, p, n, cfg)
                conc, exc = result.concentration, result.excitation
            report.concentration[window].append(conc)
            report.excitation[window].append(exc)
            flags = {"concentration": conc, "excitation": exc}
            ok = ok and all(flags[name] for name in required)
        report.passed.append(ok)
        if ok:
            report.n_max = n
    logger.bind(windows=windows, require=required, n_max=report.n_max).info("network size scan finished")
    return report
