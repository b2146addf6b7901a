import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from backend.core.dynamics import forward_estimate, sample_feasible_system
from backend.core.inference import infer, rebuild
from backend.core.validation import DomainError
from backend.domain import EstimationResult, RowStatus, SocialSystem


def one_row(a_plus: float, a_minus: float, A_plus: float, A_minus: float) -> EstimationResult:
    return EstimationResult(
        A_plus=np.array([[A_plus]]),
        A_minus=np.array([[A_minus]]),
        a_plus=np.array([a_plus]),
        a_minus=np.array([a_minus]),
    )


def test_forward_then_infer_recovers_parameters():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        system = sample_feasible_system(5, rng, s_floor=0.05)
        sol = infer(forward_estimate(system))
        assert sol.ok_rows == list(range(5))
        for name, truth in (("W_inf", system.W), ("s_inf", system.s), ("eps_inf", system.eps), ("eta_inf", system.eta)):
            worst = max(worst, float(np.max(np.abs(getattr(sol, name) - truth))))
        assert max(sol.residuals.values()) <= 1e-12
    assert worst <= 1e-10


def test_recovers_two_person_system():
    system = SocialSystem(
        W=[[0.2, 0.1], [0.15, 0.25]], s=[0.5, -0.4], eps=[0.1, 0.2], eta=[0.05, 0.1], chi=0.0
    )
    sol = infer(forward_estimate(system))
    assert sol.ok_rows == [0, 1]
    assert np.max(np.abs(sol.W_inf - system.W)) <= 1e-10
    assert np.max(np.abs(sol.s_inf - [0.5, -0.4])) <= 1e-10
    assert np.max(np.abs(sol.eps_inf - [0.1, 0.2])) <= 1e-10
    assert np.max(np.abs(sol.eta_inf - [0.05, 0.1])) <= 1e-10
    assert not sol.warnings


def test_recovered_rows_match_their_inferred_sums():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        est = forward_estimate(sample_feasible_system(6, rng, s_floor=0.05))
        sol = infer(est)
        inferred_sums = (est.A_plus.sum(axis=1) + est.A_minus.sum(axis=1)) / 2 + sol.eta_inf - sol.eps_inf
        assert np.max(np.abs(sol.W_inf.sum(axis=1) - inferred_sums)) <= 1e-9


def test_bias_free_rows():
    system = SocialSystem(W=[[0.3, 0.2], [0.1, 0.4]], s=[0.5, -0.2], eps=0.0, eta=0.0, chi=0.0)
    sol = infer(forward_estimate(system))
    assert sol.eps_inf == pytest.approx([0.0, 0.0], abs=1e-12)
    assert sol.eta_inf == pytest.approx([0.0, 0.0], abs=1e-12)
    assert np.allclose(sol.W_inf, system.W, atol=1e-12)
    assert sol.s_inf == pytest.approx([0.5, -0.2])


def test_neutral_bias_row_is_flagged():
    system = SocialSystem(
        W=[[0.3, 0.2], [0.1, 0.4]], s=[0.0, 0.6], eps=[0.05, 0.04], eta=[0.03, 0.02], chi=0.0
    )
    sol = infer(forward_estimate(system))
    assert sol.row_status[0] is RowStatus.NEUTRAL_BIAS_UNRECOVERABLE
    assert sol.flagged_rows == [0]
    assert sol.s_inf[0] == 0.0
    assert np.isnan(sol.W_inf[0]).all()
    assert sol.row_status[1] is RowStatus.OK
    assert sol.W_inf[1] == pytest.approx([0.1, 0.4])


def test_nonpositive_influence_sum_is_an_error():
    sol = infer(one_row(0.5, 0.5, -0.2, -0.2))
    assert sol.row_status == [RowStatus.ERROR]
    assert sol.errors[0] == "inferred influence sum is nonpositive"
    assert sol.s_inf[0] == pytest.approx(1.0 / 2.4)


def test_vanishing_denominator_is_an_error():
    sol = infer(one_row(0.0, 0.0, 1.0, 1.0))
    assert sol.errored_rows == [0]
    assert sol.errors[0] == "subconscious bias denominator vanishes"
    assert np.isnan(sol.s_inf[0])


def test_implausible_estimates_carry_warnings():
    system = SocialSystem(W=[[0.5]], s=[0.5], eps=[0.1], eta=[0.05], chi=0.0)
    est = forward_estimate(system)
    est.a_plus = est.a_plus + 8.0
    sol = infer(est)
    assert sol.row_status == [RowStatus.OK]
    assert any("confirmation bias" in note for note in sol.warnings[0])


def test_infer_rejects_bad_input():
    with pytest.raises(DomainError):
        infer(one_row(float("nan"), 0.0, 0.1, 0.1))
    with pytest.raises(DomainError):
        infer(one_row(0.1, 0.0, 0.1, 0.1), tol_s=0.0)


def test_rebuild_reproduces_the_estimate():
    rng = np.random.default_rng(11)
    system = sample_feasible_system(4, rng, s_floor=0.05)
    est = forward_estimate(system)
    again = rebuild(infer(est))
    for name in ("A_plus", "A_minus", "a_plus", "a_minus"):
        assert np.allclose(getattr(again, name), getattr(est, name), atol=1e-10)


def test_rebuild_needs_every_row():
    system = SocialSystem(W=[[0.3, 0.2], [0.1, 0.4]], s=[0.0, 0.6], eps=0.05, eta=0.03, chi=0.0)
    with pytest.raises(DomainError):
        rebuild(infer(forward_estimate(system)))
