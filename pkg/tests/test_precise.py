import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from ptdiscord import (
    PropagationOverflow,
    SystemParams,
    correlation_report,
    diffusion_matrix,
    drift_matrix,
    propagate_covariance,
)
from ptdiscord.precise import DEFAULT_PREC, PreciseTrajectory, precision_for_guard


def mp_covariance(p, t, dps=80):
    # sigma(t) from the identity, via the exponential of the augmented generator
    with mpmath.workdps(dps):
        y = mpmath.matrix(drift_matrix(p).tolist())
        d4 = mpmath.matrix((4 * diffusion_matrix(p)).tolist())
        aug = mpmath.zeros(8, 8)
        for i in range(4):
            for j in range(4):
                aug[i, j] = y[i, j]
                aug[i, j + 4] = d4[i, j]
                aug[i + 4, j + 4] = -y[j, i]
        big = mpmath.expm(aug * t)
        phi = big[0:4, 0:4]
        q = big[0:4, 4:8] * phi.T
        sigma = phi * phi.T + q
        return [[sigma[i, j] for j in range(4)] for i in range(4)]


def test_precision_for_guard():
    assert DEFAULT_PREC == precision_for_guard(100.0)
    # 2 * 100 decimal digits plus 136 guard bits
    assert DEFAULT_PREC == math.ceil(200 * math.log2(10)) + 136
    assert precision_for_guard(300.0) > DEFAULT_PREC


def test_step_must_be_positive():
    with pytest.raises(ValueError):
        PreciseTrajectory(SystemParams.gain_loss(0.5, 0.5), 0.0)


@pytest.mark.parametrize("gains", [(0.5, 0.5), (0.5, 1.5), (1.5, 1.5)])
def test_short_time_matches_float_propagation(gains):
    p = SystemParams.gain_loss(*gains)
    traj = PreciseTrajectory(p, 0.05).advance(40)
    assert traj.time == pytest.approx(2.0)
    ref = propagate_covariance(np.eye(4), p, 2.0)
    assert_allclose(traj.sigma_float(), ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("gains,t", [((1.5, 1.5), 30.0), ((3.0, 0.4), 20.0), ((0.5, 0.5), 50.0)])
def test_long_time_vs_extended_precision(gains, t):
    p = SystemParams.gain_loss(*gains)
    traj = PreciseTrajectory(p, 0.25).jump(int(round(t / 0.25)))
    ref = mp_covariance(p, t)
    scale = max(abs(v) for row in ref for v in row)
    for i in range(4):
        for j in range(4):
            assert abs(traj.sigma[i, j].mid() - ref[i][j]) < 1e-40 * scale


def test_jump_equals_advance():
    p = SystemParams.gain_loss(1.5, 1.5)
    a = PreciseTrajectory(p, 0.1).advance(137)
    b = PreciseTrajectory(p, 0.1).jump(137)
    assert a.n_steps == b.n_steps == 137
    diff = max(abs(float((a.sigma[i, j] - b.sigma[i, j]).mid())) for i in range(4) for j in range(4))
    assert diff < 1e-60 * a.max_abs()


def test_report_certified_in_broken_phase():
    p = SystemParams.gain_loss(1.5, 1.5)
    traj = PreciseTrajectory(p, 0.25).jump(160)
    rep = traj.report()
    assert rep.time == pytest.approx(40.0)
    assert rep.error_bound < 1e-20
    # the float path has lost the O(1) part of sigma by now
    assert traj.max_abs() > 1e30


def test_overflow_without_escalation():
    p = SystemParams.gain_loss(3.0, 3.0)
    traj = PreciseTrajectory(p, 1.0)
    with pytest.raises(PropagationOverflow):
        traj.advance(100)
    assert traj.escalations == 0


def test_escalation_continues_past_guard():
    p = SystemParams.gain_loss(3.0, 3.0)
    traj = PreciseTrajectory(p, 1.0, max_log10_guard=1000.0)
    traj.advance(100)
    assert traj.escalations >= 1
    assert traj.prec > DEFAULT_PREC
    assert 100 < traj.log10_max_abs() < traj.log10_guard
    assert traj.max_abs() == math.inf or traj.max_abs() > 1e100
    rep = traj.report()
    assert 0 < rep.discord_GL < 1 and 0 < rep.discord_LG < 1


def test_escalated_run_matches_fresh_high_precision_run():
    p = SystemParams.gain_loss(3.0, 3.0)
    esc = PreciseTrajectory(p, 1.0, max_log10_guard=1000.0).advance(60)
    fresh = PreciseTrajectory(p, 1.0, prec=esc.prec, guard=10.0 ** esc.log10_guard).advance(60)
    a, b = esc.report(), fresh.report()
    assert_allclose((a.discord_GL, a.discord_LG), (b.discord_GL, b.discord_LG), rtol=1e-14)


def test_custom_initial_state():
    p = SystemParams.gain_loss(0.5, 1.5)
    sigma0 = np.diag([3.0, 3.0, 1.0, 1.0])
    traj = PreciseTrajectory(p, 0.5, sigma0=sigma0).advance(4)
    assert_allclose(traj.sigma_float(), propagate_covariance(sigma0, p, 2.0), rtol=1e-12)
    assert_allclose(traj.report().discord_GL, correlation_report(traj.sigma_float()).discord_GL,
                    atol=1e-10)
