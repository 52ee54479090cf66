import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm, solve_continuous_lyapunov

from conftest import random_covariance
from ptdiscord.core import (
    OMEGA,
    TOL,
    InconsistentInvariantsError,
    NoStationarySolution,
    PropagationOverflow,
    UnphysicalStateError,
    _nu_sq_pair,
    check_covariance,
    entropy_f,
    entropy_f_from_log,
    invariants,
    lyapunov_solve,
    matrix_exponential,
    ppt_min_symplectic_eig,
    symplectic_eigenvalues,
    two_mode_squeezed,
)

mpmath.mp.dps = 50


def f_mp(x):
    x = mpmath.mpf(x)
    hp, hm = (x + 1) / 2, (x - 1) / 2
    return hp * mpmath.log(hp) - (hm * mpmath.log(hm) if hm > 0 else 0)


# --- entropy -------------------------------------------------------------------


def test_entropy_pure_state_is_zero():
    assert entropy_f(1.0) == 0.0


def test_entropy_at_three_is_two_ln_two():
    assert_allclose(entropy_f(3.0), 2 * math.log(2), rtol=1e-15)


@pytest.mark.parametrize("x", [1.0 + 1e-12, 1.0 + 1e-6, 1.5, 1.999, 2.0, 2.5, 10.0, 1e3, 1e6, 9.9e7])
def test_entropy_matches_extended_precision(x):
    assert_allclose(entropy_f(x), float(f_mp(x)), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("x", [1e8 * 1.000001, 1e10, 1e12, 1e15])
def test_entropy_asymptotic_branch(x):
    assert_allclose(entropy_f(x), float(f_mp(x)), rtol=1e-12)


def test_entropy_at_1e12_vs_asymptote():
    assert abs(entropy_f(1e12) - (math.log(5e11) + 1)) / entropy_f(1e12) < 1e-12


def test_entropy_branches_agree_at_switchover():
    x = 1e8
    exact = float(f_mp(x))
    assert abs(exact - (math.log(x / 2) + 1)) < 1e-10
    assert_allclose(entropy_f(x * (1 - 1e-15)), entropy_f(x * (1 + 1e-15)), atol=1e-10)


def test_entropy_rejects_unphysical():
    with pytest.raises(UnphysicalStateError):
        entropy_f(1.0 - 1e-6)
    # rounding below 1 is tolerated and clamped
    assert entropy_f(1.0 - 1e-12) == 0.0


def test_entropy_from_log_beyond_float_range():
    log_x = 2000.0
    assert_allclose(entropy_f_from_log(log_x), log_x - math.log(2) + 1, rtol=1e-15)
    assert_allclose(entropy_f_from_log(math.log(7.0)), entropy_f(7.0), rtol=1e-14)


@given(st.floats(min_value=1.0, max_value=1e7))
def test_entropy_monotone(x):
    assert entropy_f(x * 1.01) >= entropy_f(x)


# --- invariants and symplectic spectrum ------------------------------------------


def test_invariants_identity():
    inv = invariants(np.eye(4))
    assert (inv.a, inv.b, inv.c, inv.d) == (1.0, 1.0, 0.0, 1.0)


def test_invariants_product_thermal():
    sigma = np.diag([2.0, 2.0, 3.0, 3.0])
    inv = invariants(sigma)
    assert_allclose((inv.a, inv.b, inv.c, inv.d), (4.0, 9.0, 0.0, 36.0))


def test_invariants_scaling(rng):
    sigma = random_covariance(rng)
    s = 3.7
    i1, i2 = invariants(sigma), invariants(s * sigma)
    assert_allclose((i2.a, i2.b, i2.c), (s**2 * i1.a, s**2 * i1.b, s**2 * i1.c), rtol=1e-12)
    assert_allclose(i2.d, s**4 * i1.d, rtol=1e-12)


def test_invariants_log_domain_matches_direct(rng):
    sigma = random_covariance(rng)
    big = 1e60 * sigma
    inv = invariants(big)
    assert inv.log_domain
    ref = invariants(sigma)
    assert_allclose(inv.log_a, math.log(ref.a) + 2 * math.log(1e60), rtol=1e-13)
    assert_allclose(inv.log_d, math.log(ref.d) + 4 * math.log(1e60), rtol=1e-13)
    a, b, c, d, log_s2 = inv.scaled()
    # scaled invariants reproduce the originals
    assert_allclose(a * math.exp(log_s2 - 2 * math.log(1e60)), ref.a, rtol=1e-10)
    assert_allclose(d * math.exp(2 * log_s2 - 4 * math.log(1e60)), ref.d, rtol=1e-10)


def test_invariants_swapped():
    sigma = np.diag([2.0, 2.0, 3.0, 3.0])
    inv = invariants(sigma).swapped()
    assert_allclose((inv.a, inv.b), (9.0, 4.0))


def test_symplectic_eigenvalues_trivial():
    assert_allclose(symplectic_eigenvalues(np.eye(4)), (1.0, 1.0))
    assert_allclose(symplectic_eigenvalues(np.diag([2.0, 2.0, 5.0, 5.0])), (2.0, 5.0))


def test_symplectic_eigenvalues_vs_direct_eigenproblem(rng):
    for _ in range(50):
        sigma = random_covariance(rng)
        # moduli of the eigenvalues of i Omega sigma come in +- pairs
        direct = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ sigma)))[::2]
        assert_allclose(symplectic_eigenvalues(sigma), direct, rtol=1e-10)


def test_determinant_identity(rng):
    for _ in range(50):
        sigma = random_covariance(rng)
        nm, npl = symplectic_eigenvalues(sigma)
        assert abs((nm * npl) ** 2 - np.linalg.det(sigma)) / np.linalg.det(sigma) < 1e-10


@given(st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=30)
def test_symplectic_homogeneity(s):
    sigma = random_covariance(np.random.default_rng(7))
    assert_allclose(symplectic_eigenvalues(s * sigma), s * np.array(symplectic_eigenvalues(sigma)),
                    rtol=1e-10)


@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0))
def test_product_state_symplectic_spectrum(x, y):
    sigma = np.diag([x, x, y, y])
    assert_allclose(symplectic_eigenvalues(sigma), sorted([x, y]), rtol=1e-10)


def test_inconsistent_invariants_raise():
    with pytest.raises(InconsistentInvariantsError):
        _nu_sq_pair(1.0, 1.0)


def test_ppt_identity_and_tmsv():
    assert_allclose(ppt_min_symplectic_eig(np.eye(4)), 1.0)
    r = 0.4
    sigma = two_mode_squeezed(r)
    # partial transposition flips p_G; compare with the direct eigenproblem
    t = np.diag([1.0, 1.0, 1.0, -1.0])
    direct = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ (t @ sigma @ t))))[0]
    assert_allclose(ppt_min_symplectic_eig(sigma), math.exp(-2 * r), rtol=1e-12)
    assert_allclose(direct, math.exp(-2 * r), rtol=1e-12)


def test_two_mode_squeezed_is_pure():
    assert_allclose(symplectic_eigenvalues(two_mode_squeezed(1.1)), (1.0, 1.0), rtol=1e-12)


def test_check_covariance():
    check_covariance(np.eye(4))
    with pytest.raises(UnphysicalStateError):
        check_covariance(0.5 * np.eye(4))
    with pytest.raises(UnphysicalStateError):
        bad = np.eye(4)
        bad[0, 1] = 0.3
        check_covariance(bad)
    with pytest.raises(ValueError):
        check_covariance(np.eye(3))


# --- matrix exponential ---------------------------------------------------------


def test_expm_zero():
    assert_allclose(matrix_exponential(np.zeros((4, 4))), np.eye(4))


def test_expm_beam_splitter():
    g, t = 1.3, 0.7
    m = np.array([[0, -1j * g], [-1j * g, 0]])
    ref = np.array([[math.cos(g * t), -1j * math.sin(g * t)], [-1j * math.sin(g * t), math.cos(g * t)]])
    assert_allclose(matrix_exponential(m, t), ref, atol=1e-14)


@pytest.mark.parametrize("lam,t", [(0.0, 3.0), (-0.5, 2.0), (0.3, 10.0)])
def test_expm_jordan_block(lam, t):
    m = np.array([[lam, 1.0], [0.0, lam]])
    ref = math.exp(lam * t) * np.array([[1.0, t], [0.0, 1.0]])
    assert_allclose(matrix_exponential(m, t), ref, rtol=1e-13, atol=1e-15)


def test_expm_vs_mpmath(rng):
    for scale in (0.01, 1.0, 5.0):
        m = scale * rng.normal(size=(4, 4))
        ref = np.array(mpmath.expm(mpmath.matrix(m.tolist())).tolist(), dtype=float)
        assert_allclose(matrix_exponential(m), ref, rtol=1e-12, atol=1e-13 * np.abs(ref).max())


def test_expm_vs_scipy_complex(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert_allclose(matrix_exponential(m, 0.8), expm(0.8 * m), rtol=1e-12)


def test_expm_semigroup(rng):
    m = rng.normal(size=(4, 4))
    m *= 10.0 / np.linalg.norm(m, 1)
    t1, t2 = 0.8, 1.2
    lhs = matrix_exponential(m, t1) @ matrix_exponential(m, t2)
    rhs = matrix_exponential(m, t1 + t2)
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) < 1e-10


def test_expm_overflow():
    with pytest.raises(PropagationOverflow):
        matrix_exponential(np.array([[700.0]]), 1.0)


# --- Lyapunov -------------------------------------------------------------------


def test_lyapunov_scalar_balance():
    assert_allclose(lyapunov_solve(-np.eye(4), 2 * np.eye(4)), np.eye(4), atol=1e-15)


def test_lyapunov_vs_scipy(rng):
    for _ in range(10):
        y = rng.normal(size=(4, 4))
        y -= (np.max(np.linalg.eigvals(y).real) + 0.5) * np.eye(4)
        q = rng.normal(size=(4, 4))
        q = q @ q.T + np.eye(4)
        sigma = lyapunov_solve(y, q)
        assert_allclose(sigma, solve_continuous_lyapunov(y, -q), rtol=1e-9, atol=1e-12)
        assert np.max(np.abs(y @ sigma + sigma @ y.T + q)) < 1e-10 * max(1.0, np.abs(q).max())
        assert np.all(np.linalg.eigvalsh(sigma) > 0)
        assert np.array_equal(sigma, sigma.T)


def test_lyapunov_rejects_unstable():
    y = np.diag([-1.0, -1.0, 0.5, -1.0])
    with pytest.raises(NoStationarySolution) as exc:
        lyapunov_solve(y, np.eye(4))
    assert exc.value.real_parts[0] == pytest.approx(0.5)


def test_tolerances_centralised():
    assert (TOL.physical, TOL.residual, TOL.spectral) == (1e-9, 1e-10, 1e-12)
