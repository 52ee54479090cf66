"""Mutual information, Gaussian discord and the PPT witness of two-mode states.

Every function accepts a float ``numpy`` covariance matrix. The closed forms
also accept a ``flint.arb_mat`` (ball arithmetic), which is how trajectories
with exponentially growing covariance matrices are evaluated without losing
the O(1) structure that the correlations depend on.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from flint import arb, arb_mat
from scipy.optimize import minimize

from .core import (
    TOL,
    UnphysicalStateError,
    _nonneg,
    _nu_sq_pair,
    _williamson,
    entropy_f,
    entropy_f_from_log,
    invariants,
)

__all__ = [
    "MeasuredParty",
    "CorrelationReport",
    "mutual_information",
    "gaussian_discord",
    "classical_correlations",
    "discord_measurement_oracle",
    "correlation_report",
]

log = logging.getLogger(__name__)


class MeasuredParty(Enum):
    """Which mode the local Gaussian measurement acts on.

    ``G`` gives ``D_GL`` (measure G, condition L); ``L`` gives ``D_LG``.
    """

    G = "G"
    L = "L"


@dataclass(frozen=True)
class CorrelationReport:
    """Correlation measures (nats) of one covariance matrix.

    ``error_bound`` is the largest certified radius of the reported measures
    when evaluated in ball arithmetic, and 0 for plain float evaluation.
    """

    mutual_information: float
    discord_GL: float
    discord_LG: float
    classical_GL: float
    classical_LG: float
    ppt_nu_min: float
    time: float | None = None
    error_bound: float = 0.0


# --- scalar helpers that work for float and arb -----------------------------


def _is_arb(x):
    return isinstance(x, arb)


def _sqrt(x):
    return x.sqrt() if _is_arb(x) else math.sqrt(x)


def _sq(x):
    # arb ** 2 is NaN for balls containing zero
    return abs(x) * abs(x)


def _clamp0(x):
    return _nonneg(x)


def _xlogx(h):
    if h.lower() > 0:
        return h * h.log()
    u = float(h.upper())
    if u <= 0:
        return arb(0)
    # |h ln h| <= u |ln u| on (0, u] for u < 1/e
    return arb(0, u * abs(math.log(u)) if u < math.exp(-1) else 1.0)


def _f_arb(x, tol):
    if float(x) < 1.0 - tol.physical:
        raise UnphysicalStateError(f"symplectic eigenvalue {float(x)!r} below 1")
    if float(x) >= 2.0:
        inv = 1 / x
        return (x / 2).log() + x * inv.atanh() + (-(inv * inv)).log1p() / 2
    return _xlogx((x + 1) / 2) - _xlogx((x - 1) / 2)


def _entropy_sq(v, log_s2, tol):
    """``f(sqrt(v * exp(log_s2)))``."""
    if _is_arb(v):
        return _f_arb(_clamp0(v).sqrt(), tol)
    if log_s2 == 0.0:
        return entropy_f(math.sqrt(max(v, 0.0)), tol)
    if v <= 0:
        raise UnphysicalStateError("non-positive squared symplectic eigenvalue")
    return entropy_f_from_log(0.5 * (math.log(v) + log_s2), tol)


def _emin(a, b, c, d, one, log_s2, tol):
    """Scaled optimal conditional determinant for a measurement on the ``b`` mode."""
    lhs = one * _sq(d - a * b)
    rhs = (one + b) * _sq(c) * (a * one + d)
    degenerate = log_s2 == 0.0 and abs(float(b) - 1.0) < tol.physical
    if float(lhs - rhs) <= 0.0 and not degenerate:
        w = _clamp0(c * c * one + (b - one) * (d - a * one))
        return _sq((abs(c) * _sqrt(one) + _sqrt(w)) / (b - one))
    p = a * b - c * c + d
    c2 = _sq(c)
    r = _sqrt(_clamp0(_sq(c2) + _sq(d - a * b) - 2 * c2 * (a * b + d)))
    if float(p) >= 0:
        return 2 * a * d / (p + r)
    return (p - r) / (2 * b)


def _scaled_invariants(sigma, tol):
    if isinstance(sigma, arb_mat):

        def det2(i, j):
            return sigma[i, j] * sigma[i + 1, j + 1] - sigma[i, j + 1] * sigma[i + 1, j]

        return det2(0, 0), det2(2, 2), det2(0, 2), sigma.det(), arb(1), 0.0
    a, b, c, d, log_s2 = invariants(sigma, tol).scaled()
    return a, b, c, d, math.exp(-log_s2), log_s2


def _terms(sigma, tol):
    a, b, c, d, one, log_s2 = _scaled_invariants(sigma, tol)
    nu_m2, nu_p2 = _nu_sq_pair(a + b + 2 * c, d, tol)
    if not _is_arb(a) and log_s2 == 0.0:
        nu_m2, nu_p2 = (v * v for v in _williamson(np.asarray(sigma, dtype=float)))
    ent = {
        "a": _entropy_sq(a, log_s2, tol),
        "b": _entropy_sq(b, log_s2, tol),
        "nu": _entropy_sq(nu_m2, log_s2, tol) + _entropy_sq(nu_p2, log_s2, tol),
    }
    return a, b, c, d, one, log_s2, ent


def _discord_from_terms(a, b, c, d, one, log_s2, ent, party, tol):
    if party is MeasuredParty.L:
        a, b = b, a
        f_meas = ent["a"]
    else:
        f_meas = ent["b"]
    # a conditional covariance is physical, so E_min >= 1; near-pure states put
    # E_min on a square-root branch point where rounding can dip below it
    e = _emin(a, b, c, d, one, log_s2, tol)
    e = one + _clamp0(e - one)
    return f_meas - ent["nu"] + _entropy_sq(e, log_s2, tol)


def _clamp_measure(value, name):
    v = float(value)
    if v < 0.0:
        if v < -TOL.physical:
            log.warning("%s = %.3e < 0 clamped to 0", name, v)
        return 0.0
    return v


def mutual_information(sigma, tol=TOL):
    """``I = f(sqrt a) + f(sqrt b) - f(nu_-) - f(nu_+)`` in nats."""
    *_, ent = _terms(sigma, tol)
    return _clamp_measure(ent["a"] + ent["b"] - ent["nu"], "mutual information")


def gaussian_discord(sigma, party=MeasuredParty.G, tol=TOL):
    """Two-mode Gaussian discord for a Gaussian measurement on ``party``.

    ``D = f(sqrt b) - f(nu_-) - f(nu_+) + f(sqrt E_min)`` where ``b`` is the
    determinant of the measured block and ``E_min`` the smallest determinant
    of the conditional covariance of the other mode over all Gaussian
    measurements. ``E_min`` is evaluated in a cancellation-free form of the
    standard two-branch expression.
    """
    party = MeasuredParty(party)
    a, b, c, d, one, log_s2, ent = _terms(sigma, tol)
    return _clamp_measure(_discord_from_terms(a, b, c, d, one, log_s2, ent, party, tol), "discord")


def classical_correlations(sigma, party=MeasuredParty.G, tol=TOL):
    """``C = I - D`` for a Gaussian measurement on ``party``."""
    party = MeasuredParty(party)
    a, b, c, d, one, log_s2, ent = _terms(sigma, tol)
    mi = ent["a"] + ent["b"] - ent["nu"]
    disc = _discord_from_terms(a, b, c, d, one, log_s2, ent, party, tol)
    return _clamp_measure(mi - max(float(disc), 0.0), "classical correlations")


def correlation_report(sigma, t=None, tol=TOL):
    """All correlation measures plus the PPT witness for one covariance matrix."""
    a, b, c, d, one, log_s2, ent = _terms(sigma, tol)
    mi = ent["a"] + ent["b"] - ent["nu"]
    d_gl = _discord_from_terms(a, b, c, d, one, log_s2, ent, MeasuredParty.G, tol)
    d_lg = _discord_from_terms(a, b, c, d, one, log_s2, ent, MeasuredParty.L, tol)
    ppt2, _ = _nu_sq_pair(a + b - 2 * c, d, tol)
    if not _is_arb(ppt2) and log_s2 == 0.0:
        ppt2 = _williamson(np.asarray(sigma, dtype=float), partial_transpose=True)[0] ** 2
    if _is_arb(ppt2):
        ppt = _clamp0(ppt2).sqrt()
        bound = max(float(x.rad()) for x in (mi, d_gl, d_lg, ppt))
    else:
        ppt = math.exp(0.5 * (math.log(ppt2) + log_s2))
        bound = 0.0
    mi_f = _clamp_measure(mi, "mutual information")
    d_gl_f = _clamp_measure(d_gl, "discord_GL")
    d_lg_f = _clamp_measure(d_lg, "discord_LG")
    return CorrelationReport(
        mutual_information=mi_f,
        discord_GL=d_gl_f,
        discord_LG=d_lg_f,
        classical_GL=mi_f - d_gl_f,
        classical_LG=mi_f - d_lg_f,
        ppt_nu_min=float(ppt),
        time=t,
        error_bound=bound,
    )


# --- brute-force oracle ----------------------------------------------------


def _blocks(sigma, party):
    if party is MeasuredParty.G:
        return sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:]
    return sigma[2:, 2:], sigma[:2, :2], sigma[2:, :2]


def _conditional_dets(alpha, beta, gamma, r, phi):
    """``det(alpha - gamma (beta + sigma_m)^-1 gamma^T)`` on arrays of ``(r, phi)``."""
    c, s = np.cos(phi), np.sin(phi)
    # work in the frame rotated by phi, where the seed is diag(e^{2r}, e^{-2r});
    # avoids cancelling e^{4r} terms in det(beta + sigma_m)
    b00 = c * c * beta[0, 0] + 2 * c * s * beta[0, 1] + s * s * beta[1, 1]
    b11 = s * s * beta[0, 0] - 2 * c * s * beta[0, 1] + c * c * beta[1, 1]
    b01 = c * s * (beta[1, 1] - beta[0, 0]) + (c * c - s * s) * beta[0, 1]
    g00 = gamma[0, 0] * c + gamma[0, 1] * s
    g01 = -gamma[0, 0] * s + gamma[0, 1] * c
    g10 = gamma[1, 0] * c + gamma[1, 1] * s
    g11 = -gamma[1, 0] * s + gamma[1, 1] * c
    m00 = b00 + np.exp(2 * r)
    m11 = b11 + np.exp(-2 * r)
    det_m = m00 * m11 - b01 * b01
    i00, i11, i01 = m11 / det_m, m00 / det_m, -b01 / det_m
    # gamma' M^-1 gamma'^T, entrywise
    t00 = g00 * (i00 * g00 + i01 * g01) + g01 * (i01 * g00 + i11 * g01)
    t11 = g10 * (i00 * g10 + i01 * g11) + g11 * (i01 * g10 + i11 * g11)
    t01 = g00 * (i00 * g10 + i01 * g11) + g01 * (i01 * g10 + i11 * g11)
    e00, e11, e01 = alpha[0, 0] - t00, alpha[1, 1] - t11, alpha[0, 1] - t01
    return e00 * e11 - e01 * e01


def discord_measurement_oracle(sigma, party=MeasuredParty.G, grid=(200, 720), r_max=5.0,
                               refine=False, tol=TOL):
    """Gaussian discord by brute-force search over pure Gaussian measurements.

    Each measurement seed is a rotated squeezed vacuum
    ``R(phi) diag(e^{2r}, e^{-2r}) R(phi)^T`` on the measured mode; the
    conditional covariance of the other mode is the Schur complement
    ``alpha - gamma (beta + sigma_m)^-1 gamma^T``, independent of the outcome.
    The smallest determinant over an ``(n_r, n_phi)`` grid with
    ``r in [0, r_max]``, ``phi in [0, pi)`` gives an upper bound on the
    discord. With ``refine=True`` the three best grid points are polished
    by local Nelder-Mead searches in which ``r`` is unbounded, so homodyne-like optima
    (``r -> inf``) are reached too.

    Only meant for moderate covariance matrices (entries below ``1e12``).
    """
    party = MeasuredParty(party)
    sigma = np.asarray(sigma, dtype=float)
    if np.max(np.abs(sigma)) >= 1e12:
        raise ValueError("oracle is limited to covariance entries below 1e12")
    alpha, beta, gamma = _blocks(sigma, party)
    n_r, n_phi = grid
    r = np.linspace(0.0, r_max, n_r)[:, None]
    phi = np.linspace(0.0, np.pi, n_phi, endpoint=False)[None, :]
    dets = _conditional_dets(alpha, beta, gamma, r, phi)
    if not np.all(np.isfinite(dets)):
        raise ArithmeticError("singular beta + sigma_m in discord oracle")
    k = np.unravel_index(np.argmin(dets), dets.shape)
    best = float(dets[k])
    if refine:
        # Cartesian seed coordinates (2r cos 2phi, 2r sin 2phi) are smooth through
        # r = 0, where phi alone is degenerate
        def objective(x):
            return _conditional_dets(alpha, beta, gamma, 0.5 * math.hypot(*x),
                                     0.5 * math.atan2(x[1], x[0]))

        for idx in np.argsort(dets, axis=None)[:3]:
            i, j = np.unravel_index(idx, dets.shape)
            rho, ang = 2.0 * r[i, 0], 2.0 * phi[0, j]
            res = minimize(
                objective,
                x0=[rho * math.cos(ang), rho * math.sin(ang)],
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000},
            )
            best = min(best, float(res.fun))
    inv = invariants(sigma, tol)
    if party is MeasuredParty.L:
        inv = inv.swapped()
    nu_m, nu_p = _williamson(sigma)
    value = entropy_f(math.sqrt(inv.b), tol) - entropy_f(nu_m, tol) - entropy_f(nu_p, tol)
    return max(value + entropy_f(math.sqrt(max(best, 1.0 - tol.physical)), tol), 0.0)

