"""Generators and propagators for the gain-loss oscillator pair.

Mode order is ``(L, G)`` throughout: the mean field is
``psi = (<a_L>, <a_G>)`` and the covariance quadratures are
``(x_L, p_L, x_G, p_G)``. Times are in the same units as ``1/g``.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    TOL,
    NoStationarySolution,
    PropagationOverflow,
    lyapunov_solve,
    matrix_exponential,
)

__all__ = [
    "Channel",
    "SystemParams",
    "MeanField",
    "PTClass",
    "Stability",
    "StabilityClass",
    "mean_field_generator",
    "mean_field_spectrum",
    "propagate_mean_field",
    "drift_matrix",
    "diffusion_matrix",
    "drift_eigenvalues",
    "covariance_propagator",
    "propagate_covariance",
    "stationary_covariance",
    "stability_class",
]

COVARIANCE_GUARD = 1e100
AMPLITUDE_GUARD = 1e150
# largest ||Y h|| used for one exact propagation chunk
_CHUNK_NORM = 4.0


class Channel(Enum):
    GAIN = "gain"
    LOSS = "loss"

    @property
    def sign(self):
        """``+1`` for gain, ``-1`` for loss (sign of the rate on the drift diagonal)."""
        return 1.0 if self is Channel.GAIN else -1.0


@dataclass(frozen=True)
class SystemParams:
    """Coupling and local channels of the two modes.

    ``rate_L`` acts on mode L, ``rate_G`` on mode G. The default channel kinds
    (loss on L, gain on G) give the PT-symmetric setup when the rates match.
    """

    g: float = 1.0
    rate_L: float = 0.0
    rate_G: float = 0.0
    kind_L: Channel = Channel.LOSS
    kind_G: Channel = Channel.GAIN

    def __post_init__(self):
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"coupling g must be positive, got {self.g!r}")
        for name in ("rate_L", "rate_G"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite rate >= 0, got {v!r}")
        object.__setattr__(self, "kind_L", Channel(self.kind_L))
        object.__setattr__(self, "kind_G", Channel(self.kind_G))

    @classmethod
    def gain_loss(cls, gamma_gain, gamma_loss, g=1.0):
        """Gain ``gamma_gain`` on G, loss ``gamma_loss`` on L."""
        return cls(g=g, rate_L=gamma_loss, rate_G=gamma_gain)

    @property
    def signed_rates(self):
        """Drift-diagonal entries ``(s_L, s_G)``: ``+rate`` for gain, ``-rate`` for loss."""
        return self.kind_L.sign * self.rate_L, self.kind_G.sign * self.rate_G

    @property
    def is_gain_loss(self):
        return self.kind_L is Channel.LOSS and self.kind_G is Channel.GAIN


@dataclass(frozen=True)
class MeanField:
    """Complex mode amplitudes ``psi = (<a_L>, <a_G>)``."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex).reshape(2)
        if not np.all(np.isfinite(psi)):
            raise ValueError("mean field must be finite")
        psi.flags.writeable = False
        object.__setattr__(self, "psi", psi)

    @classmethod
    def coherent(cls, alpha_L=0.0, alpha_G=0.0):
        return cls(np.array([alpha_L, alpha_G], dtype=complex))

    def quadratures(self):
        """Mean quadratures ``(x_L, p_L, x_G, p_G)``; ``<x> = sqrt2 Re a``, ``<p> = sqrt2 Im a``."""
        r2 = math.sqrt(2.0)
        a_l, a_g = self.psi
        return np.array([r2 * a_l.real, r2 * a_l.imag, r2 * a_g.real, r2 * a_g.imag])


class PTClass(Enum):
    EXACT = "exact"
    EXCEPTIONAL_POINT = "exceptional_point"
    BROKEN = "broken"
    NOT_PT_SYMMETRIC = "not_pt_symmetric"


class Stability(Enum):
    FULLY_STABLE = "fully_stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityClass:
    label: Stability
    real_parts: tuple

    @property
    def fully_stable(self):
        return self.label is Stability.FULLY_STABLE


# --- mean field ------------------------------------------------------------


def mean_field_generator(p):
    """Non-Hermitian generator ``H`` of ``i dpsi/dt = H psi``.

    Loss contributes ``-i rate`` on its diagonal entry, gain ``+i rate``.
    """
    s_l, s_g = p.signed_rates
    return np.array([[1j * s_l, p.g], [p.g, 1j * s_g]], dtype=complex)


def _eig2(h):
    half_tr = 0.5 * (h[0, 0] + h[1, 1])
    half_diff = 0.5 * (h[0, 0] - h[1, 1])
    root = cmath.sqrt(half_diff * half_diff + h[0, 1] * h[1, 0])
    return half_tr + root, half_tr - root


def mean_field_spectrum(p, tol=TOL):
    """Eigenvalues of ``H`` and the PT classification.

    With loss on L and gain on G at a common rate ``gamma`` the eigenvalues are
    ``+-sqrt(g^2 - gamma^2)``: real below ``g``, coalescing at ``g``, and an
    imaginary pair above. Returned in the order ``(+root, -root)``.
    """
    eps = np.array(_eig2(mean_field_generator(p)))
    if not p.is_gain_loss or abs(p.rate_L - p.rate_G) > tol.spectral * max(p.rate_L, p.rate_G, p.g):
        return eps, PTClass.NOT_PT_SYMMETRIC
    gamma = 0.5 * (p.rate_L + p.rate_G)
    if abs(gamma - p.g) <= tol.spectral * p.g:
        return eps, PTClass.EXCEPTIONAL_POINT
    return eps, (PTClass.EXACT if gamma < p.g else PTClass.BROKEN)


def propagate_mean_field(psi0, p, t):
    """``psi(t) = exp(-i H t) psi0``; valid at the exceptional point too.

    Raises:
        PropagationOverflow: if an amplitude exceeds ``1e150``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    psi0 = psi0 if isinstance(psi0, MeanField) else MeanField(psi0)
    gen = -1j * mean_field_generator(p)
    n_chunks = max(1, int(math.ceil(np.linalg.norm(gen, 1) * t / 20.0)))
    step = matrix_exponential(gen, t / n_chunks)
    psi = psi0.psi.copy()
    for _ in range(n_chunks):
        psi = step @ psi
        if np.max(np.abs(psi)) > AMPLITUDE_GUARD:
            raise PropagationOverflow(f"mean-field amplitude exceeds {AMPLITUDE_GUARD:.0e}")
    return MeanField(psi)


# --- second moments --------------------------------------------------------


def drift_matrix(p):
    """Real 4x4 drift matrix ``Y`` of ``dsigma/dt = Y sigma + sigma Y^T + 4 D``."""
    s_l, s_g = p.signed_rates
    g = p.g
    return np.array(
        [
            [s_l, 0.0, 0.0, g],
            [0.0, s_l, -g, 0.0],
            [0.0, g, s_g, 0.0],
            [-g, 0.0, 0.0, s_g],
        ]
    )


def diffusion_matrix(p):
    """``D = diag(rate_L, rate_L, rate_G, rate_G) / 2`` for either channel kind."""
    return 0.5 * np.diag([p.rate_L, p.rate_L, p.rate_G, p.rate_G])


def drift_eigenvalues(p):
    """Eigenvalues of ``Y``: those of ``-iH`` and their complex conjugates.

    Closed form, so exact zeros of the real part (closed system, PT-exact
    phase) stay exact instead of picking up rounding noise.
    """
    lam = np.array(_eig2(-1j * mean_field_generator(p)))
    return np.concatenate([lam, lam.conj()])


def stability_class(p, tol=TOL):
    """Fully stable iff every eigenvalue of ``Y`` has real part below ``-1e-12``."""
    real_parts = tuple(sorted(drift_eigenvalues(p).real, reverse=True))
    stable = real_parts[0] < -tol.hurwitz
    return StabilityClass(Stability.FULLY_STABLE if stable else Stability.UNSTABLE, real_parts)


def covariance_propagator(p, h):
    """One-step map ``sigma -> Phi sigma Phi^T + Q`` over time ``h``.

    ``Phi = exp(Y h)`` and ``Q = 4 int_0^h exp(Ys) D exp(Y^T s) ds`` are read off
    the exponential of the block matrix ``[[Y, 4D], [0, -Y^T]]``.
    """
    y = drift_matrix(p)
    aug = np.zeros((8, 8))
    aug[:4, :4] = y
    aug[:4, 4:] = 4.0 * diffusion_matrix(p)
    aug[4:, 4:] = -y.T
    big = matrix_exponential(aug, h)
    phi = big[:4, :4]
    q = big[:4, 4:] @ phi.T
    return phi, 0.5 * (q + q.T)


def _guard(sigma):
    if not np.all(np.isfinite(sigma)) or np.max(np.abs(sigma)) > COVARIANCE_GUARD:
        raise PropagationOverflow(f"covariance entry exceeds {COVARIANCE_GUARD:.0e}")


def _rk4(sigma, y, q4, t, dt):
    n = int(math.ceil(t / dt - 1e-9))
    h = t / n if n else 0.0
    yt = y.T

    def rhs(s):
        return y @ s + s @ yt + q4

    for _ in range(n):
        k1 = rhs(sigma)
        k2 = rhs(sigma + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h * k2)
        k4 = rhs(sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma = 0.5 * (sigma + sigma.T)
        _guard(sigma)
    return sigma


def propagate_covariance(sigma0, p, t, method="exact", dt=1e-3):
    """Evolve a covariance matrix for a time ``t``.

    Args:
        sigma0: initial 4x4 covariance matrix.
        p: :class:`SystemParams`.
        t: elapsed time, ``>= 0``.
        method: ``"exact"`` (exponential propagator, applied in chunks with
            ``||Y h|| <= 4``) or ``"rk4"`` (classic fixed-step Runge-Kutta).
        dt: RK4 step, in units of ``1/g`` (the step actually used is ``dt / g``).

    Raises:
        PropagationOverflow: once any entry exceeds ``1e100``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    sigma = np.array(sigma0, dtype=float)
    if t == 0:
        return sigma
    if method == "rk4":
        return _rk4(sigma, drift_matrix(p), 4.0 * diffusion_matrix(p), t, dt / p.g)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    norm = np.linalg.norm(drift_matrix(p), 1)
    n = max(1, int(math.ceil(norm * t / _CHUNK_NORM)))
    phi, q = covariance_propagator(p, t / n)
    for _ in range(n):
        sigma = phi @ sigma @ phi.T + q
        sigma = 0.5 * (sigma + sigma.T)
        _guard(sigma)
    return sigma


def stationary_covariance(p, tol=TOL):
    """Stationary covariance, solving ``Y sigma + sigma Y^T = -4D``.

    Raises:
        NoStationarySolution: outside the fully stable region.
    """
    st = stability_class(p, tol)
    if not st.fully_stable:
        raise NoStationarySolution(
            f"no stationary state: max Re lambda(Y) = {st.real_parts[0]:.6g}", st.real_parts
        )
    return lyapunov_solve(drift_matrix(p), 4.0 * diffusion_matrix(p), tol)
