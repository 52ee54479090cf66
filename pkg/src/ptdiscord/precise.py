"""Covariance trajectories in ball arithmetic.

Away from the fully stable region the covariance matrix grows like
``exp(2 lambda t)`` while the correlations depend on its O(1) part, so
double precision loses everything after a few units of ``1/g``.
:class:`PreciseTrajectory` propagates ``sigma`` as a ``flint.arb_mat`` at a
working precision large enough for the 1e100 overflow guard.

Propagation runs in midpoint arithmetic: carrying ball radii through
thousands of matrix products overestimates them exponentially (the wrapping
effect), while the true rounding error stays near ``n_steps * 2**-prec`` in
relative terms. The reported ``error_bound`` is the rigorous radius of the
correlation formulas evaluated on the propagated midpoint.
"""

import math
from contextlib import contextmanager

import flint
import numpy as np
from flint import arb, arb_mat

from .core import TOL, PropagationOverflow
from .correlations import correlation_report
from .dynamics import COVARIANCE_GUARD, diffusion_matrix, drift_matrix

__all__ = ["PreciseTrajectory", "DEFAULT_PREC", "precision_for_guard"]



def precision_for_guard(log10_guard):
    """Bits needed to keep ~40 significant digits with entries up to ``10**log10_guard``.

    Correlations of a covariance matrix with entries ``E`` cancel about
    ``E**2`` in relative terms.
    """
    return int(math.ceil(2.0 * log10_guard * math.log2(10.0))) + 136


DEFAULT_PREC = precision_for_guard(math.log10(COVARIANCE_GUARD))


@contextmanager
def _working_prec(bits):
    old = flint.ctx.prec
    flint.ctx.prec = bits
    try:
        yield
    finally:
        flint.ctx.prec = old


def _sub(m, r0, c0, n=4):
    return arb_mat(n, n, [m[r0 + i, c0 + j] for i in range(n) for j in range(n)])


def _sym(m):
    return ((m + m.transpose()) / 2).mid()


class PreciseTrajectory:
    """Covariance trajectory sampled on a uniform time grid ``k * step``.

    Args:
        p: :class:`~ptdiscord.dynamics.SystemParams`.
        step: sampling stride (same time units as ``1/g``).
        sigma0: initial covariance matrix, identity (coherent states) by default.
        prec: working precision in bits.
        guard: largest tolerated ``max |sigma_ij|`` at the starting precision.
        max_log10_guard: when above ``log10(guard)``, crossing the guard
            cubes it (up to ``10**max_log10_guard``), raises the precision to
            match and re-propagates instead of raising
            :class:`~ptdiscord.core.PropagationOverflow`.
    """

    def __init__(self, p, step, sigma0=None, prec=DEFAULT_PREC, guard=COVARIANCE_GUARD,
                 max_log10_guard=None):
        if step <= 0:
            raise ValueError("step must be positive")
        self.params = p
        self.step = float(step)
        self.prec = prec
        self.log10_guard = math.log10(guard)
        self.max_log10_guard = self.log10_guard if max_log10_guard is None else max_log10_guard
        self.n_steps = 0
        self.escalations = 0
        self._sigma0 = np.eye(4) if sigma0 is None else np.asarray(sigma0, dtype=float)
        self._build()
        with _working_prec(self.prec):
            self.sigma = arb_mat(self._sigma0.tolist())

    def _build(self):
        with _working_prec(self.prec):
            y = drift_matrix(self.params)
            aug = np.zeros((8, 8))
            aug[:4, :4] = y
            aug[:4, 4:] = 4.0 * diffusion_matrix(self.params)
            aug[4:, 4:] = -y.T
            big = (arb_mat(aug.tolist()) * arb(self.step)).exp()
            phi = _sub(big, 0, 0).mid()
            q = _sym(_sub(big, 0, 4) * phi.transpose())
        # _powers[k] advances by 2**k steps
        self._powers = [(phi, q)]

    def _escalate(self):
        # cube the guard and re-propagate from the start at matching precision
        self.log10_guard = min(3.0 * self.log10_guard, self.max_log10_guard)
        self.prec = max(self.prec, precision_for_guard(self.log10_guard))
        self.escalations += 1
        self._build()
        n, self.n_steps = self.n_steps, 0
        with _working_prec(self.prec):
            self.sigma = arb_mat(self._sigma0.tolist())
        self.jump(n)

    @property
    def time(self):
        return self.n_steps * self.step

    def _power(self, k):
        with _working_prec(self.prec):
            while len(self._powers) <= k:
                phi, q = self._powers[-1]
                self._powers.append((phi * phi, _sym(phi * q * phi.transpose() + q)))
        return self._powers[k]

    def _apply(self, phi, q):
        with _working_prec(self.prec):
            self.sigma = _sym(phi * self.sigma * phi.transpose() + q)

    def log10_max_abs(self):
        """``log10 max |sigma_ij|``; finite far beyond the float range."""
        with _working_prec(self.prec):
            m = max(abs(self.sigma[i, j]).upper() for i in range(4) for j in range(4))
            if not m.is_finite():
                return math.inf
            return float((m + arb(1e-300)).log()) / math.log(10.0)

    def max_abs(self):
        m = self.log10_max_abs()
        return 10.0 ** m if m < 308.0 else math.inf

    def _check(self):
        m = self.log10_max_abs()
        if m > self.log10_guard and math.isfinite(m) and self.log10_guard < self.max_log10_guard:
            self._escalate()
            return
        if m > self.log10_guard:
            raise PropagationOverflow(
                f"covariance entry 1e{m:.1f} exceeds guard 1e{self.log10_guard:.0f}"
                f" at t = {self.time:.6g}"
            )

    def advance(self, n=1):
        """Advance by ``n`` strides, one at a time (checking the guard each stride)."""
        phi, q = self._powers[0]
        for _ in range(n):
            self._apply(phi, q)
            self.n_steps += 1
            self._check()
        return self

    def jump(self, n):
        """Advance by ``n`` strides at once with precomputed doubling propagators."""
        k = 0
        while n:
            if n & 1:
                self._apply(*self._power(k))
                self.n_steps += 1 << k
            n >>= 1
            k += 1
        self._check()
        return self

    def sigma_float(self):
        """Midpoint of the current covariance ball as a float array."""
        return np.array([[float(self.sigma[i, j]) for j in range(4)] for i in range(4)])

    def report(self, tol=TOL):
        """:class:`~ptdiscord.correlations.CorrelationReport` at the current time."""
        with _working_prec(self.prec):
            return correlation_report(self.sigma, self.time, tol)
