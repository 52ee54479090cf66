"""Fixed-size Gaussian-state kernel.

Covariance matrices are real symmetric 4x4 arrays in the quadrature order
``(x_L, p_L, x_G, p_G)`` with the vacuum normalised to the identity.
Entropies are in nats.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TOL",
    "Tolerances",
    "PTDiscordError",
    "UnphysicalStateError",
    "InconsistentInvariantsError",
    "NoStationarySolution",
    "PropagationOverflow",
    "SymplecticInvariants",
    "OMEGA",
    "symplectic_form",
    "entropy_f",
    "entropy_f_from_log",
    "invariants",
    "symplectic_eigenvalues",
    "ppt_min_symplectic_eig",
    "matrix_exponential",
    "lyapunov_solve",
    "check_covariance",
    "two_mode_squeezed",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module."""

    physical: float = 1e-9
    residual: float = 1e-10
    spectral: float = 1e-12
    hurwitz: float = 1e-12
    log_domain_entry: float = 1e50
    asymptotic_entropy: float = 1e8
    exp_overflow: float = 1e290


TOL = Tolerances()


class PTDiscordError(Exception):
    """Base class for errors raised by this package."""


class UnphysicalStateError(PTDiscordError, ValueError):
    """A covariance matrix or symplectic eigenvalue violates the uncertainty bound."""


class InconsistentInvariantsError(PTDiscordError, ArithmeticError):
    """Determinant invariants that cannot come from a real symmetric matrix."""


class NoStationarySolution(PTDiscordError):
    """The drift matrix is not Hurwitz, so no stationary covariance exists.

    Attributes:
        real_parts: real parts of the drift-matrix eigenvalues, sorted descending.
    """

    def __init__(self, message, real_parts=None):
        super().__init__(message)
        self.real_parts = None if real_parts is None else np.asarray(real_parts)


class PropagationOverflow(PTDiscordError, OverflowError):
    """A propagated quantity left the representable / trusted range."""


def symplectic_form(n_modes=2):
    """Block-diagonal symplectic form with ``[[0, 1], [-1, 0]]`` blocks."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


OMEGA = symplectic_form(2)
OMEGA.flags.writeable = False


# --- entropy ---------------------------------------------------------------


def _f_exact(x):
    # Stable for all x > 1; the textbook form cancels catastrophically for large x.
    if x < 2.0:
        hp, hm = 0.5 * (x + 1.0), 0.5 * (x - 1.0)
        return hp * math.log(hp) - (hm * math.log(hm) if hm > 0.0 else 0.0)
    return math.log(0.5 * x) + x * math.atanh(1.0 / x) + 0.5 * math.log1p(-1.0 / (x * x))


def entropy_f(x, tol=TOL):
    r"""Von Neumann entropy of a single-mode thermal state with symplectic eigenvalue ``x``.

    .. math:: f(x) = \frac{x+1}{2}\ln\frac{x+1}{2} - \frac{x-1}{2}\ln\frac{x-1}{2}

    Above ``x = 1e8`` the asymptote :math:`\ln(x/2) + 1` is used; the two
    branches agree to machine precision there.

    Raises:
        UnphysicalStateError: if ``x < 1 - 1e-9``.
    """
    x = float(x)
    if not x >= 1.0 - tol.physical:
        raise UnphysicalStateError(f"symplectic eigenvalue {x!r} below the uncertainty bound 1")
    if x <= 1.0:
        return 0.0
    if x > tol.asymptotic_entropy:
        return math.log(0.5 * x) + 1.0
    return _f_exact(x)


def entropy_f_from_log(log_x, tol=TOL):
    """Same as :func:`entropy_f` but takes ``ln x``; safe for ``x`` beyond float range."""
    log_x = float(log_x)
    if log_x > math.log(tol.asymptotic_entropy):
        return log_x - math.log(2.0) + 1.0
    return entropy_f(math.exp(log_x), tol)


# --- invariants ------------------------------------------------------------


def _det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


@dataclass(frozen=True)
class SymplecticInvariants:
    """Local symplectic invariants of a two-mode covariance matrix.

    ``a = det L``, ``b = det G``, ``c = det C``, ``d = det sigma``.  Each also
    comes as ``(sign, log|.|)`` so that huge covariance matrices can be handled
    without overflow; the linear values may be ``inf`` in that regime.
    """

    a: float
    b: float
    c: float
    d: float
    sign_a: float
    sign_b: float
    sign_c: float
    sign_d: float
    log_a: float
    log_b: float
    log_c: float
    log_d: float
    log_domain: bool = False

    def swapped(self):
        """Invariants with the roles of the two modes exchanged."""
        return SymplecticInvariants(
            self.b, self.a, self.c, self.d,
            self.sign_b, self.sign_a, self.sign_c, self.sign_d,
            self.log_b, self.log_a, self.log_c, self.log_d,
            self.log_domain,
        )

    def scaled(self):
        """Return ``(a', b', c', d', log_s2)`` with ``a = s^2 a'``, ``d = s^4 d'``.

        ``log_s2`` is zero unless the invariants live in the log domain.
        """
        if not self.log_domain:
            return self.a, self.b, self.c, self.d, 0.0
        logs = [self.log_a, self.log_b, self.log_c, 0.5 * self.log_d]
        log_s2 = max(v for v in logs if np.isfinite(v))

        def rescale(sign, log, power):
            return 0.0 if sign == 0 else sign * math.exp(log - power * log_s2)

        return (
            rescale(self.sign_a, self.log_a, 1),
            rescale(self.sign_b, self.log_b, 1),
            rescale(self.sign_c, self.log_c, 1),
            rescale(self.sign_d, self.log_d, 2),
            log_s2,
        )


def invariants(sigma, tol=TOL):
    """Compute :class:`SymplecticInvariants` of ``sigma``.

    The log domain is switched on automatically when any entry exceeds ``1e50``.
    """
    sigma = np.asarray(sigma, dtype=float)
    blocks = (sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:], sigma)
    signs, logs = [], []
    for m in blocks:
        s, lg = np.linalg.slogdet(m)
        signs.append(float(s))
        logs.append(float(lg))
    log_domain = bool(np.max(np.abs(sigma)) > tol.log_domain_entry)
    if log_domain:
        with np.errstate(over="ignore"):
            lin = [s * math.exp(lg) if s != 0 and lg < 709.0 else (s * math.inf if s else 0.0)
                   for s, lg in zip(signs, logs)]
    else:
        lin = [_det2(blocks[0]), _det2(blocks[1]), _det2(blocks[2]), float(np.linalg.det(sigma))]
    return SymplecticInvariants(*lin, *signs, *logs, log_domain)


# --- closed forms shared with the extended-precision path -------------------


def _nonneg(x):
    """``max(x, 0)``; for a ``flint.arb`` ball, its intersection with ``[0, inf)``."""
    if hasattr(x, "nonnegative_part"):
        return x if x.lower() >= 0 else x.nonnegative_part()
    return max(x, 0.0)


def _nu_sq_pair(delta, d, tol=TOL):
    """Squares of the symplectic eigenvalues from ``Delta`` and ``d``.

    Works for floats and for ``flint.arb`` balls.
    """
    disc = delta * delta - 4 * d
    if float(disc) < 0:
        if float(disc) < -tol.spectral * max(1.0, float(delta * delta)):
            raise InconsistentInvariantsError(
                f"Delta^2 - 4 d = {float(disc):.3e} < 0: invariants are inconsistent"
            )
    disc = _nonneg(disc)
    root = disc.sqrt() if hasattr(disc, "sqrt") else math.sqrt(disc)
    top = delta + root
    if float(top) <= 0 or float(d) <= 0:
        raise UnphysicalStateError("covariance matrix is not positive definite")
    return 2 * d / top, top / 2


_PARTIAL_T = np.diag([1.0, 1.0, 1.0, -1.0])


def _williamson(sigma, partial_transpose=False):
    # Eigenvalues of the Hermitian sqrt(sigma) i Omega sqrt(sigma) are +-nu and
    # stay accurate when nu_- and nu_+ (nearly) coincide, unlike the
    # square root of Delta^2 - 4 d.
    if partial_transpose:
        sigma = _PARTIAL_T @ sigma @ _PARTIAL_T
    w, v = np.linalg.eigh(sigma)
    if w[0] <= 0.0:
        raise UnphysicalStateError("covariance matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.T
    ev = np.linalg.eigvalsh(1j * root @ OMEGA @ root)
    return float(ev[2]), float(ev[3])


def symplectic_eigenvalues(sigma, tol=TOL):
    """Symplectic eigenvalues ``(nu_minus, nu_plus)`` of a two-mode covariance matrix.

    Moderate matrices use the Hermitian form ``sqrt(sigma) i Omega sqrt(sigma)``,
    whose eigenvalues are ``+-nu``. In the log domain they come from
    ``2 nu^2 = Delta +- sqrt(Delta^2 - 4 d)`` with ``Delta = a + b + 2 c``,
    the smaller one taken as ``d / nu_plus^2`` to avoid cancellation.
    """
    inv = invariants(sigma, tol)
    a, b, c, d, log_s2 = inv.scaled()
    lo, hi = _nu_sq_pair(a + b + 2 * c, d, tol)
    if not inv.log_domain:
        return _williamson(np.asarray(sigma, dtype=float))
    half = 0.5 * log_s2
    return math.exp(0.5 * math.log(lo) + half), math.exp(0.5 * math.log(hi) + half)


def ppt_min_symplectic_eig(sigma, tol=TOL):
    """Smallest symplectic eigenvalue of the partially transposed state.

    Partial transposition flips the sign of ``p_G``. A value ``>= 1``
    certifies separability of a two-mode Gaussian state.
    """
    inv = invariants(sigma, tol)
    a, b, c, d, log_s2 = inv.scaled()
    lo, _ = _nu_sq_pair(a + b - 2 * c, d, tol)
    if not inv.log_domain:
        return _williamson(np.asarray(sigma, dtype=float), partial_transpose=True)[0]
    return math.exp(0.5 * (math.log(lo) + log_s2))


def check_covariance(sigma, tol=TOL):
    """Validate shape, symmetry and the uncertainty principle; return a float array."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise UnphysicalStateError("covariance matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(np.abs(sigma - sigma.T)) > tol.physical * scale:
        raise UnphysicalStateError("covariance matrix is not symmetric")
    # sigma + i Omega >= 0 is the uncertainty principle
    if np.linalg.eigvalsh(sigma + 1j * OMEGA).min() < -tol.physical * scale:
        raise UnphysicalStateError("covariance matrix violates the uncertainty principle")
    return sigma


def two_mode_squeezed(r):
    """Covariance matrix of the two-mode squeezed vacuum with squeezing ``r``."""
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


# --- matrix exponential ----------------------------------------------------

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}


def _pade(a, m):
    b = _PADE[m]
    ident = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    else:
        powers = [ident, a2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ a2)
        u = a @ sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
        v = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
    return np.linalg.solve(v - u, v + u)


def matrix_exponential(m, t=1.0, tol=TOL):
    """``exp(m * t)`` by scaling and squaring with a diagonal Padé core.

    Never diagonalises, so defective generators (exceptional points) are fine.

    Raises:
        PropagationOverflow: if an entry of the result exceeds ``1e290``.
    """
    a = np.asarray(m) * t
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix_exponential needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    a = a.astype(complex if np.iscomplexobj(a) else float)
    norm = np.linalg.norm(a, 1)
    s = 0
    for m_ in (3, 5, 7, 9):
        if norm <= _THETA[m_]:
            out = _pade(a, m_)
            break
    else:
        if norm > _THETA[13]:
            s = int(math.ceil(math.log2(norm / _THETA[13])))
        out = _pade(a / 2.0**s, 13)
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(s):
                out = out @ out
                if not np.all(np.isfinite(out)):
                    break
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > tol.exp_overflow:
        raise PropagationOverflow("matrix exponential overflows (entry > 1e290)")
    return out


# --- Lyapunov --------------------------------------------------------------


def lyapunov_solve(y, q, tol=TOL):
    """Solve ``Y sigma + sigma Y^T = -Q`` for a Hurwitz ``Y``.

    Uses the vectorised ``(Y (x) I + I (x) Y) vec(sigma) = -vec(Q)`` system.

    Raises:
        NoStationarySolution: if some eigenvalue of ``Y`` has real part ``>= -1e-12``.
    """
    y = np.asarray(y, dtype=float)
    q = np.asarray(q, dtype=float)
    n = y.shape[0]
    real_parts = np.sort(np.linalg.eigvals(y).real)[::-1]
    if real_parts[0] >= -tol.hurwitz:
        raise NoStationarySolution(
            f"drift matrix is not Hurwitz (max Re lambda = {real_parts[0]:.6g})", real_parts
        )
    eye = np.eye(n)
    k = np.kron(y, eye) + np.kron(eye, y)
    sigma = np.linalg.solve(k, -q.reshape(-1)).reshape(n, n)
    return 0.5 * (sigma + sigma.T)
