"""Long-time asymptotics, phase scans over (gain, loss) and threshold curves.

All times and rates taken or returned here are in units of ``g`` (times in
``1/g``), so that tables computed at different couplings line up.
"""

import json
import math
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from . import __version__
from .core import TOL, PropagationOverflow, matrix_exponential
from .dynamics import (
    MeanField,
    SystemParams,
    mean_field_generator,
    mean_field_spectrum,
    stability_class,
)
from .precise import DEFAULT_PREC, PreciseTrajectory

__all__ = [
    "Classification",
    "AsymptoticsResult",
    "GridSpec",
    "PhaseScanTable",
    "SCHEMA_VERSION",
    "asymptotic_correlations",
    "threshold_curve",
    "phase_scan",
    "pt_line_profile",
    "correlation_series",
]

SCHEMA_VERSION = 1


class Classification(Enum):
    DECAYED = "decayed"
    SATURATED = "saturated"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class AsymptoticsResult:
    """Long-time fate of the discord starting from coherent states.

    ``horizon_used`` is the last simulated time and ``mutual_info_slope`` the
    growth rate of the mutual information over the final window (both in
    units of ``1/g``). The slope is reported as 0 when the mutual information
    moved by less than ``drift_tol`` over the window.
    """

    classification: Classification
    discord_GL_inf: float
    discord_LG_inf: float
    horizon_used: float
    mutual_info_slope: float
    reason: str = ""


def threshold_curve(gamma_gain, g=1.0):
    """Smallest loss rate with finite stationary discord at gain ``gamma_gain``.

    ``gamma_gain`` below the exceptional point, ``g**2 / gamma_gain`` above it.
    """
    if not gamma_gain > 0:
        raise ValueError("threshold curve is defined for gamma_gain > 0")
    return gamma_gain if gamma_gain <= g else g * g / gamma_gain


# --- asymptotics -------------------------------------------------------------


def _max_dev(values, ref):
    return max(abs(v - ref) for v in values)


class _Window:
    """Trailing samples of ``(t, D_GL, D_LG, I)``."""

    def __init__(self, n_win):
        self.n_win = n_win
        self.buf = deque(maxlen=2 * n_win + 1)

    def push(self, t, rep):
        self.buf.append((t, rep.discord_GL, rep.discord_LG, rep.mutual_information))

    def full(self, spans=1):
        return len(self.buf) >= spans * self.n_win + 1

    def last(self, k=None):
        rows = list(self.buf)[-(self.n_win + 1):]
        return rows if k is None else [r[k] for r in rows]

    def previous(self, k):
        rows = list(self.buf)
        return [r[k] for r in rows[-(2 * self.n_win + 1):-self.n_win]]


def _decayed(win, floor):
    for k in (1, 2):
        vals = win.last(k)
        if max(vals) >= floor or vals[-1] > vals[0]:
            return False
    return True


def _drifts(win):
    return [_max_dev(win.last(k), win.last(k)[-1]) for k in (1, 2)]


def _converged(win, floor, drift_tol):
    """Window drift below tolerance and a geometric tail estimate below it too."""
    now = win.last()[-1]
    if min(now[1], now[2]) <= floor:
        return False
    drifts = _drifts(win)
    if max(drifts) >= drift_tol:
        return False
    if not win.full(2):
        return False
    for k, drift in zip((1, 2), drifts):
        prev = win.previous(k)
        drift0 = _max_dev(prev, prev[-1])
        if drift0 == 0.0 or drift == 0.0:
            continue
        q = drift / drift0
        if q >= 1.0 or drift * q / (1.0 - q) >= drift_tol:
            return False
    return True


def _result(cls, win, g, window, drift_tol, reason=""):
    t, d_gl, d_lg, mi = win.last()[-1]
    t0, *_, mi0 = win.last()[0]
    span = (t - t0) * g
    slope = (mi - mi0) / span if span > 0 else 0.0
    if abs(slope) < drift_tol / window:
        slope = 0.0
    return AsymptoticsResult(cls, d_gl, d_lg, t * g, slope, reason)


def asymptotic_correlations(p, floor=1e-4, drift_tol=1e-6, window=5.0, t_max=200.0,
                            stride=0.25, tail_horizon=1e5, max_log10_guard=1000.0,
                            prec=DEFAULT_PREC, tol=TOL):
    """Integrate from the vacuum covariance until both discords settle.

    The trajectory is sampled every ``stride`` up to ``t_max``. A sample is
    *Decayed* when both discords stayed below ``floor`` over the trailing
    ``window`` without increasing, and *Saturated* when both exceed ``floor``,
    their largest change over the trailing window is below ``drift_tol`` and
    the geometric extrapolation of the remaining change is below it as well.

    Discord decays only algebraically (roughly ``1/t``) in the PT-exact
    phase and at the exceptional point, so an undecided trajectory continues
    on a doubling schedule ``t_max * 2**k`` up to ``tail_horizon``, examining
    one window at each stop. Saturation there additionally requires the
    discords to have moved less than ``drift_tol`` since the previous stop.

    The covariance guard starts at ``1e100``; each crossing cubes it and
    raises the working precision to match, up to ``10**max_log10_guard``.
    Hitting the final guard, losing certified precision, or running out of
    horizon gives *Undetermined*.
    """
    g = p.g
    n_win = max(1, int(round(window / stride)))
    traj = PreciseTrajectory(p, stride / g, prec=prec, max_log10_guard=max_log10_guard)
    win = _Window(n_win)
    win.push(0.0, traj.report(tol))
    n_dense = int(round(t_max / stride))

    def sample():
        rep = traj.report(tol)
        if rep.error_bound > 0.01 * drift_tol:
            raise _PrecisionLost(rep.error_bound)
        win.push(traj.time, rep)

    try:
        for _ in range(n_dense):
            traj.advance()
            sample()
            if not win.full():
                continue
            if traj.time * g >= 2 * window and _decayed(win, floor):
                return _result(Classification.DECAYED, win, g, window, drift_tol)
            if _converged(win, floor, drift_tol):
                return _result(Classification.SATURATED, win, g, window, drift_tol)

        stop = n_dense
        previous = win.last()[-1]
        while stop * stride < tail_horizon:
            stop = min(2 * stop, int(round(tail_horizon / stride)))
            traj.jump(stop - n_win - traj.n_steps)
            win = _Window(n_win)
            win.push(traj.time, traj.report(tol))
            for _ in range(n_win):
                traj.advance()
                sample()
            if _decayed(win, floor):
                return _result(Classification.DECAYED, win, g, window, drift_tol)
            now = win.last()[-1]
            moved = max(abs(now[1] - previous[1]), abs(now[2] - previous[2]))
            if min(now[1], now[2]) > floor and max(_drifts(win)) < drift_tol and moved < drift_tol:
                return _result(Classification.SATURATED, win, g, window, drift_tol)
            previous = now
    except PropagationOverflow:
        return _result(Classification.UNDETERMINED, win, g, window, drift_tol, "overflow guard")
    except _PrecisionLost as exc:
        return _result(Classification.UNDETERMINED, win, g, window, drift_tol,
                       f"precision lost (error bound {exc.args[0]:.1e})")
    return _result(Classification.UNDETERMINED, win, g, window, drift_tol, "horizon exhausted")


class _PrecisionLost(Exception):
    pass


# --- phase scan --------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Square grid ``gamma_max * k / n`` (``k = 1..n``) on both axes, in units of ``g``."""

    gamma_max: float = 3.0
    n: int = 30
    g: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid resolution must be >= 2")
        if not self.gamma_max > 0:
            raise ValueError("gamma_max must be positive")

    @property
    def values(self):
        return self.gamma_max * np.arange(1, self.n + 1) / self.n


@dataclass
class PhaseScanTable:
    """Per-cell asymptotics on a ``(gamma_gain, gamma_loss)`` grid.

    Arrays are indexed ``[i_gain, j_loss]``; rates are in units of ``g``.
    """

    grid: GridSpec
    gamma_gain: np.ndarray
    gamma_loss: np.ndarray
    classification: np.ndarray
    discord_GL_inf: np.ndarray
    discord_LG_inf: np.ndarray
    stable: np.ndarray
    pt_class: np.ndarray
    settings: dict = field(default_factory=dict)

    def cells(self):
        for i, gg in enumerate(self.gamma_gain):
            for j, gl in enumerate(self.gamma_loss):
                yield {
                    "gamma_gain": float(gg),
                    "gamma_loss": float(gl),
                    "classification": str(self.classification[i, j]),
                    "discord_GL_inf": float(self.discord_GL_inf[i, j]),
                    "discord_LG_inf": float(self.discord_LG_inf[i, j]),
                    "stable": bool(self.stable[i, j]),
                    "pt_class": str(self.pt_class[i, j]),
                }

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "metadata": {
                "grid": asdict(self.grid),
                "settings": self.settings,
                "tolerances": asdict(TOL),
                "version": __version__,
                "units": "rates in g, times in 1/g, entropies in nats",
            },
            "cells": list(self.cells()),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        meta = data["metadata"]
        grid = GridSpec(**meta["grid"])
        cells = data["cells"]
        gains = sorted({c["gamma_gain"] for c in cells})
        losses = sorted({c["gamma_loss"] for c in cells})
        shape = (len(gains), len(losses))
        if len(cells) != shape[0] * shape[1]:
            raise ValueError("scan table is not rectangular")
        tab = _empty_table(grid, np.array(gains), np.array(losses), meta.get("settings", {}))
        gi = {v: i for i, v in enumerate(gains)}
        li = {v: j for j, v in enumerate(losses)}
        for c in cells:
            i, j = gi[c["gamma_gain"]], li[c["gamma_loss"]]
            tab.classification[i, j] = c["classification"]
            tab.discord_GL_inf[i, j] = c["discord_GL_inf"]
            tab.discord_LG_inf[i, j] = c["discord_LG_inf"]
            tab.stable[i, j] = c["stable"]
            tab.pt_class[i, j] = c["pt_class"]
        return tab

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, PhaseScanTable):
            return NotImplemented
        arrays = ("gamma_gain", "gamma_loss", "classification", "discord_GL_inf",
                  "discord_LG_inf", "stable", "pt_class")
        return (self.grid == other.grid and self.settings == other.settings
                and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays))


def _empty_table(grid, gains, losses, settings):
    shape = (len(gains), len(losses))
    return PhaseScanTable(
        grid=grid,
        gamma_gain=gains,
        gamma_loss=losses,
        classification=np.full(shape, "", dtype=object),
        discord_GL_inf=np.zeros(shape),
        discord_LG_inf=np.zeros(shape),
        stable=np.zeros(shape, dtype=bool),
        pt_class=np.full(shape, "", dtype=object),
        settings=dict(settings),
    )


def _scan_cell(args):
    gg, gl, g, kwargs = args
    p = SystemParams.gain_loss(gg * g, gl * g, g=g)
    res = asymptotic_correlations(p, **kwargs)
    return (res.classification.value, res.discord_GL_inf, res.discord_LG_inf,
            stability_class(p).fully_stable, mean_field_spectrum(p)[1].value)


def _workers(workers):
    if workers is None:
        env = os.environ.get("PTDISCORD_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def phase_scan(grid, workers=None, gains=None, losses=None, **asymptotics_kwargs):
    """Asymptotic discord, stability and PT class on a ``(gamma_gain, gamma_loss)`` grid.

    Args:
        grid: :class:`GridSpec` (or ``(gamma_max, n)``).
        workers: process count; defaults to ``$PTDISCORD_THREADS`` or the CPU count.
        gains, losses: optional explicit axis values (units of ``g``) overriding
            the grid axes, e.g. for a single row.
        **asymptotics_kwargs: forwarded to :func:`asymptotic_correlations`.

    Cells are independent; the table is filled in grid order whatever the
    scheduling, so the output is deterministic.
    """
    if not isinstance(grid, GridSpec):
        grid = GridSpec(*grid)
    gains = grid.values if gains is None else np.asarray(gains, dtype=float)
    losses = grid.values if losses is None else np.asarray(losses, dtype=float)
    tab = _empty_table(grid, gains, losses, asymptotics_kwargs)
    jobs = [(float(gg), float(gl), grid.g, asymptotics_kwargs) for gg in gains for gl in losses]
    n = _workers(workers)
    if n == 1:
        results = list(map(_scan_cell, jobs))
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_scan_cell, jobs, chunksize=8))
    for k, (cls, d_gl, d_lg, stable, pt) in enumerate(results):
        i, j = divmod(k, len(losses))
        tab.classification[i, j] = cls
        tab.discord_GL_inf[i, j] = d_gl
        tab.discord_LG_inf[i, j] = d_lg
        tab.stable[i, j] = stable
        tab.pt_class[i, j] = pt
    return tab


def pt_line_profile(gammas, g=1.0, **asymptotics_kwargs):
    """Asymptotic discords along the PT line ``gamma_gain = gamma_loss = gamma``.

    Returns an ``(n, 3)`` array of ``(gamma, D_GL_inf, D_LG_inf)``, with
    ``gamma`` in units of ``g``.
    """
    rows = []
    for gamma in gammas:
        if not gamma > 0:
            raise ValueError("gamma values must be positive")
        res = asymptotic_correlations(SystemParams.gain_loss(gamma * g, gamma * g, g=g),
                                      **asymptotics_kwargs)
        rows.append((gamma, res.discord_GL_inf, res.discord_LG_inf))
    return np.array(rows, dtype=float)


# --- time series -------------------------------------------------------------


def correlation_series(p, t_max, stride=0.05, psi0=None, prec=DEFAULT_PREC, tol=TOL):
    """Yield ``(t, CorrelationReport, mean_quadratures)`` every ``stride`` up to ``t_max``.

    Times are in units of ``1/g``. The covariance starts at the identity
    (any coherent state); the mean field starts at ``psi0`` (vacuum by
    default). Raises :class:`~ptdiscord.core.PropagationOverflow` after the
    last good sample if the covariance or mean field leaves the guarded range.
    """
    psi = (psi0 if isinstance(psi0, MeanField) else MeanField(np.zeros(2) if psi0 is None else psi0)).psi
    h = stride / p.g
    step = matrix_exponential(-1j * mean_field_generator(p), h)
    traj = PreciseTrajectory(p, h, prec=prec)
    n = int(round(t_max / stride))
    for k in range(n + 1):
        if k:
            traj.advance()
            psi = step @ psi
            if np.max(np.abs(psi)) > 1e150:
                raise PropagationOverflow("mean-field amplitude exceeds 1e150")
        rep = traj.report(tol)
        yield k * stride, rep, MeanField(psi).quadratures()

