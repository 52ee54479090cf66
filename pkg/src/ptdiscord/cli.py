"""Command-line front end: ``ptdiscord {evolve,steady,scan,profile}``.

Rates are given in the same units as ``--g`` (so in units of ``g`` when it is
omitted), times in units of ``1/g`` and entropies in nats. Floats are
written with ``%.12e`` so identical runs give byte-identical files.

Exit codes: 0 ok, 2 usage error, 3 run truncated by the overflow guard,
4 no stationary solution.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .core import NoStationarySolution, PropagationOverflow
from .correlations import correlation_report
from .dynamics import (
    Channel,
    SystemParams,
    propagate_covariance,
    propagate_mean_field,
    stationary_covariance,
)
from .sweep import GridSpec, correlation_series, phase_scan, pt_line_profile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_OVERFLOW = 3
EXIT_NO_STATIONARY = 4

UNITS = "# time in 1/g, entropies in nats"
FMT = "%.12e"
SERIES_COLUMNS = ("t", "D_GL", "D_LG", "I", "C_GL", "C_LG", "ppt_nu_min",
                  "mean_x_L", "mean_p_L", "mean_x_G", "mean_p_G")


def _fmt(x):
    return FMT % (x + 0.0)  # no "-0"


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _pos_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _resolution(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"resolution must be >= 2, got {text}")
    return v


def _add_system(p):
    p.add_argument("--g", type=_pos_float, default=1.0, help="coupling (sets the unit)")
    p.add_argument("--gamma-gain", type=_nonneg_float, default=0.0,
                   help="rate on mode G")
    p.add_argument("--gamma-loss", type=_nonneg_float, default=0.0,
                   help="rate on mode L")
    p.add_argument("--kind-l", choices=[c.value for c in Channel], default="loss",
                   help="channel acting on mode L")
    p.add_argument("--kind-g", choices=[c.value for c in Channel], default="gain",
                   help="channel acting on mode G")


def _add_asymptotics(p):
    p.add_argument("--t-max", type=_pos_float, default=200.0,
                   help="dense-sampling horizon in 1/g")
    p.add_argument("--floor", type=_pos_float, default=1e-4, help="discord floor")
    p.add_argument("--drift-tol", type=_pos_float, default=1e-6,
                   help="windowed drift tolerance")
    p.add_argument("--window", type=_pos_float, default=5.0, help="window length in 1/g")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default $PTDISCORD_THREADS or CPU count)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ptdiscord",
        description="Quantum correlations of a gain/loss oscillator pair.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="correlation time series as CSV")
    _add_system(ev)
    ev.add_argument("--alpha-l", type=complex, default=0j, help="initial <a_L>")
    ev.add_argument("--alpha-g", type=complex, default=0j, help="initial <a_G>")
    ev.add_argument("--t-max", type=_pos_float, default=40.0, help="duration in 1/g")
    ev.add_argument("--stride", type=_pos_float, default=0.05, help="sampling stride in 1/g")
    ev.add_argument("--method", choices=["exact", "rk4"], default="exact",
                    help="exact propagator in extended precision, or double-precision RK4")
    ev.add_argument("--dt", type=_pos_float, default=1e-3, help="RK4 step in 1/g")
    ev.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")

    st = sub.add_parser("steady", help="stationary covariance and correlations")
    _add_system(st)
    st.add_argument("--format", choices=["text", "json"], default="text")
    st.add_argument("-o", "--output", default="-")

    sc = sub.add_parser("scan", help="asymptotic discord over the (gamma_gain, gamma_loss) plane")
    sc.add_argument("--g", type=_pos_float, default=1.0)
    sc.add_argument("--n", type=_resolution, default=30, help="grid points per axis")
    sc.add_argument("--gamma-max", type=_pos_float, default=3.0, help="axis range in units of g")
    sc.add_argument("--format", choices=["json", "csv"], default="json")
    sc.add_argument("-o", "--output", default="-")
    _add_asymptotics(sc)

    pr = sub.add_parser("profile", help="asymptotic discord along gamma_gain = gamma_loss")
    pr.add_argument("--g", type=_pos_float, default=1.0)
    pr.add_argument("--gammas", type=_pos_float, nargs="+", default=None,
                    help="explicit rates in units of g")
    pr.add_argument("--n", type=_resolution, default=30)
    pr.add_argument("--gamma-max", type=_pos_float, default=3.0)
    pr.add_argument("-o", "--output", default="-")
    _add_asymptotics(pr)
    return parser


def _params(args):
    return SystemParams(g=args.g, rate_L=args.gamma_loss, rate_G=args.gamma_gain,
                        kind_L=args.kind_l, kind_G=args.kind_g)


def _asymptotics_kwargs(args):
    return {"floor": args.floor, "drift_tol": args.drift_tol,
            "window": args.window, "t_max": args.t_max}


class _Output:
    """stdout or a file that is kept (not truncated) if the run stops early."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path == "-":
            self.fh = sys.stdout
        else:
            self.fh = open(self.path, "w", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()
        else:
            self.fh.flush()
        return False


def _series_rows_rk4(p, args):
    sigma = np.eye(4)
    psi0 = np.array([args.alpha_l, args.alpha_g])
    n = int(round(args.t_max / args.stride))
    for k in range(n + 1):
        if k:
            sigma = propagate_covariance(sigma, p, args.stride / p.g, method="rk4", dt=args.dt)
        quad = propagate_mean_field(psi0, p, k * args.stride / p.g).quadratures()
        yield k * args.stride, correlation_report(sigma, k * args.stride), quad


def cmd_evolve(args):
    p = _params(args)
    if args.method == "rk4":
        rows = _series_rows_rk4(p, args)
    else:
        rows = correlation_series(p, args.t_max, args.stride,
                                  psi0=np.array([args.alpha_l, args.alpha_g]))
    code = EXIT_OK
    with _Output(args.output) as fh:
        fh.write(UNITS + "\n")
        fh.write(f"# g={_fmt(p.g)} gamma_gain={_fmt(p.rate_G)} gamma_loss={_fmt(p.rate_L)}"
                 f" kind_L={p.kind_L.value} kind_G={p.kind_G.value} method={args.method}\n")
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        try:
            for t, rep, quad in rows:
                vals = (t, rep.discord_GL, rep.discord_LG, rep.mutual_information,
                        rep.classical_GL, rep.classical_LG, rep.ppt_nu_min, *quad)
                fh.write(",".join(_fmt(v) for v in vals) + "\n")
        except PropagationOverflow as exc:
            fh.write(f"# truncated: {exc}\n")
            code = EXIT_OVERFLOW
    if code == EXIT_OVERFLOW:
        print("ptdiscord: run truncated by the overflow guard", file=sys.stderr)
    return code


def _report_dict(rep):
    return {
        "mutual_information": rep.mutual_information,
        "discord_GL": rep.discord_GL,
        "discord_LG": rep.discord_LG,
        "classical_GL": rep.classical_GL,
        "classical_LG": rep.classical_LG,
        "ppt_nu_min": rep.ppt_nu_min,
    }


def cmd_steady(args):
    p = _params(args)
    try:
        sigma = stationary_covariance(p)
    except NoStationarySolution as exc:
        parts = " ".join(_fmt(v) for v in exc.real_parts)
        print("no stationary solution: drift matrix is not Hurwitz", file=sys.stderr)
        print(f"Re lambda(Y) = {parts}", file=sys.stderr)
        return EXIT_NO_STATIONARY
    rep = correlation_report(sigma)
    with _Output(args.output) as fh:
        if args.format == "json":
            doc = {"units": UNITS[2:], "sigma": sigma.tolist(), "report": _report_dict(rep),
                   "version": __version__}
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            fh.write(UNITS + "\n")
            fh.write("# stationary covariance, order (x_L, p_L, x_G, p_G)\n")
            for row in sigma:
                fh.write(" ".join(_fmt(v) for v in row) + "\n")
            for key, val in _report_dict(rep).items():
                fh.write(f"{key} {_fmt(val)}\n")
    return EXIT_OK


SCAN_COLUMNS = ("gamma_gain", "gamma_loss", "classification", "discord_GL_inf",
                "discord_LG_inf", "stable", "pt_class")


def _scan_csv(tab):
    buf = io.StringIO()
    buf.write("# rates in units of g, entropies in nats\n")
    buf.write(f"# grid n={tab.grid.n} gamma_max={_fmt(tab.grid.gamma_max)} g={_fmt(tab.grid.g)}"
              f" version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for c in tab.cells():
        w.writerow([_fmt(c["gamma_gain"]), _fmt(c["gamma_loss"]), c["classification"],
                    _fmt(c["discord_GL_inf"]), _fmt(c["discord_LG_inf"]),
                    int(c["stable"]), c["pt_class"]])
    return buf.getvalue()


def cmd_scan(args):
    grid = GridSpec(gamma_max=args.gamma_max, n=args.n, g=args.g)
    tab = phase_scan(grid, workers=args.workers, **_asymptotics_kwargs(args))
    with _Output(args.output) as fh:
        fh.write(tab.to_json() + "\n" if args.format == "json" else _scan_csv(tab))
    return EXIT_OK


def cmd_profile(args):
    gammas = args.gammas if args.gammas else GridSpec(args.gamma_max, args.n).values
    prof = pt_line_profile(gammas, args.g, **_asymptotics_kwargs(args))
    with _Output(args.output) as fh:
        fh.write("# rates in units of g, entropies in nats\n")
        fh.write("gamma,D_GL_inf,D_LG_inf\n")
        for row in prof:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return EXIT_OK


COMMANDS = {"evolve": cmd_evolve, "steady": cmd_steady, "scan": cmd_scan, "profile": cmd_profile}


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"ptdiscord: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
