"""Command-line front end: ``hoairy <subcommand> [options]``.

Floating output uses 15 significant digits. Every option can also be given
in a JSON file passed with ``--config`` (keys are option names with dashes
replaced by underscores); explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import acceptance, fredholm, hierarchy_cas as cas
from .hierarchy_cas import AntiderivativeError, RouteMismatchError
from .idpii_solver import DivergenceError, SeedError, seed, solver_grid, step_to
from .mkdv_check import fermi_routes, mkdv_residual_report
from .specfun import QuadratureError, ai_deriv
from .weights import parse_weight

NUMERIC_ERRORS = (QuadratureError, fredholm.KernelAssemblyError, DivergenceError, SeedError,
                  AntiderivativeError, RouteMismatchError, ValueError, FloatingPointError)

IDENTITY_COLUMNS = ["t", "u(t|x_ref)", "Q(t)", "logD_tw", "logD_det", "diff"]
SOLVE_COLUMNS = ["t", "u(t|x_ref)", "Q(t)", "logD_tw"]
TABLE_COLUMNS = ["n", "alpha", "t", "F", "dF/dt"]
DET_COLUMNS = ["n", "t", "lambda", "weight", "det", "logdet", "route"]
MIN_NODES = 16


def fmt(v):
    """15 significant digits; integral values keep a trailing '.0'."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    s = f"{float(v):.15g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _size(s):
    v = int(s)
    if v < MIN_NODES:
        raise argparse.ArgumentTypeError(f"quadrature size must be at least {MIN_NODES}")
    return v


def _lambda(s):
    v = float(s)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("lambda must lie in [0, 1]")
    return v


def _positive(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _weight(s):
    try:
        parse_weight(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return s


def build_parser():
    p = argparse.ArgumentParser(prog="hoairy", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with option defaults")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("ai", help="evaluate Ai_n^(j) at points")
    a.add_argument("--n", type=_positive_int, default=1)
    a.add_argument("--x", type=float, nargs="+", required=True)
    a.add_argument("--deriv", type=int, default=0)

    d = sub.add_parser("det", help="Fredholm determinant D_n(t, lambda)")
    d.add_argument("--n", type=_positive_int, default=1)
    d.add_argument("--t", type=float, nargs="+", required=True)
    d.add_argument("--lambda", dest="lam", type=_lambda, default=1.0)
    d.add_argument("--weight", type=_weight, default="fermi:alpha=1")
    d.add_argument("--route", choices=["halfline", "sigma", "step"], default="halfline")
    d.add_argument("--m-x", type=_size, default=96)
    d.add_argument("--m-z", type=_size, default=320)
    d.add_argument("--format", choices=["value", "csv"], default="value",
                   help="bare determinant per line, or CSV rows " + ",".join(DET_COLUMNS))
    d.add_argument("--workers", type=_positive_int, default=1)

    for name, helptext in (("solve", "integrate the Painleve-II field and tabulate it"),
                           ("identity", "compare the determinant with the field representation")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--n", type=_positive_int, default=1)
        s.add_argument("--lambda", dest="lam", type=_lambda, default=1.0)
        s.add_argument("--weight", type=_weight, default="fermi:alpha=1")
        s.add_argument("--t", type=float, nargs="+", required=True)
        s.add_argument("--x-ref", type=float, default=0.0)
        s.add_argument("--T0", type=float, default=None)
        s.add_argument("--tol", type=_positive, default=1e-10)
        s.add_argument("--m", type=_size, default=160)
        s.add_argument("--output", default="-")

    h = sub.add_parser("hierarchy", help="print a hierarchy member")
    h.add_argument("--kind", choices=["pii", "mkdv"], default="pii")
    h.add_argument("--n", type=_positive_int, default=1)
    h.add_argument("--format", choices=["text", "json", "ode"], default="text")
    h.add_argument("--route", choices=["recursion", "operators"], default="recursion")

    k = sub.add_parser("mkdv-check", help="residual of the mKdV member along the scaling family")
    k.add_argument("--n", type=_positive_int, default=1)
    k.add_argument("--tau", type=_positive, default=1.0)
    k.add_argument("--delta-tau", type=_positive, nargs="+", default=[1e-2, 5e-3])
    k.add_argument("--t1", type=float, default=0.0)
    k.add_argument("--x", type=float, default=0.0)
    k.add_argument("--tol", type=_positive, default=1e-12)

    t = sub.add_parser("table", help="CSV of F_n^alpha(t) on a t-grid")
    t.add_argument("--n", type=_positive_int, default=1)
    t.add_argument("--alpha", type=_positive, nargs="+", default=[1.0])
    t.add_argument("--t-min", type=float, default=-4.0)
    t.add_argument("--t-max", type=float, default=4.0)
    t.add_argument("--points", type=_positive_int, default=17)
    t.add_argument("--workers", type=_positive_int, default=1)
    t.add_argument("--check-frame", action="store_true",
                   help="also evaluate the mKdV-frame route and log the difference")
    t.add_argument("--output", default="-")

    st = sub.add_parser("selftest", help="run the acceptance criteria")
    st.add_argument("--quick", action="store_true", help=f"criteria {acceptance.QUICK} only")
    return p


def _config_tokens(sub, cfg):
    """Turn a config mapping into option tokens for subparser ``sub``."""
    actions = {}
    for a in sub._actions:
        for flag in a.option_strings:
            actions[flag.lstrip("-").replace("-", "_")] = a
        if a.option_strings:
            actions[a.dest] = a
    tokens = []
    for key, value in cfg.items():
        action = actions.get(key)
        if action is None or key == "help":
            raise KeyError(key)
        flag = action.option_strings[-1]
        if action.nargs == 0:
            if value:
                tokens.append(flag)
        elif isinstance(value, list):
            tokens += [flag] + [str(v) for v in value]
        else:
            tokens += [flag, str(value)]
    return tokens


def parse_args(argv):
    """Parse ``argv``; values from ``--config`` go through the same validation as flags."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config: {exc}")
    if not isinstance(cfg, dict):
        parser.error("--config must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        tokens = _config_tokens(sub, cfg)
    except KeyError as exc:
        parser.error(f"unknown config key for {args.command}: {exc.args[0]}")
    k = argv.index(args.command) + 1
    # config first, so explicit flags that follow override it
    return parser.parse_args(argv[:k] + tokens + argv[k:])


def _open(path):
    return sys.stdout if path == "-" else open(path, "w", newline="")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def cmd_ai(args, out):
    vals = ai_deriv(args.n, np.asarray(args.x), args.deriv)
    for x, v in zip(args.x, np.atleast_1d(vals)):
        out.write(f"{fmt(x)} {fmt(v)}\n")


def _det_point(job):
    n, t, lam, weight, route, m_x, m_z = job
    if route == "step":
        disc = fredholm.assemble_step(n, t, lam)
    elif route == "sigma":
        disc = fredholm.assemble_sigma(n, t, lam, parse_weight(weight), m_z=m_z)
    else:
        disc = fredholm.assemble_halfline(n, t, lam, parse_weight(weight), m_x=m_x, m_z=m_z)
    return disc.check().logdet()


def _fan_out(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_det(args, out):
    jobs = [(args.n, t, args.lam, args.weight, args.route, args.m_x, args.m_z) for t in args.t]
    if args.lam == 0:
        res = [(1.0, 0.0)] * len(jobs)
    else:
        res = _fan_out(_det_point, jobs, args.workers)
    if args.format == "value":
        for d, _ in res:
            out.write(fmt(d) + "\n")
        return
    wr = _writer(out)
    wr.writerow(DET_COLUMNS)
    weight = "step" if args.route == "step" else args.weight
    for t, (d, ld) in zip(args.t, res):
        wr.writerow([args.n, fmt(t), fmt(args.lam), weight, fmt(d), fmt(ld), args.route])


def _field_rows(args):
    w = parse_weight(args.weight)
    grid = solver_grid(args.n, w, args.m)
    st = seed(args.n, args.lam, args.T0 if args.T0 is not None else None, grid, (args.x_ref,))
    ts = sorted(set(args.t), reverse=True)
    _, samples = step_to(st, ts[-1], args.tol, t_eval=ts)
    return w, [(t, samples[t]) for t in ts]


def cmd_solve(args, out):
    _, rows = _field_rows(args)
    with _open(args.output) if args.output != "-" else _nullctx(out) as fh:
        wr = _writer(fh)
        wr.writerow(SOLVE_COLUMNS)
        for t, s in sorted(rows):
            wr.writerow([fmt(t), fmt(s["probes"][0]), fmt(s["Q"]), fmt(s["logD"])])


def cmd_identity(args, out):
    w, rows = _field_rows(args)
    with _open(args.output) if args.output != "-" else _nullctx(out) as fh:
        wr = _writer(fh)
        wr.writerow(IDENTITY_COLUMNS)
        for t, s in sorted(rows):
            ld = fredholm.logdet(args.n, t, args.lam, w) if args.lam else 0.0
            wr.writerow([fmt(t), fmt(s["probes"][0]), fmt(s["Q"]), fmt(s["logD"]), fmt(ld),
                         fmt(s["logD"] - ld)])


class UsageError(ValueError):
    """Options that parse individually but do not combine."""


class _nullctx:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        return False


def cmd_hierarchy(args, out):
    if args.kind == "pii":
        member = (cas.pii_member_via_operators(args.n) if args.route == "operators"
                  else cas.pii_member(args.n))
    else:
        if args.route == "operators":
            raise UsageError("the operator route generates Painleve-II members only")
        if args.format == "ode":
            raise UsageError("--format ode applies to Painleve-II members")
        member = cas.mkdv_member(args.n)
    if args.format == "text":
        out.write(cas.render(member) + "\n")
    elif args.format == "ode":
        out.write(cas.render(cas.to_ode(member)) + "\n")
    else:
        out.write(cas.to_json(member) + "\n")


def cmd_mkdv(args, out):
    wr = _writer(out)
    wr.writerow(["n", "tau", "t1", "x", "delta_tau", "residual", "order"])
    prev = None
    for d in args.delta_tau:
        rep = mkdv_residual_report(args.n, args.tau, d, args.t1, args.tol)
        r = abs(rep.at(args.x))
        order = "" if prev is None else fmt(np.log(prev[1] / r) / np.log(prev[0] / d))
        wr.writerow([args.n, fmt(args.tau), fmt(args.t1), fmt(args.x), fmt(d), fmt(r), order])
        prev = (d, r)


def _table_point(job):
    n, alpha, t, check = job
    w = parse_weight(f"fermi:alpha={alpha!r}")
    F = fredholm.det_halfline(n, t, 1.0, w)
    frame = fermi_routes(n, alpha, t)[1] if check else None
    return F, frame


def cmd_table(args, out):
    ts = np.linspace(args.t_min, args.t_max, args.points)
    jobs = [(args.n, a, float(t), args.check_frame) for a in args.alpha for t in ts]
    res = _fan_out(_table_point, jobs, args.workers)
    with _open(args.output) if args.output != "-" else _nullctx(out) as fh:
        wr = _writer(fh)
        cols = TABLE_COLUMNS + (["F_frame", "diff"] if args.check_frame else [])
        wr.writerow(cols)
        for k, a in enumerate(args.alpha):
            F = np.array([r[0] for r in res[k * len(ts):(k + 1) * len(ts)]])
            dF = np.gradient(F, ts) if len(ts) > 1 else np.zeros(1)
            for j, t in enumerate(ts):
                row = [args.n, fmt(a), fmt(t), fmt(F[j]), fmt(dF[j])]
                if args.check_frame:
                    fr = res[k * len(ts) + j][1]
                    row += [fmt(fr), fmt(F[j] - fr)]
                wr.writerow(row)


def cmd_selftest(args, out):
    numbers = acceptance.QUICK if args.quick else None
    results = acceptance.run(numbers, echo=lambda s: (out.write(s + "\n"), out.flush()))
    failed = [r.number for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} criteria passed"
              + (f"; failed: {failed}\n" if failed else "\n"))
    return 1 if failed else 0


COMMANDS = {"ai": cmd_ai, "det": cmd_det, "solve": cmd_solve, "identity": cmd_identity,
            "hierarchy": cmd_hierarchy, "mkdv-check": cmd_mkdv, "table": cmd_table,
            "selftest": cmd_selftest}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        code = COMMANDS[args.command](args, out)
    except UsageError as exc:
        sys.stderr.write(f"hoairy {args.command}: error: {exc}\n")
        return 2
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"hoairy {args.command}: {type(exc).__name__}: {exc}\n")
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
