"""Command-line front end.

Subcommands::

    bregfb solve PROBLEM [--trace OUT.csv] [--max-iter N] [--tol T] [--ref X]
    bregfb prox LEGENDRE PHI [--param NAME=VALUE ...] --gamma G --xi XI
    bregfb lambertw X
    bregfb validate-schedule (PROBLEM | --beta B --gamma G[,G...]) [--eps E] [--eta ...]

Exit codes: 0 success, 1 parse or usage error, 2 inadmissible schedule,
3 domain failure, 4 tolerance not reached.
"""

import argparse
import math
import sys

import numpy as np

from .errors import DomainError, ProblemFileError, ScheduleError
from .legendre import KINDS, ScalarLegendre
from .oracle import Box, grid_refine_minimize, prox_residual
from .phi import make_phi, parse_phi
from .problem_file import load_problem
from .prox import prox_scalar
from .scalar import lambert_w0
from .solver import StepSchedule, StopReason, solve, validate_schedule

__all__ = ["main", "EXIT_OK", "EXIT_PARSE", "EXIT_SCHEDULE", "EXIT_DOMAIN", "EXIT_MAXITER"]

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SCHEDULE = 2
EXIT_DOMAIN = 3
EXIT_MAXITER = 4

PROX_RESIDUAL_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is the schedule code here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _vector(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _fmt_vec(x):
    return "[" + ", ".join(format(float(v), ".17g") for v in np.atleast_1d(x)) + "]"


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _print_violations(violations):
    # a constant schedule repeats the same failure at every n; fold such runs
    print(f"schedule rejected: {len(violations)} violation(s)")
    i = 0
    while i < len(violations):
        v = violations[i]
        j = i
        while (j + 1 < len(violations) and v.index is not None
               and violations[j + 1].index == violations[j].index + 1
               and (violations[j + 1].inequality, violations[j + 1].lhs,
                    violations[j + 1].rhs) == (v.inequality, v.lhs, v.rhs)):
            j += 1
        if j == i:
            print(f"  {v}")
        else:
            print(f"  n={v.index}..{violations[j].index}: {v.inequality} fails "
                  f"({v.lhs!r} vs {v.rhs!r})")
        i = j + 1


def cmd_solve(args):
    try:
        spec = load_problem(args.problem)
    except ProblemFileError as exc:
        _err(exc)
        return EXIT_PARSE
    max_iter = args.max_iter if args.max_iter is not None else spec.max_iter
    tol = args.tol if args.tol is not None else spec.tol
    x_ref = None
    if args.ref is not None:
        x_ref = args.ref * spec.problem.dim if len(args.ref) == 1 else args.ref
        if len(x_ref) != spec.problem.dim:
            _err(f"--ref needs 1 or {spec.problem.dim} entries")
            return EXIT_PARSE
    violations = validate_schedule(spec.schedule, max(1, max_iter))
    if violations:
        _print_violations(violations)
        return EXIT_SCHEDULE
    try:
        report, trace = solve(spec.problem, spec.schedule, spec.x0, tol=tol,
                              max_iter=max_iter, x_ref=x_ref)
    except ScheduleError as exc:
        _print_violations(exc.violations)
        return EXIT_SCHEDULE
    except DomainError as exc:
        _err(f"domain failure: {exc}")
        return EXIT_DOMAIN
    if args.trace:
        trace.to_csv(args.trace, blocks=args.blocks)
    print(f"x = {_fmt_vec(report.x)}")
    print(f"objective = {report.objective!r}")
    print(f"iterations = {report.iterations}")
    print(f"stop = {report.stop_reason.value} ({report.message})")
    return {StopReason.TOLERANCE: EXIT_OK, StopReason.MAX_ITER: EXIT_MAXITER,
            StopReason.DOMAIN_FAILURE: EXIT_DOMAIN}[report.stop_reason]


def _phi_from_args(kind, params):
    if "(" in kind:
        if params:
            raise ValueError("give parameters either inline or with --param, not both")
        return parse_phi(kind)
    kw = {}
    for item in params:
        if "=" not in item:
            raise ValueError(f"--param expects NAME=VALUE, got {item!r}")
        name, val = item.split("=", 1)
        kw[name.strip()] = float(val)
    return make_phi(kind.strip(), **kw)


def cmd_prox(args):
    try:
        if args.legendre not in KINDS:
            raise ValueError(f"unknown Legendre kind {args.legendre!r}; "
                             f"expected one of {', '.join(KINDS)}")
        phi = _phi_from_args(args.phi, args.param)
        theta = ScalarLegendre(args.legendre)
    except ValueError as exc:
        _err(exc)
        return EXIT_PARSE
    try:
        eta = prox_scalar(theta, phi, args.gamma, args.xi)
        res = prox_residual(theta, phi, args.gamma, args.xi, eta)
    except DomainError as exc:
        _err(f"domain failure: {exc}")
        return EXIT_DOMAIN
    print(f"eta = {eta!r}")
    print(f"residual = {res:.3e}")
    return EXIT_OK if res <= PROX_RESIDUAL_TOL else EXIT_MAXITER


def cmd_lambertw(args):
    try:
        w = lambert_w0(args.x)
    except DomainError as exc:
        _err(f"domain failure: {exc}")
        return EXIT_DOMAIN
    print(f"W = {w!r}")
    print(f"residual = {abs(w * math.exp(w) - args.x):.3e}")
    return EXIT_OK


def cmd_validate_schedule(args):
    if args.problem is not None:
        try:
            spec = load_problem(args.problem)
        except ProblemFileError as exc:
            _err(exc)
            return EXIT_PARSE
        s = spec.schedule
        horizon = args.horizon or spec.max_iter
    else:
        if args.beta is None or args.gamma is None:
            _err("give a problem file or both --beta and --gamma")
            return EXIT_PARSE
        g = args.gamma[0] if len(args.gamma) == 1 else args.gamma
        s = StepSchedule(gammas=g, beta=args.beta,
                         eps=0.05 if args.eps is None else args.eps, etas=args.eta)
        if args.mu is not None:
            s.mus = args.mu[0] if len(args.mu) == 1 else args.mu
            s.alpha = args.alpha
        horizon = args.horizon or max(1, len(args.gamma))
    violations = validate_schedule(s, horizon)
    if violations:
        _print_violations(violations)
        return EXIT_SCHEDULE
    print(f"schedule admissible over {horizon} step(s) "
          f"(beta={s.beta!r}, eps={s.eps!r}, gamma_0={s.gamma(0)!r})")
    return EXIT_OK


def cmd_oracle(args):
    try:
        spec = load_problem(args.problem)
    except ProblemFileError as exc:
        _err(exc)
        return EXIT_PARSE
    dim = spec.problem.dim
    lo = args.lo * dim if len(args.lo) == 1 else args.lo
    hi = args.hi * dim if len(args.hi) == 1 else args.hi
    try:
        box = Box(tuple(lo), tuple(hi))
        if box.dim != dim:
            raise ValueError(f"box has dimension {box.dim}, problem has {dim}")
        x, v = grid_refine_minimize(spec.problem.objective, box, levels=args.levels,
                                    points_per_axis=args.points)
    except DomainError as exc:
        _err(f"domain failure: {exc}")
        return EXIT_DOMAIN
    except ValueError as exc:
        _err(exc)
        return EXIT_PARSE
    print(f"x = {_fmt_vec(x)}")
    print(f"objective = {v!r}")
    return EXIT_OK


def build_parser():
    ap = _Parser(prog="bregfb", description="Bregman forward-backward splitting tools.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser,
                            metavar="{solve,prox,lambertw,validate-schedule}")

    sp = sub.add_parser("solve", help="run the solver on a problem file")
    sp.add_argument("problem")
    sp.add_argument("--trace", metavar="OUT.csv", help="write the iterate trace here")
    sp.add_argument("--blocks", action="store_true",
                    help="add one x_i column per block to the trace")
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--ref", type=_vector, metavar="X",
                    help="reference point for the bregman_ref column")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("prox", help="evaluate one scalar Bregman prox")
    sp.add_argument("legendre", help=", ".join(KINDS))
    sp.add_argument("phi", help="phi kind, optionally with inline parameters")
    sp.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--xi", type=float, required=True)
    sp.set_defaults(func=cmd_prox)

    sp = sub.add_parser("lambertw", help="principal branch of the Lambert W function")
    sp.add_argument("x", type=float)
    sp.set_defaults(func=cmd_lambertw)

    sp = sub.add_parser("validate-schedule", help="check step-size admissibility")
    sp.add_argument("problem", nargs="?")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--gamma", type=_vector)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--eta", type=_vector)
    sp.add_argument("--mu", type=_vector)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--horizon", type=int)
    sp.set_defaults(func=cmd_validate_schedule)

    sp = sub.add_parser("oracle")  # hidden: no help entry
    sp.add_argument("problem")
    sp.add_argument("--lo", type=_vector, required=True)
    sp.add_argument("--hi", type=_vector, required=True)
    sp.add_argument("--levels", type=int, default=20)
    sp.add_argument("--points", type=int, default=11)
    sp.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
