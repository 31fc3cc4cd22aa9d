"""Reader for the INI-style problem files consumed by the command line.

A file has up to four sections::

    [problem]
    kind = kl_regression        ; composite | is_regression | kl_regression
    m = 1
    p = 1
    omega = 2                   ; p*m numbers, row-major
    rho = 6
    ; composite only:
    ; psi = boltzmann_shannon   ; Legendre kind generating the data term
    ; beta = 0.5

    [phi]
    spec = zero                 ; ';'-separated, one per block or one for all

    [legendre]
    kinds = boltzmann_shannon   ; composite only, one per block or one for all

    [solver]
    gamma = 0.25                ; constant or comma-separated list
    eps = 0.05
    eta = 0, 0                  ; optional comma-separated list
    mu = 1, 1                   ; optional, selects the scaled family
    alpha = 1                   ; lower bound for mu
    max_iter = 1000
    tol = 1e-10
    x0 = 1                      ; required, one per block or one for all

Numbers are parsed with :func:`float`, which ignores the locale.
"""

import configparser
import re
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ProblemFileError
from .legendre import KINDS, LegendreFunction
from .multiblock import MultiBlockProblem, build_is_regression, build_kl_regression, flatten
from .phi import parse_phi_list
from .solver import BregmanFidelity, CompositeProblem, StepSchedule

__all__ = ["ProblemSpec", "load_problem", "parse_problem"]

PROBLEM_KINDS = ("composite", "is_regression", "kl_regression")


@dataclass
class ProblemSpec:
    """Everything a problem file describes."""

    kind: str
    problem: CompositeProblem
    schedule: StepSchedule
    x0: np.ndarray
    max_iter: int
    tol: float
    multiblock: MultiBlockProblem = None


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            self.cp.read_string(text)
        except configparser.Error as exc:
            raise ProblemFileError(str(exc).replace("\n", " "),
                                   line=getattr(exc, "lineno", None)) from None

    def line_of(self, section, key=None):
        sec_re = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]")
        key_re = re.compile(r"^\s*" + re.escape(key) + r"\s*[=:]", re.I) if key else None
        inside = False
        for i, ln in enumerate(self.lines, 1):
            if ln.lstrip().startswith("["):
                inside = bool(sec_re.match(ln))
                if inside and key_re is None:
                    return i
                continue
            if inside and key_re is not None and key_re.match(ln):
                return i
        return None

    def fail(self, msg, section, key=None):
        raise ProblemFileError(msg, section, key, self.line_of(section, key))

    def raw(self, section, key, default=None, required=False):
        if not self.cp.has_section(section):
            if required:
                raise ProblemFileError("missing section", section)
            return default
        if not self.cp.has_option(section, key):
            if required:
                self.fail("missing key", section, key)
            return default
        return self.cp.get(section, key).strip()

    def floats(self, section, key, default=None, required=False):
        v = self.raw(section, key, required=required)
        if v is None:
            return default
        try:
            return [float(t) for t in re.split(r"[,\s]+", v) if t]
        except ValueError:
            self.fail(f"expected numbers, got {v!r}", section, key)

    def number(self, section, key, default=None, required=False):
        vals = self.floats(section, key, required=required)
        if vals is None:
            return default
        if len(vals) != 1:
            self.fail("expected a single number", section, key)
        return vals[0]

    def count(self, section, key, default=None, required=False):
        v = self.number(section, key, required=required)
        if v is None:
            return default
        if v != int(v) or v < 1:
            self.fail(f"expected a positive integer, got {v!r}", section, key)
        return int(v)


def parse_problem(text):
    """Parse problem-file text into a :class:`ProblemSpec`.

    Raises
    ------
    ProblemFileError
        With section, key and line number where possible.
    """
    r = _Reader(text)
    kind = r.raw("problem", "kind", required=True)
    if kind not in PROBLEM_KINDS:
        r.fail(f"unknown kind {kind!r}; expected one of {', '.join(PROBLEM_KINDS)}",
               "problem", "kind")
    m = r.count("problem", "m", required=True)
    p = r.count("problem", "p", required=True)
    omega = r.floats("problem", "omega", required=True)
    if len(omega) != m * p:
        r.fail(f"expected {m * p} entries (p*m), got {len(omega)}", "problem", "omega")
    omega = np.array(omega).reshape(p, m)
    rho = r.floats("problem", "rho", required=True)
    if len(rho) != p:
        r.fail(f"expected {p} entries, got {len(rho)}", "problem", "rho")

    spec = r.raw("phi", "spec", default="zero")
    try:
        phis = parse_phi_list(spec, m)
    except ValueError as exc:
        r.fail(str(exc), "phi", "spec")

    mb = None
    try:
        if kind == "composite":
            kinds = [k for k in re.split(r"[;,\s]+", r.raw("legendre", "kinds", required=True))
                     if k]
            for k in kinds:
                if k not in KINDS:
                    r.fail(f"unknown Legendre kind {k!r}", "legendre", "kinds")
            if len(kinds) == 1:
                kinds = kinds * m
            if len(kinds) != m:
                r.fail(f"expected 1 or {m} kinds, got {len(kinds)}", "legendre", "kinds")
            psi_kind = r.raw("problem", "psi", required=True)
            if psi_kind not in KINDS:
                r.fail(f"unknown Legendre kind {psi_kind!r}", "problem", "psi")
            beta = r.number("problem", "beta", required=True)
            problem = CompositeProblem(LegendreFunction(kinds), phis,
                                       BregmanFidelity(psi_kind, rho), omega, beta)
        else:
            build = build_is_regression if kind == "is_regression" else build_kl_regression
            mb = build(omega, rho, phis)
            problem = flatten(mb)
    except ProblemFileError:
        raise
    except ValueError as exc:
        raise ProblemFileError(str(exc), "problem") from None

    beta = problem.beta
    gammas = r.floats("solver", "gamma")
    eps = r.number("solver", "eps")
    etas = r.floats("solver", "eta")
    mus = r.floats("solver", "mu")
    alpha = r.number("solver", "alpha", default=1.0)
    if gammas is None:
        s = StepSchedule.constant(beta, eps=eps)
    else:
        g = gammas[0] if len(gammas) == 1 else gammas
        s = StepSchedule(gammas=g, beta=beta, eps=0.05 if eps is None else eps)
    s.etas = etas
    if mus is not None:
        s.mus = mus[0] if len(mus) == 1 else mus
        s.alpha = alpha

    max_iter = r.count("solver", "max_iter", default=1000)
    tol = r.number("solver", "tol", default=1e-10)
    x0 = r.floats("solver", "x0", required=True)
    if len(x0) == 1:
        x0 = x0 * m
    if len(x0) != m:
        r.fail(f"expected 1 or {m} entries, got {len(x0)}", "solver", "x0")
    return ProblemSpec(kind, problem, s, np.array(x0), max_iter, tol, mb)


def load_problem(path):
    """Read and parse a problem file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)
