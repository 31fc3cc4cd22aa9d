"""Bregman forward-backward splitting for ``min phi(x) + psi(Lx)``.

One iteration is

    x+ = Prox^{mu f}_{gamma phi}(mu grad f(x) - gamma L^T grad psi(Lx)),

with ``f`` a separable Legendre function satisfying ``f >= beta psi o L`` in
the Bregman order.  ``mu = 1`` gives the constant-``f`` method; a sequence of
multipliers ``mu_n`` gives the variable family ``f_n = mu_n f``.  Since
``Prox^{mu f}_{gamma phi}(mu u) = Prox^f_{(gamma/mu) phi}(u)`` the scaled step
is computed with the unscaled operator and step ``gamma / mu``.
"""

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DimensionError, DomainError, ScheduleError
from .legendre import LegendreFunction, ScalarLegendre, sample_interior
from .phi import ScalarPhi, make_phi
from .prox import ProxOperator, prox_apply

__all__ = [
    "BregmanFidelity",
    "CompositeProblem",
    "IterateTrace",
    "SolveReport",
    "StepSchedule",
    "StopReason",
    "TraceDiagnostics",
    "Violation",
    "check_relative_smoothness",
    "check_trace_inequalities",
    "forward_backward_step",
    "objective",
    "read_trace_csv",
    "solve",
    "validate_schedule",
]

_INF = math.inf


class BregmanFidelity:
    """Data term ``psi(y) = sum_k D^theta(y_k, rho_k)``.

    With ``theta`` Boltzmann-Shannon this is the Kullback-Leibler divergence
    to ``rho``, with Burg the Itakura-Saito divergence, with ``half_square``
    half the squared distance.

    Any object exposing ``dim``, ``value``, ``grad``, ``in_interior`` and
    ``bregman`` can stand in for this class inside :class:`CompositeProblem`.
    """

    def __init__(self, kind, rho):
        self.theta = kind if isinstance(kind, ScalarLegendre) else ScalarLegendre(kind)
        self.rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if self.rho.ndim != 1:
            raise DimensionError("rho must be a vector")
        if not np.all(self.theta.in_interior(self.rho)):
            raise DomainError(f"rho must lie in int dom {self.theta.kind}")
        self._grad_rho = np.asarray(self.theta._t.grad(self.rho), dtype=float)

    def __repr__(self):
        return f"BregmanFidelity({self.theta.kind!r}, rho={self.rho.tolist()!r})"

    @property
    def dim(self):
        return self.rho.size

    def in_interior(self, y):
        return bool(np.all(self.theta.in_interior(y)))

    def value(self, y):
        d = np.atleast_1d(self.theta.bregman(y, self.rho))
        if not np.all(np.isfinite(d)):
            return _INF
        return math.fsum(d)

    def grad(self, y):
        y = np.asarray(y, dtype=float)
        if not self.in_interior(y):
            raise DomainError(f"data term gradient undefined at Lx={y!r}: "
                              f"outside int dom {self.theta.kind}")
        return self.theta._t.grad(y) - self._grad_rho

    def bregman(self, u, v):
        # D^psi = D^theta: the affine part of psi drops out
        d = np.atleast_1d(self.theta.bregman(u, v))
        if not np.all(np.isfinite(d)):
            return _INF
        return math.fsum(d)


@dataclass
class CompositeProblem:
    """Objective data for ``min_x sum_i phi_i(x_i) + psi(L x)``.

    Parameters
    ----------
    f : LegendreFunction
        Separable Legendre function driving the Bregman geometry.
    phis : sequence of ScalarPhi
        One per coordinate (a single entry is broadcast).
    psi : BregmanFidelity or compatible
        Smooth data term, differentiable on its domain interior.
    L : array_like
        Dense ``p x m`` matrix; its transpose is the adjoint.
    beta : float
        Constant with ``f >= beta * psi o L`` in the Bregman order.
    """

    f: LegendreFunction
    phis: tuple
    psi: object
    L: np.ndarray
    beta: float

    def __post_init__(self):
        if not isinstance(self.f, LegendreFunction):
            self.f = LegendreFunction(self.f)
        phis = self.phis
        if isinstance(phis, (ScalarPhi, str)):
            phis = [phis]
        phis = [make_phi(p) if isinstance(p, str) else p for p in phis]
        if len(phis) == 1:
            phis = phis * self.f.dim
        if len(phis) != self.f.dim:
            raise DimensionError(f"{len(phis)} phi entries for dimension {self.f.dim}")
        self.phis = tuple(phis)
        self.L = np.atleast_2d(np.asarray(self.L, dtype=float))
        if self.L.shape != (self.psi.dim, self.f.dim):
            raise DimensionError(f"L has shape {self.L.shape}, expected "
                                 f"({self.psi.dim}, {self.f.dim})")
        self.beta = float(self.beta)
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def dim(self):
        return self.f.dim

    def phi_value(self, x):
        vals = [ph.value(t) for ph, t in zip(self.phis, x)]
        if not all(math.isfinite(v) for v in vals):
            return _INF
        return math.fsum(vals)

    def objective(self, x):
        """``phi(x) + psi(Lx)``, or ``+inf`` outside ``dom phi`` / ``dom f``."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"x has shape {x.shape}, expected ({self.dim},)")
        if not self.f.in_dom(x):
            return _INF
        a = self.phi_value(x)
        if a == _INF:
            return _INF
        b = self.psi.value(self.L @ x)
        return a + b

    def prox_operator(self, step):
        """``Prox^f_{step phi}``, cached per step size."""
        cache = self.__dict__.setdefault("_prox_cache", {})
        op = cache.get(step)
        if op is None:
            if len(cache) > 64:
                cache.clear()
            op = cache[step] = ProxOperator(self.f, self.phis, step)
        return op

    def smooth_bregman(self, x, z):
        """``D^{psi o L}(x, z) = D^psi(Lx, Lz)``."""
        return self.psi.bregman(self.L @ x, self.L @ z)


def objective(p, x):
    """Objective value of problem ``p`` at ``x``; ``+inf`` off its domain."""
    return p.objective(x)


def check_relative_smoothness(p, n_samples=1000, rng=None):
    """Sample ``D^f(x,z) - beta D^psi(Lx,Lz)`` over random interior pairs.

    A negative return value exhibits a violation of ``f >= beta psi o L``;
    a nonnegative one is evidence, not a certificate.  Pairs whose images
    leave ``int dom psi`` raise :class:`DomainError`.

    Returns
    -------
    float
        The smallest sampled ``D^f(x,z) - beta D^psi(Lx,Lz)``.
    """
    rng = np.random.default_rng(rng)
    cols_x = [sample_interior(k, rng, n_samples) for k in p.f.kinds]
    cols_z = [sample_interior(k, rng, n_samples) for k in p.f.kinds]
    xs = np.column_stack(cols_x)
    zs = np.column_stack(cols_z)
    worst = _INF
    for x, z in zip(xs, zs):
        if not (p.psi.in_interior(p.L @ x) and p.psi.in_interior(p.L @ z)):
            raise DomainError(f"L maps the interior point {x!r} or {z!r} "
                              "outside int dom psi")
        gap = p.f.bregman(x, z) - p.beta * p.smooth_bregman(x, z)
        worst = min(worst, gap)
    return worst


# -- step schedules -------------------------------------------------------------

def _seq(values, n, beyond):
    if values is None:
        return beyond
    if np.ndim(values) == 0:
        return float(values)
    if n < len(values):
        return float(values[n])
    return beyond if beyond is not None else float(values[-1])


@dataclass
class StepSchedule:
    """Step sizes ``gamma_n``, summable slack ``eta_n`` and constants.

    ``gammas`` and ``mus`` may be scalars (constant) or sequences; past the
    end of a sequence its last value repeats.  ``etas`` defaults to zeros
    and is zero past its end.  Leaving ``mus`` unset selects the
    constant-``f`` method; setting it selects ``f_n = mu_n f`` with the
    lower bound ``alpha``.
    """

    gammas: object
    beta: float
    eps: float = 0.05
    etas: object = None
    mus: object = None
    alpha: float = 1.0

    @classmethod
    def constant(cls, beta, gamma=None, eps=None):
        """Constant schedule; defaults put ``gamma`` midway in the admissible range."""
        if eps is None:
            eps = min(0.05, 0.5 * beta / (beta + 1.0))
        if gamma is None:
            gamma = 0.5 * (eps + beta * (1.0 - eps))
        return cls(gammas=float(gamma), beta=float(beta), eps=float(eps))

    @property
    def scaled(self):
        return self.mus is not None

    @property
    def kappa(self):
        """Effective constant ``alpha * beta`` (``beta`` for constant ``f``)."""
        return self.alpha * self.beta if self.scaled else self.beta

    def gamma(self, n):
        return _seq(self.gammas, n, None)

    def eta(self, n):
        return _seq(self.etas, n, 0.0)

    def mu(self, n):
        return 1.0 if self.mus is None else _seq(self.mus, n, None)


@dataclass(frozen=True)
class Violation:
    """One failed admissibility inequality."""

    index: object
    inequality: str
    lhs: float
    rhs: float

    def __str__(self):
        where = "schedule" if self.index is None else f"n={self.index}"
        return f"{where}: {self.inequality} fails ({self.lhs!r} vs {self.rhs!r})"


def _le(a, b):
    return a <= b + 1e-15 * max(1.0, abs(b))


def validate_schedule(s, horizon):
    """Check the step-size inequalities for ``n < horizon``.

    Checked: ``0 < eps < k/(k+1)``; ``eps <= gamma_n <= k(1-eps)``;
    ``(1+eta_n) gamma_n - gamma_{n+1} <= k eta_n``; ``eta_n >= 0``; and, for
    scaled schedules, ``mu_n >= alpha`` and ``(1+eta_n) mu_n >= mu_{n+1}``.
    Here ``k = beta`` for constant ``f`` and ``k = alpha beta`` otherwise.

    Returns
    -------
    list of Violation
        Empty when the schedule is admissible.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    k = s.kappa
    eps = s.eps
    out = []
    if not 0.0 < eps < k / (k + 1.0):
        out.append(Violation(None, "0 < eps < k/(k+1)", eps, k / (k + 1.0)))
    if s.scaled and not s.alpha > 0.0:
        out.append(Violation(None, "alpha > 0", s.alpha, 0.0))
    for n in range(horizon):
        g, g1, e = s.gamma(n), s.gamma(n + 1), s.eta(n)
        if not e >= 0.0:
            out.append(Violation(n, "eta_n >= 0", e, 0.0))
        if not _le(eps, g):
            out.append(Violation(n, "eps <= gamma_n", eps, g))
        if not _le(g, k * (1.0 - eps)):
            out.append(Violation(n, "gamma_n <= k*(1-eps)", g, k * (1.0 - eps)))
        lhs = (1.0 + e) * g - g1
        if not _le(lhs, k * e):
            out.append(Violation(n, "(1+eta_n)*gamma_n - gamma_{n+1} <= k*eta_n",
                                 lhs, k * e))
        if s.scaled:
            m, m1 = s.mu(n), s.mu(n + 1)
            if not _le(s.alpha, m):
                out.append(Violation(n, "mu_n >= alpha", m, s.alpha))
            if not _le(m1, (1.0 + e) * m):
                out.append(Violation(n, "(1+eta_n)*mu_n >= mu_{n+1}", (1.0 + e) * m, m1))
    return out


# -- iteration -----------------------------------------------------------------

def forward_backward_step(p, mu, gamma, x):
    """One step ``Prox^{mu f}_{gamma phi}(mu grad f(x) - gamma L^T grad psi(Lx))``.

    Raises
    ------
    DomainError
        If ``x`` is not interior, ``Lx`` leaves ``int dom psi``, or the prox
        argument leaves the prox domain.
    """
    x = np.asarray(x, dtype=float)
    if not p.f.in_interior(x):
        raise DomainError(f"x={x.tolist()!r} is not in int dom f")
    step = gamma / mu
    u = p.f.grad(x) - step * (p.L.T @ p.psi.grad(p.L @ x))
    return prox_apply(p.prox_operator(step), u)


class StopReason(str, enum.Enum):
    TOLERANCE = "tolerance"
    MAX_ITER = "max_iter"
    DOMAIN_FAILURE = "domain_failure"


@dataclass
class SolveReport:
    """Outcome of :func:`solve`."""

    x: np.ndarray
    iterations: int
    stop_reason: StopReason
    objective: float
    message: str = ""


@dataclass
class IterateTrace:
    """Per-iterate record, one row for ``x_0`` and one per step.

    Row ``n`` holds ``x_n``, the step ``gamma_n`` and multiplier ``mu_n``
    applied to it, ``Phi(x_n)``, the displacement ``||x_n - x_{n-1}||``
    (NaN for ``n = 0``) and, if a reference point was supplied,
    ``D^{g_n}(x_ref, x_n)`` with ``g_n = mu_n f - gamma_n psi o L``.
    """

    n: list = field(default_factory=list)
    x: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    mu: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    displacement: list = field(default_factory=list)
    bregman_ref: list = field(default_factory=list)

    def __len__(self):
        return len(self.n)

    def append(self, n, x, gamma, mu, obj, disp, bref):
        self.n.append(n)
        self.x.append(np.array(x, dtype=float))
        self.gamma.append(gamma)
        self.mu.append(mu)
        self.objective.append(obj)
        self.displacement.append(disp)
        self.bregman_ref.append(bref)

    def points(self):
        return np.array(self.x)

    def to_csv(self, dest=None, blocks=False):
        """Write the trace as CSV; return the text when ``dest`` is None.

        Columns are ``n,gamma,objective,displacement,bregman_ref`` followed,
        with ``blocks=True``, by one ``x_i`` column per coordinate.  Floats
        carry 17 significant digits so that parsing recovers them exactly;
        undefined entries are left blank.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["n", "gamma", "objective", "displacement", "bregman_ref"]
        if blocks and self.x:
            header += [f"x_{i + 1}" for i in range(len(self.x[0]))]
        w.writerow(header)
        for i in range(len(self)):
            row = [str(self.n[i]), _fmt(self.gamma[i]), _fmt(self.objective[i]),
                   _fmt(self.displacement[i]), _fmt(self.bregman_ref[i])]
            if blocks:
                row += [_fmt(v) for v in self.x[i]]
            w.writerow(row)
        text = buf.getvalue()
        if dest is None:
            return text
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return format(float(v), ".17g")


def read_trace_csv(src):
    """Parse a trace CSV into ``{column: list}``; blanks become ``None``."""
    if hasattr(src, "read"):
        text = src.read()
    elif isinstance(src, str) and "\n" in src:
        text = src
    else:
        with open(src, newline="") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    cols = {h: [] for h in header}
    for row in body:
        for h, v in zip(header, row):
            if h == "n":
                cols[h].append(int(v))
            else:
                cols[h].append(float(v) if v != "" else None)
    return cols


def _bregman_g(p, mu, gamma, xref, x):
    return mu * p.f.bregman(xref, x) - gamma * p.smooth_bregman(xref, x)


def solve(p, s, x0, tol=1e-10, max_iter=1000, x_ref=None):
    """Run the forward-backward iteration from ``x0``.

    Stops when ``||x_{n+1} - x_n|| <= tol`` or after ``max_iter`` steps.  A
    step that fails on a domain condition ends the run with
    ``StopReason.DOMAIN_FAILURE`` and the failing step index in the message.

    Parameters
    ----------
    p : CompositeProblem
    s : StepSchedule
    x0 : array_like
        Starting point in ``int dom f``.
    tol : float
    max_iter : int
    x_ref : array_like, optional
        Reference point for the ``bregman_ref`` trace column.

    Returns
    -------
    report : SolveReport
    trace : IterateTrace

    Raises
    ------
    ScheduleError
        If the schedule is inadmissible over ``max_iter`` steps or was built
        for a larger ``beta`` than the problem's.
    DomainError
        If ``x0`` is not interior or ``L x0`` leaves ``int dom psi``.
    """
    if s.beta > p.beta * (1.0 + 1e-12):
        raise ScheduleError(f"schedule beta={s.beta} exceeds the problem's beta={p.beta}",
                            [Violation(None, "schedule beta <= problem beta", s.beta, p.beta)])
    violations = validate_schedule(s, max(1, max_iter))
    if violations:
        raise ScheduleError(f"{len(violations)} schedule violation(s); first: "
                            f"{violations[0]}", violations)
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (p.dim,):
        raise DimensionError(f"x0 has shape {x.shape}, expected ({p.dim},)")
    if not p.f.in_interior(x):
        raise DomainError(f"x0={x.tolist()!r} is not in int dom f")
    if not p.psi.in_interior(p.L @ x):
        raise DomainError(f"L x0 is not in int dom psi")
    if x_ref is not None:
        x_ref = np.asarray(x_ref, dtype=float)

    def bref(n, pt):
        if x_ref is None:
            return None
        return _bregman_g(p, s.mu(n), s.gamma(n), x_ref, pt)

    trace = IterateTrace()
    trace.append(0, x, s.gamma(0), s.mu(0), p.objective(x), math.nan, bref(0, x))
    reason, msg = StopReason.MAX_ITER, f"reached max_iter={max_iter}"
    it = 0
    for n in range(max_iter):
        try:
            x_next = forward_backward_step(p, s.mu(n), s.gamma(n), x)
        except (DomainError, ConvergenceError) as exc:
            reason = StopReason.DOMAIN_FAILURE
            msg = f"step {n + 1} failed: {exc}"
            break
        it = n + 1
        disp = float(np.linalg.norm(x_next - x))
        x = x_next
        trace.append(it, x, s.gamma(it), s.mu(it), p.objective(x), disp, bref(it, x))
        if disp <= tol:
            reason, msg = StopReason.TOLERANCE, f"displacement {disp:.3g} <= {tol:g}"
            break
    report = SolveReport(x=x, iterations=it, stop_reason=reason,
                         objective=p.objective(x), message=msg)
    return report, trace


@dataclass
class TraceDiagnostics:
    """Worst slacks of the two monotonicity checks along a trace.

    ``objective_slack`` is ``max_n (Phi_{n+1} - Phi_n) / max(1, |Phi_n|)``;
    ``bregman_slack`` is ``max_n D_{n+1} - (1 + w eta_n) D_n`` scaled by
    ``max(1, (1 + w eta_n) D_n)``, where ``D_n = D^{g_n}(x_ref, x_n)`` and
    ``w = 1 + 1/eps``.  Violating indices are ``n + 1``.
    """

    objective_ok: bool
    objective_slack: float
    objective_violations: list
    bregman_ok: bool
    bregman_slack: float
    bregman_violations: list

    @property
    def ok(self):
        return self.objective_ok and self.bregman_ok


def check_trace_inequalities(p, s, trace, x_ref, objective_tol=1e-12, bregman_tol=1e-10):
    """Verify objective descent and quasi-Bregman monotonicity along ``trace``.

    The objective and Bregman terms are recomputed from the stored iterates.
    ``x_ref`` must be in ``dom Phi`` and ``int dom f``; the Bregman check is
    meaningful when ``Phi(x_ref)`` does not exceed the trace minimum.

    Returns
    -------
    TraceDiagnostics
    """
    x_ref = np.asarray(x_ref, dtype=float)
    if not (p.f.in_interior(x_ref) and math.isfinite(p.objective(x_ref))):
        raise DomainError(f"x_ref={x_ref!r} must be in dom Phi and int dom f")
    w = 1.0 + 1.0 / s.eps
    objs = [p.objective(x) for x in trace.x]
    ds = [_bregman_g(p, s.mu(n), s.gamma(n), x_ref, x) for n, x in enumerate(trace.x)]
    obj_worst, breg_worst = -_INF, -_INF
    obj_bad, breg_bad = [], []
    for n in range(len(trace.x) - 1):
        a, b = objs[n], objs[n + 1]
        rel = (b - a) / max(1.0, abs(a)) if math.isfinite(a) else -_INF
        if not math.isfinite(b):
            rel = _INF
        obj_worst = max(obj_worst, rel)
        if rel > objective_tol:
            obj_bad.append(n + 1)
        bound = (1.0 + w * s.eta(n)) * ds[n]
        excess = (ds[n + 1] - bound) / max(1.0, bound)
        breg_worst = max(breg_worst, excess)
        if excess > bregman_tol:
            breg_bad.append(n + 1)
    if len(trace.x) < 2:
        obj_worst = breg_worst = 0.0
    return TraceDiagnostics(not obj_bad, obj_worst, obj_bad,
                            not breg_bad, breg_worst, breg_bad)
