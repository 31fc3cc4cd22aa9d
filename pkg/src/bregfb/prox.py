"""Bregman proximity operators ``Prox^f_{gamma phi}`` for separable pairs.

For a Legendre ``theta`` and ``phi`` in Gamma_0(R) the scalar operator maps
``xi`` to the unique ``eta`` in ``int dom theta`` with

    xi in theta'(eta) + gamma * d phi(eta),

i.e. the minimizer of ``gamma phi + theta - xi * (.)``.  On separable sums the
operator acts coordinatewise.  Pairs listed in :func:`prox_closed_form_table`
are evaluated in closed form; every other pair goes through
:func:`prox_numeric_scalar`, a bracketed monotone root search.

Every closed form below is derived from the stationarity equation, e.g.
``eta = exp((xi + gamma (omega - 1)) / (gamma + 1))`` for entropy with
linear entropy and ``eta = -(1 + gamma) / xi`` for Burg with Burg.

The Lambert-W forms are evaluated through ``log W(e^s) = s - W(e^s)``, which
equals ``(W(a e^b) / a) ** (1 / q)`` but cannot overflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import BracketError, DimensionError, DomainError
from .legendre import LegendreFunction, ScalarLegendre
from .phi import ScalarPhi, make_phi
from .scalar import lambert_w0_exp, solve_monotone_scalar

__all__ = [
    "ClosedForm",
    "ProxOperator",
    "lookup_closed_form",
    "prox_apply",
    "prox_closed_form_table",
    "prox_numeric_scalar",
    "prox_scalar",
]

_INF = math.inf
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ClosedForm:
    """Descriptor of one closed-form scalar prox.

    Attributes
    ----------
    name : str
        Stable identifier, ``<legendre>/<phi>[/variant]``.
    legendre : str
        Legendre kind.
    phi : str
        Phi kind.
    formula : str
        Human-readable formula for ``eta``.
    applies : callable
        ``applies(phi) -> bool``; restrictions on the phi parameters.
    domain : callable
        ``domain(phi, gamma) -> (lo, hi)``, the open interval of valid ``xi``.
    evaluate : callable
        ``evaluate(xi, phi, gamma) -> eta`` on arrays.
    unit_gamma : bool
        True when the formula is only valid for ``gamma == 1``.
    """

    name: str
    legendre: str
    phi: str
    formula: str
    applies: object
    domain: object
    evaluate: object
    unit_gamma: bool = False

    def valid_for(self, phi, gamma=None):
        """True when this entry evaluates ``phi`` (at ``gamma``, if given)."""
        if phi.kind != self.phi or not self.applies(phi):
            return False
        return gamma is None or not self.unit_gamma or gamma == 1.0

    def __repr__(self):
        return f"ClosedForm({self.name!r}: eta = {self.formula})"


def _everywhere(phi, gamma):
    return (-_INF, _INF)


def _always(phi):
    return True


# -- Boltzmann-Shannon ---------------------------------------------------------

def _bs_linear_entropy(xi, phi, gamma):
    return np.exp((xi + gamma * (phi["omega"] - 1.0)) / (gamma + 1.0))


def _bs_power(xi, phi, gamma):
    # log eta = xi - W / (p - 1),  W = W(gamma (p-1) e^{(p-1) xi})
    q = phi["p"] - 1.0
    w = lambert_w0_exp(math.log(gamma * q) + q * xi)
    return np.exp(xi - w / q)


def _bs_power_one(xi, phi, gamma):
    return np.exp(xi - gamma)


def _bs_neg_power(xi, phi, gamma):
    # log eta = xi + W / (p + 1),  W = W(gamma (p+1) e^{-(p+1) xi})
    q = phi["p"] + 1.0
    w = lambert_w0_exp(math.log(gamma * q) - q * xi)
    return np.exp(xi + w / q)


def _bs_neg_root(xi, phi, gamma):
    # log eta = xi + W / (1 - p),  W = W(gamma (1-p) e^{(p-1) xi})
    q = 1.0 - phi["p"]
    w = lambert_w0_exp(math.log(gamma * q) - q * xi)
    return np.exp(xi + w / q)


# -- Fermi-Dirac (gamma = 1) ---------------------------------------------------

def _quad_small_root(s):
    # positive root of eta^2 + c eta - c = 0 with c = e^s, i.e. eta^2/(1-eta) = c
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    neg = s <= 0.0
    c = np.exp(s[neg])
    out[neg] = c / (0.5 * c + np.sqrt(c * (0.25 * c + 1.0)))
    out[~neg] = 1.0 / (0.5 + np.sqrt(0.25 + np.exp(-s[~neg])))
    return out


def _fd_linear_entropy(xi, phi, gamma):
    return _quad_small_root(xi + phi["omega"] - 1.0)


def _mirror_root(s):
    # root in (0, 1) of eta / (1 - eta)^2 = e^s
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    pos = s >= 0.0
    c = np.exp(-s[pos])
    out[pos] = 1.0 / (1.0 + 0.5 * c + np.sqrt(c * (1.0 + 0.25 * c)))
    e = np.exp(s[~pos])
    out[~pos] = e / (e + 0.5 + np.sqrt(e + 0.25))
    return out


def _fd_one_minus_log(xi, phi, gamma):
    return _mirror_root(xi)


def _fd_mirror_entropy(xi, phi, gamma):
    return _mirror_root(xi + 1.0 - phi["omega"])


# -- Hellinger, Burg, half square ----------------------------------------------

def _hel_self(xi, phi, gamma):
    return xi / np.hypot(gamma + 1.0, xi)


def _burg_burg(xi, phi, gamma):
    return -(1.0 + gamma) / xi


def _burg_abs_linear(xi, phi, gamma):
    return 1.0 / (gamma * phi["alpha"] - xi)


def _zero_conj(kind):
    fns = {
        "boltzmann_shannon": np.exp,
        "fermi_dirac": expit,
        "hellinger": lambda s: s / np.sqrt(1.0 + s * s),
        "burg": lambda s: -1.0 / s,
        "half_square": lambda s: np.array(s, dtype=float, copy=True),
    }
    fn = fns[kind]
    return lambda xi, phi, gamma: fn(xi)


_TABLE = (
    ClosedForm("boltzmann_shannon/linear_entropy", "boltzmann_shannon", "linear_entropy",
               "exp((xi + gamma*(omega - 1)) / (gamma + 1))",
               _always, _everywhere, _bs_linear_entropy),
    ClosedForm("boltzmann_shannon/power", "boltzmann_shannon", "power",
               "(W(gamma*(p-1)*exp((p-1)*xi)) / (gamma*(p-1)))**(1/(p-1))",
               lambda phi: phi["p"] > 1.0, _everywhere, _bs_power),
    ClosedForm("boltzmann_shannon/power/p=1", "boltzmann_shannon", "power",
               "exp(xi - gamma)",
               lambda phi: phi["p"] == 1.0, _everywhere, _bs_power_one),
    ClosedForm("boltzmann_shannon/neg_power", "boltzmann_shannon", "neg_power",
               "(W(gamma*(p+1)*exp(-(p+1)*xi)) / (gamma*(p+1)))**(-1/(p+1))",
               _always, _everywhere, _bs_neg_power),
    ClosedForm("boltzmann_shannon/neg_root", "boltzmann_shannon", "neg_root",
               "(W(gamma*(1-p)*exp((p-1)*xi)) / (gamma*(1-p)))**(1/(p-1))",
               _always, _everywhere, _bs_neg_root),
    ClosedForm("fermi_dirac/linear_entropy", "fermi_dirac", "linear_entropy",
               "-c/2 + sqrt(c**2/4 + c), c = exp(xi + omega - 1)  [gamma = 1]",
               _always, _everywhere, _fd_linear_entropy, True),
    ClosedForm("fermi_dirac/one_minus_log", "fermi_dirac", "one_minus_log",
               "1 + exp(-xi)/2 - sqrt(exp(-xi) + exp(-2*xi)/4)  [gamma = 1]",
               _always, _everywhere, _fd_one_minus_log, True),
    ClosedForm("hellinger/self_hellinger", "hellinger", "self_hellinger",
               "xi / sqrt((gamma + 1)**2 + xi**2)",
               _always, _everywhere, _hel_self),
    ClosedForm("burg/burg", "burg", "burg",
               "-(1 + gamma) / xi",
               _always, lambda phi, g: (-_INF, 0.0), _burg_burg),
    ClosedForm("burg/abs_linear", "burg", "abs_linear",
               "1 / (gamma*alpha - xi)",
               _always, lambda phi, g: (-_INF, g * phi["alpha"]), _burg_abs_linear),
    ClosedForm("half_square/zero", "half_square", "zero", "xi",
               _always, _everywhere, _zero_conj("half_square")),
    # beyond the core table: phi = 0 is the conjugate gradient, and the
    # mirrored entropy generalizes one_minus_log (omega = 1) on Fermi-Dirac
    ClosedForm("fermi_dirac/mirror_entropy", "fermi_dirac", "mirror_entropy",
               "root of eta/(1-eta)**2 = exp(xi + 1 - omega)  [gamma = 1]",
               _always, _everywhere, _fd_mirror_entropy, True),
    ClosedForm("boltzmann_shannon/zero", "boltzmann_shannon", "zero", "exp(xi)",
               _always, _everywhere, _zero_conj("boltzmann_shannon")),
    ClosedForm("fermi_dirac/zero", "fermi_dirac", "zero", "1 / (1 + exp(-xi))",
               _always, _everywhere, _zero_conj("fermi_dirac")),
    ClosedForm("hellinger/zero", "hellinger", "zero", "xi / sqrt(1 + xi**2)",
               _always, _everywhere, _zero_conj("hellinger")),
    ClosedForm("burg/zero", "burg", "zero", "-1 / xi",
               _always, lambda phi, g: (-_INF, 0.0), _zero_conj("burg")),
)

#: Names of the eleven entries forming the core catalog.
CORE_CLOSED_FORMS = tuple(cf.name for cf in _TABLE[:11])


def prox_closed_form_table():
    """Return every implemented closed form as a list of :class:`ClosedForm`."""
    return list(_TABLE)


def lookup_closed_form(legendre, phi, gamma=None):
    """Closed form for the pair, or ``None`` when only the numeric path applies.

    Parameters
    ----------
    legendre : str or ScalarLegendre
    phi : ScalarPhi or str
        A bare kind string returns the first entry for that kind.
    gamma : float, optional
        When given, entries restricted to particular ``gamma`` are filtered.
    """
    kind = getattr(legendre, "kind", legendre)
    if isinstance(phi, str):
        matches = [cf for cf in _TABLE if cf.legendre == kind and cf.phi == phi]
        return matches[0] if matches else None
    for cf in _TABLE:
        if cf.legendre == kind and cf.valid_for(phi, gamma):
            return cf
    return None


# -- numeric path ------------------------------------------------------------

def _piece_center(a, b, hint):
    if a < hint < b and math.isfinite(hint):
        return hint
    if math.isfinite(a) and math.isfinite(b):
        return a + 0.5 * (b - a)
    if math.isfinite(a):
        return a + max(1.0, abs(a))
    if math.isfinite(b):
        return b - max(1.0, abs(b))
    return 0.0


def _expand(h, target, a, b, c, max_steps=300):
    """Grow ``[lo, hi]`` from ``c`` inside ``(a, b)`` until it brackets ``target``."""
    lo = hi = c
    step = max(1.0, abs(c))
    span = step
    k = 0
    while h(lo) > target:
        if math.isfinite(a):
            nxt = a + (lo - a) / 16.0
        else:
            span *= 16.0
            nxt = c - span
        if not a < nxt < lo or not math.isfinite(nxt):
            raise BracketError(f"no bracket for xi={target!r}: reached the lower "
                               f"end of ({a}, {b})", bracket=(lo, hi))
        lo = nxt
        k += 1
        if k > max_steps:
            raise BracketError(f"no bracket for xi={target!r}", bracket=(lo, hi))
    k = 0
    span = step
    while h(hi) < target:
        if math.isfinite(b):
            nxt = b - (b - hi) / 16.0
        else:
            span *= 16.0
            nxt = c + span
        if not hi < nxt < b or not math.isfinite(nxt):
            raise BracketError(f"no bracket for xi={target!r}: reached the upper "
                               f"end of ({a}, {b})", bracket=(lo, hi))
        hi = nxt
        k += 1
        if k > max_steps:
            raise BracketError(f"no bracket for xi={target!r}", bracket=(lo, hi))
    return lo, hi


def prox_numeric_scalar(legendre, phi, gamma, xi, tol=1e-10):
    """Solve ``theta'(eta) + gamma * phi'(eta) = xi`` numerically.

    The search interval is ``int dom theta`` intersected with
    ``int dom phi``.  Kinks of ``phi`` are tested first against their
    subdifferential intervals; on the smooth piece that must contain the
    solution a bracket is grown geometrically from the ``phi = 0``
    solution ``(theta*)'(xi)`` and handed to
    :func:`~bregfb.scalar.solve_monotone_scalar` with Newton acceleration.

    Raises
    ------
    BracketError
        If ``xi`` is outside the range of ``theta' + gamma phi'``.
    """
    if not isinstance(legendre, ScalarLegendre):
        legendre = ScalarLegendre(legendre)
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    xi = float(xi)
    la, lb = legendre.interior
    pa, pb = phi.interior
    a, b = max(la, pa), min(lb, pb)
    if not a < b:
        raise DomainError(f"dom {phi} does not meet int dom {legendre.kind}")

    dtheta = legendre._t.grad
    d2theta = legendre._t.grad2

    def h(t):
        return float(dtheta(t)) + gamma * phi.deriv(t)

    def dh(t):
        return float(d2theta(t)) + gamma * phi.deriv2(t)

    for kink in phi.kinks:
        if not a < kink < b:
            continue
        slo, shi = phi.kink_subdiff(kink)
        base = float(dtheta(kink))
        if base + gamma * slo <= xi <= base + gamma * shi:
            return kink
        if xi < base + gamma * slo:
            b = kink
        else:
            a = kink

    hint = -_INF
    if legendre.conj_interior[0] < xi < legendre.conj_interior[1]:
        hint = float(legendre._t.conj_grad(xi))
    c = _piece_center(a, b, hint)
    lo, hi = _expand(h, xi, a, b, c)
    if lo == hi:
        return lo
    t = solve_monotone_scalar(h, xi, (lo, hi), tol=tol, dg=dh)
    return _polish(h, dh, xi, t, lo, hi)


def _polish(h, dh, xi, t, lo, hi, max_steps=8):
    # A small residual can hide a large argument error where h is flat
    # (e.g. -1/t for large t); a few guarded Newton steps fix the argument.
    r = h(t) - xi
    for _ in range(max_steps):
        d = dh(t)
        if not (d > 0.0 and math.isfinite(d)):
            break
        tn = t - r / d
        if not lo <= tn <= hi:
            break
        rn = h(tn) - xi
        if abs(rn) > abs(r):
            break
        done = abs(tn - t) <= 4.0 * _EPS * max(1.0, abs(t))
        t, r = tn, rn
        if done:
            break
    return t


# -- vector operator -----------------------------------------------------------

def _eval_closed(cf, legendre, phi, gamma, xi):
    lo, hi = cf.domain(phi, gamma)
    bad = ~((xi > lo) & (xi < hi))
    if np.any(bad):
        raise DomainError(f"xi={float(xi[bad][0])!r} outside the prox domain ({lo}, {hi}) "
                          f"of {legendre.kind} with {phi}, gamma={gamma}")
    with np.errstate(over="ignore", under="ignore"):
        return np.asarray(cf.evaluate(xi, phi, gamma), dtype=float)


def prox_scalar(legendre, phi, gamma, xi):
    """Vectorized scalar prox for one ``(theta, phi)`` pair.

    Uses the closed form when one applies, the numeric path otherwise.
    """
    if not isinstance(legendre, ScalarLegendre):
        legendre = ScalarLegendre(legendre)
    scalar = np.ndim(xi) == 0
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = _prox_group(legendre, phi, gamma, xi, lookup_closed_form(legendre, phi, gamma))
    return float(eta[0]) if scalar else eta


def _prox_group(legendre, phi, gamma, xi, cf):
    if cf is not None:
        eta = _eval_closed(cf, legendre, phi, gamma, xi)
    else:
        eta = np.array([prox_numeric_scalar(legendre, phi, gamma, v) for v in xi])
    inside = legendre.in_interior(eta)
    if not np.all(inside):
        bad = np.flatnonzero(~inside)[0]
        raise DomainError(f"prox of {phi} under {legendre.kind} at xi={float(xi[bad])!r} "
                          f"left int dom (got {float(eta[bad])!r})")
    return eta


class ProxOperator:
    """The separable operator ``Prox^f_{gamma phi}`` on ``R^m``.

    Parameters
    ----------
    legendre : LegendreFunction
        Separable Legendre function ``f``.
    phis : ScalarPhi or sequence of ScalarPhi
        One per coordinate; a single value is broadcast.
    gamma : float
        Positive scaling of ``phi``.
    """

    def __init__(self, legendre, phis, gamma):
        if not isinstance(legendre, LegendreFunction):
            legendre = LegendreFunction(legendre)
        if isinstance(phis, (ScalarPhi, str)):
            phis = [phis] * legendre.dim
        phis = [make_phi(p) if isinstance(p, str) else p for p in phis]
        if len(phis) != legendre.dim:
            raise DimensionError(f"{len(phis)} phi entries for dimension {legendre.dim}")
        gamma = float(gamma)
        if not gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.legendre = legendre
        self.phis = tuple(phis)
        self.gamma = gamma
        groups = {}
        for i, pair in enumerate(zip(legendre.coords, self.phis)):
            groups.setdefault(pair, []).append(i)
        self._groups = [(th, ph, np.array(idx), lookup_closed_form(th, ph, gamma))
                        for (th, ph), idx in groups.items()]

    def __repr__(self):
        return (f"ProxOperator({list(self.legendre.kinds)!r}, "
                f"{[str(p) for p in self.phis]!r}, gamma={self.gamma!r})")

    @property
    def closed_form_mask(self):
        """Boolean per coordinate: True where a closed form is used."""
        mask = np.zeros(self.legendre.dim, dtype=bool)
        for _, _, idx, cf in self._groups:
            mask[idx] = cf is not None
        return mask

    def __call__(self, xstar):
        return prox_apply(self, xstar)


def prox_apply(op, xstar):
    """Evaluate ``op`` at ``xstar`` coordinatewise.

    Raises
    ------
    DomainError
        If a coordinate of ``xstar`` lies outside the domain of its scalar prox.
    """
    xstar = np.asarray(xstar, dtype=float)
    if xstar.shape != (op.legendre.dim,):
        raise DimensionError(f"xstar has shape {xstar.shape}, "
                             f"expected ({op.legendre.dim},)")
    out = np.empty_like(xstar)
    for th, ph, idx, cf in op._groups:
        out[idx] = _prox_group(th, ph, op.gamma, xstar[idx], cf)
    return out
