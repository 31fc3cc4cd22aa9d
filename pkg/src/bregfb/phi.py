"""Scalar convex functions used as the separable term of the objective.

Each :class:`ScalarPhi` knows its value (``+inf`` off its domain), its
derivative on the smooth part of the open domain, its kinks with their
subdifferential intervals, and the open interval forming ``int dom phi``.
Kinds and parameter names are the identifiers used in problem files::

    zero
    linear_entropy(omega)   t log t - omega t            on [0, inf)
    power(p)                |t|^p / p,  p >= 1
    neg_power(p)            t^-p / p,   p >= 1            on (0, inf)
    neg_root(p)             -t^p / p,   0 < p < 1         on [0, inf)
    abs_linear(alpha)       alpha |t|,  alpha > 0
    mirror_entropy(omega)   (1-t) log(1-t) - omega (1-t)  on (-inf, 1]
    one_minus_log           (1-t) log(1-t) + t            on (-inf, 1]
    self_hellinger          -sqrt(1 - t^2)                on [-1, 1]
    burg                    -log t                        on (0, inf)
"""

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy


__all__ = ["PHI_KINDS", "ScalarPhi", "make_phi", "parse_phi", "parse_phi_list"]

_INF = math.inf

PHI_KINDS = (
    "zero", "linear_entropy", "power", "neg_power", "neg_root", "abs_linear",
    "mirror_entropy", "one_minus_log", "self_hellinger", "burg",
)

_PARAMS = {
    "linear_entropy": ("omega",),
    "power": ("p",),
    "neg_power": ("p",),
    "neg_root": ("p",),
    "abs_linear": ("alpha",),
    "mirror_entropy": ("omega",),
}


def _check_params(kind, params):
    want = _PARAMS.get(kind, ())
    if set(params) != set(want):
        raise ValueError(f"phi kind {kind!r} takes parameters {want}, got {tuple(params)}")
    p = params.get("p")
    if kind in ("power", "neg_power") and not p >= 1.0:
        raise ValueError(f"{kind} needs p >= 1, got {p}")
    if kind == "neg_root" and not 0.0 < p < 1.0:
        raise ValueError(f"neg_root needs 0 < p < 1, got {p}")
    if kind == "abs_linear" and not params["alpha"] > 0.0:
        raise ValueError(f"abs_linear needs alpha > 0, got {params['alpha']}")
    for name, v in params.items():
        if not math.isfinite(v):
            raise ValueError(f"parameter {name} of {kind} must be finite")


@dataclass(frozen=True)
class ScalarPhi:
    """A scalar function ``phi`` in Gamma_0(R) from the catalog.

    Build instances with :func:`make_phi` or :func:`parse_phi`.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise ValueError(f"unknown phi kind {self.kind!r}; "
                             f"expected one of {', '.join(PHI_KINDS)}")
        _check_params(self.kind, dict(self.params))

    def __getitem__(self, name):
        return dict(self.params)[name]

    def __str__(self):
        if not self.params:
            return self.kind
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.kind}({inner})"

    # -- domain -----------------------------------------------------------

    @property
    def interior(self):
        """Open interval ``int dom phi``."""
        k = self.kind
        if k in ("linear_entropy", "neg_power", "neg_root", "burg"):
            return (0.0, _INF)
        if k in ("mirror_entropy", "one_minus_log"):
            return (-_INF, 1.0)
        if k == "self_hellinger":
            return (-1.0, 1.0)
        return (-_INF, _INF)

    @property
    def kinks(self):
        """Points of ``int dom phi`` where ``phi`` is not differentiable."""
        if self.kind == "abs_linear" or (self.kind == "power" and self["p"] == 1.0):
            return (0.0,)
        return ()

    def kink_subdiff(self, t):
        """Subdifferential interval ``(lo, hi)`` at the kink ``t``."""
        if t not in self.kinks:
            raise ValueError(f"{t} is not a kink of {self}")
        a = self["alpha"] if self.kind == "abs_linear" else 1.0
        return (-a, a)

    @property
    def recession_slope(self):
        """Limit of ``phi'(t)`` as ``t`` increases to ``sup dom phi``."""
        k = self.kind
        if k in ("zero", "neg_power", "neg_root", "burg"):
            return 0.0
        if k == "abs_linear":
            return self["alpha"]
        return _INF

    # -- evaluation ---------------------------------------------------------

    def value(self, t):
        """Vectorized value with ``+inf`` off ``dom phi``."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.full(t.shape, _INF)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "zero":
                out[:] = 0.0
            elif k == "linear_entropy":
                m = t >= 0.0
                out[m] = xlogy(t[m], t[m]) - self["omega"] * t[m]
            elif k == "power":
                out = np.abs(t) ** self["p"] / self["p"]
            elif k == "neg_power":
                m = t > 0.0
                out[m] = t[m] ** -self["p"] / self["p"]
            elif k == "neg_root":
                m = t >= 0.0
                out[m] = -(t[m] ** self["p"]) / self["p"]
            elif k == "abs_linear":
                out = self["alpha"] * np.abs(t)
            elif k in ("mirror_entropy", "one_minus_log"):
                m = t <= 1.0
                s = 1.0 - t[m]
                out[m] = xlogy(s, s) + (t[m] if k == "one_minus_log"
                                        else -self["omega"] * s)
            elif k == "self_hellinger":
                m = np.abs(t) <= 1.0
                out[m] = -np.sqrt((1.0 - t[m]) * (1.0 + t[m]))
            elif k == "burg":
                m = t > 0.0
                out[m] = -np.log(t[m])
        return float(out[0]) if scalar else out

    def deriv(self, t):
        """Derivative on the smooth part of ``int dom phi`` (scalar ``t``)."""
        k = self.kind
        if k == "zero":
            return 0.0
        if k == "linear_entropy":
            return math.log(t) + 1.0 - self["omega"]
        if k == "power":
            p = self["p"]
            return math.copysign(abs(t) ** (p - 1.0), t)
        if k == "neg_power":
            return -(t ** (-self["p"] - 1.0))
        if k == "neg_root":
            return -(t ** (self["p"] - 1.0))
        if k == "abs_linear":
            return math.copysign(self["alpha"], t)
        if k == "mirror_entropy":
            return -math.log1p(-t) - 1.0 + self["omega"]
        if k == "one_minus_log":
            return -math.log1p(-t)
        if k == "self_hellinger":
            return t / math.sqrt((1.0 - t) * (1.0 + t))
        return -1.0 / t  # burg

    def deriv2(self, t):
        """Second derivative on the smooth part (scalar ``t``)."""
        k = self.kind
        if k in ("zero", "abs_linear"):
            return 0.0
        if k == "linear_entropy":
            return 1.0 / t
        if k == "power":
            p = self["p"]
            if p == 1.0:
                return 0.0
            return (p - 1.0) * abs(t) ** (p - 2.0) if t != 0.0 else (
                0.0 if p > 2.0 else (1.0 if p == 2.0 else _INF))
        if k == "neg_power":
            p = self["p"]
            return (p + 1.0) * t ** (-p - 2.0)
        if k == "neg_root":
            p = self["p"]
            return (1.0 - p) * t ** (p - 2.0)
        if k in ("mirror_entropy", "one_minus_log"):
            return 1.0 / (1.0 - t)
        if k == "self_hellinger":
            return ((1.0 - t) * (1.0 + t)) ** -1.5
        return 1.0 / (t * t)  # burg


def make_phi(kind, **params):
    """Construct a :class:`ScalarPhi` from a kind name and parameters."""
    params = {k: float(v) for k, v in params.items()}
    return ScalarPhi(kind, tuple(sorted(params.items())))


_PHI_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_phi(text):
    """Parse ``kind`` or ``kind(name=value, ...)`` into a :class:`ScalarPhi`.

    >>> str(parse_phi("abs_linear(alpha=2)"))
    'abs_linear(alpha=2.0)'
    """
    m = _PHI_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse phi spec {text!r}")
    kind, inner = m.group(1), m.group(2)
    params = {}
    if inner and inner.strip():
        for item in inner.split(","):
            if "=" not in item:
                raise ValueError(f"phi parameter {item.strip()!r} must be name=value")
            name, val = item.split("=", 1)
            try:
                params[name.strip()] = float(val)
            except ValueError:
                raise ValueError(f"phi parameter {name.strip()!r} is not a number: "
                                 f"{val.strip()!r}") from None
    return make_phi(kind, **params)


def parse_phi_list(text, m=None):
    """Parse a ``;``-separated list of phi specs, broadcasting a single entry."""
    phis = [parse_phi(part) for part in text.split(";") if part.strip()]
    if m is not None:
        if len(phis) == 1:
            phis = phis * m
        elif len(phis) != m:
            raise ValueError(f"expected 1 or {m} phi specs, got {len(phis)}")
    return phis

