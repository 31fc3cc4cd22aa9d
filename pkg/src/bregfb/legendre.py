"""Separable Legendre functions and their Bregman distances.

A :class:`LegendreFunction` is a sum ``f(x) = sum_i theta_i(x_i)`` of scalar
entropies drawn from a fixed catalog.  Every kind carries its value, its
derivative on the interior of its domain, the derivative of its conjugate
(the inverse of the derivative), and the interval bounds of both interiors.

Boundary values follow the ``0 * log 0 = 0`` convention; derivatives are
only defined on interiors.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit, xlogy

from .errors import DimensionError, DomainError

__all__ = [
    "KINDS",
    "ScalarLegendre",
    "LegendreFunction",
    "sample_interior",
    "sample_conj_interior",
]

KINDS = ("boltzmann_shannon", "fermi_dirac", "hellinger", "burg", "half_square")

_INF = math.inf


def _where_dom(mask, fn, x, fill=_INF):
    out = np.full(x.shape, fill, dtype=float)
    if np.any(mask):
        out[mask] = fn(x[mask])
    return out


# value ----------------------------------------------------------------------

def _bs_value(x):
    return _where_dom(x >= 0.0, lambda t: xlogy(t, t) - t, x)


def _fd_value(x):
    return _where_dom((x >= 0.0) & (x <= 1.0),
                      lambda t: xlogy(t, t) + xlogy(1.0 - t, 1.0 - t), x)


def _hel_value(x):
    return _where_dom(np.abs(x) <= 1.0, lambda t: -np.sqrt((1.0 - t) * (1.0 + t)), x)


def _burg_value(x):
    return _where_dom(x > 0.0, lambda t: -np.log(t), x)


def _half_value(x):
    return 0.5 * x * x


# divergence (y interior, x in dom) ------------------------------------------

def _bs_div(x, y):
    return xlogy(x, x / y) - x + y


def _fd_div(x, y):
    return xlogy(x, x / y) + xlogy(1.0 - x, (1.0 - x) / (1.0 - y))


def _hel_div(x, y):
    sy = np.sqrt((1.0 - y) * (1.0 + y))
    sx = np.sqrt((1.0 - x) * (1.0 + x))
    return (1.0 - x * y - sx * sy) / sy


def _burg_div(x, y):
    d = x / y - 1.0
    return d - np.log1p(d)


def _half_div(x, y):
    return 0.5 * (x - y) ** 2


@dataclass(frozen=True)
class _KindTable:
    value: object
    grad: object
    grad2: object
    conj_grad: object
    div: object
    dom: tuple          # closed domain bounds (lo, hi)
    interior: tuple     # open interior bounds
    conj_interior: tuple


_TABLE = {
    "boltzmann_shannon": _KindTable(
        _bs_value, np.log, lambda t: 1.0 / t, np.exp, _bs_div,
        (0.0, _INF), (0.0, _INF), (-_INF, _INF)),
    "fermi_dirac": _KindTable(
        _fd_value, logit, lambda t: 1.0 / (t * (1.0 - t)), expit, _fd_div,
        (0.0, 1.0), (0.0, 1.0), (-_INF, _INF)),
    "hellinger": _KindTable(
        _hel_value,
        lambda t: t / np.sqrt((1.0 - t) * (1.0 + t)),
        lambda t: ((1.0 - t) * (1.0 + t)) ** -1.5,
        lambda s: s / np.sqrt(1.0 + s * s),
        _hel_div,
        (-1.0, 1.0), (-1.0, 1.0), (-_INF, _INF)),
    "burg": _KindTable(
        _burg_value, lambda t: -1.0 / t, lambda t: 1.0 / (t * t),
        lambda s: -1.0 / s, _burg_div,
        (0.0, _INF), (0.0, _INF), (-_INF, 0.0)),
    "half_square": _KindTable(
        _half_value, lambda t: np.array(t, dtype=float, copy=True),
        lambda t: np.ones_like(t), lambda s: np.array(s, dtype=float, copy=True),
        _half_div,
        (-_INF, _INF), (-_INF, _INF), (-_INF, _INF)),
}


def _open_mask(x, bounds, margin=0.0):
    lo, hi = bounds
    return (x > lo + margin) & (x < hi - margin)


@dataclass(frozen=True)
class ScalarLegendre:
    """One scalar Legendre function ``theta`` from the catalog.

    Parameters
    ----------
    kind : str
        One of ``boltzmann_shannon``, ``fermi_dirac``, ``hellinger``,
        ``burg``, ``half_square``.  Fermi-Dirac is the standard
        ``t log t + (1 - t) log(1 - t)``.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in _TABLE:
            raise ValueError(f"unknown Legendre kind {self.kind!r}; "
                             f"expected one of {', '.join(KINDS)}")

    @property
    def _t(self):
        return _TABLE[self.kind]

    @property
    def dom(self):
        return self._t.dom

    @property
    def interior(self):
        """Open interval ``(lo, hi)`` forming ``int dom theta``."""
        return self._t.interior

    @property
    def conj_interior(self):
        """Open interval forming ``int dom theta*``."""
        return self._t.conj_interior

    def in_dom(self, t):
        t = np.asarray(t, dtype=float)
        return np.isfinite(self._t.value(np.atleast_1d(t))).reshape(t.shape)

    def in_interior(self, t, margin=0.0):
        return _open_mask(np.asarray(t, dtype=float), self.interior, margin)

    def in_conj_interior(self, s):
        return _open_mask(np.asarray(s, dtype=float), self.conj_interior)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _scalarize(self._t.value(np.atleast_1d(t)).reshape(t.shape))

    def grad(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(self.in_interior(t)):
            raise DomainError(f"{self.kind} gradient needs points in "
                              f"{self.interior}, got {t!r}")
        return _scalarize(self._t.grad(t))

    def grad2(self, t):
        """Second derivative on the interior (used by Newton acceleration)."""
        t = np.asarray(t, dtype=float)
        return _scalarize(self._t.grad2(t))

    def conj_grad(self, s):
        s = np.asarray(s, dtype=float)
        if not np.all(self.in_conj_interior(s)):
            raise DomainError(f"{self.kind} conjugate gradient needs points in "
                              f"{self.conj_interior}, got {s!r}")
        return _scalarize(self._t.conj_grad(s))

    def bregman(self, x, y):
        """Elementwise ``theta(x) - theta(y) - (x - y) theta'(y)``.

        ``+inf`` where ``y`` is not interior or ``x`` is outside the domain;
        exactly zero where ``x == y``; negative rounding residue is clamped
        to zero.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        shape = x.shape
        x = np.atleast_1d(x).ravel()
        y = np.atleast_1d(y).ravel()
        ok = self.in_interior(y) & np.isfinite(self._t.value(x))
        out = np.full(x.shape, _INF)
        if np.any(ok):
            with np.errstate(divide="ignore", invalid="ignore"):
                out[ok] = np.maximum(self._t.div(x[ok], y[ok]), 0.0)
        out[ok & (x == y)] = 0.0
        return _scalarize(out.reshape(shape))


def _scalarize(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


class LegendreFunction:
    """Separable sum ``f(x) = sum_i theta_i(x_i)`` over ``R^m``.

    Parameters
    ----------
    coords : sequence of str or ScalarLegendre
        One scalar kind per coordinate.

    Examples
    --------
    >>> f = LegendreFunction.uniform("boltzmann_shannon", 2)
    >>> f.value([1.0, 1.0])
    -2.0
    """

    def __init__(self, coords):
        coords = tuple(c if isinstance(c, ScalarLegendre) else ScalarLegendre(c)
                       for c in coords)
        if not coords:
            raise DimensionError("a Legendre function needs at least one coordinate")
        self.coords = coords
        groups = {}
        for i, c in enumerate(coords):
            groups.setdefault(c, []).append(i)
        self._groups = [(c, np.array(idx)) for c, idx in groups.items()]

    @classmethod
    def uniform(cls, kind, m):
        return cls([kind] * m)

    @property
    def dim(self):
        return len(self.coords)

    @property
    def kinds(self):
        return tuple(c.kind for c in self.coords)

    def __repr__(self):
        return f"LegendreFunction({list(self.kinds)!r})"

    def __eq__(self, other):
        return isinstance(other, LegendreFunction) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def _check(self, x, name="x"):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(f"{name} has shape {x.shape}, expected ({self.dim},)")
        return x

    def _map(self, x, method):
        out = np.empty_like(x)
        for c, idx in self._groups:
            out[idx] = getattr(c._t, method)(x[idx])
        return out

    def in_dom(self, x):
        x = self._check(x)
        return bool(np.all(np.isfinite(self._map(x, "value"))))

    def in_interior(self, x, margin=0.0):
        """True when every coordinate is strictly inside its interval."""
        x = self._check(x)
        return all(bool(np.all(c.in_interior(x[idx], margin))) for c, idx in self._groups)

    def in_conj_interior(self, xstar):
        xstar = self._check(xstar, "xstar")
        return all(bool(np.all(c.in_conj_interior(xstar[idx]))) for c, idx in self._groups)

    def value(self, x):
        """Return ``sum_i theta_i(x_i)``; ``+inf`` outside ``dom f``."""
        x = self._check(x)
        v = self._map(x, "value")
        if not np.all(np.isfinite(v)):
            return _INF
        return math.fsum(v)

    def coord_values(self, x):
        return self._map(self._check(x), "value")

    def grad(self, x):
        x = self._check(x)
        if not self.in_interior(x):
            raise DomainError(f"gradient of {self!r} undefined at {x!r}: "
                              "point not in int dom f")
        return self._map(x, "grad")

    def conj_grad(self, xstar):
        xstar = self._check(xstar, "xstar")
        if not self.in_conj_interior(xstar):
            raise DomainError(f"conjugate gradient of {self!r} undefined at {xstar!r}")
        return self._map(xstar, "conj_grad")

    def coord_bregman(self, x, y):
        """Vector of scalar Bregman distances ``D^{theta_i}(x_i, y_i)``."""
        x = self._check(x)
        y = self._check(y, "y")
        out = np.empty_like(x)
        for c, idx in self._groups:
            out[idx] = c.bregman(x[idx], y[idx])
        return out

    def bregman(self, x, y):
        """Bregman distance ``D^f(x, y)``, in ``[0, +inf]``.

        The coordinate terms are summed with :func:`math.fsum`, so the result
        equals the exactly rounded sum of the scalar distances.
        """
        d = self.coord_bregman(x, y)
        if not np.all(np.isfinite(d)):
            return _INF
        return math.fsum(d)


_SAMPLE_INTERIOR = {
    "boltzmann_shannon": lambda rng, n: np.exp(rng.uniform(-3.0, 3.0, n)),
    "fermi_dirac": lambda rng, n: rng.uniform(0.02, 0.98, n),
    "hellinger": lambda rng, n: rng.uniform(-0.95, 0.95, n),
    "burg": lambda rng, n: np.exp(rng.uniform(-3.0, 3.0, n)),
    "half_square": lambda rng, n: rng.uniform(-5.0, 5.0, n),
}

_SAMPLE_CONJ = {
    "boltzmann_shannon": lambda rng, n: rng.uniform(-5.0, 5.0, n),
    "fermi_dirac": lambda rng, n: rng.uniform(-8.0, 8.0, n),
    "hellinger": lambda rng, n: rng.uniform(-10.0, 10.0, n),
    "burg": lambda rng, n: -np.exp(rng.uniform(-3.0, 3.0, n)),
    "half_square": lambda rng, n: rng.uniform(-5.0, 5.0, n),
}


def sample_interior(kind, rng, size):
    """Draw ``size`` points well inside ``int dom theta`` for ``kind``."""
    return _SAMPLE_INTERIOR[str(getattr(kind, "kind", kind))](rng, size)


def sample_conj_interior(kind, rng, size):
    """Draw ``size`` points inside ``int dom theta*`` for ``kind``."""
    return _SAMPLE_CONJ[str(getattr(kind, "kind", kind))](rng, size)
