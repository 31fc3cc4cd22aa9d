"""Brute-force reference computations used to certify solver output.

Nothing here touches :mod:`bregfb.prox`, :mod:`bregfb.solver` or
:mod:`bregfb.multiblock`; the subdifferentials of the phi kinds are written
out again from their definitions instead of being imported.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .legendre import ScalarLegendre

__all__ = ["Box", "grid_refine_minimize", "phi_subdifferential", "prox_residual"]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``prod_i [lo_i, hi_i]``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("box bounds differ in length")
        for a, b in zip(lo, hi):
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise ValueError(f"box side [{a}, {b}] is empty or unbounded")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)


def grid_refine_minimize(objective, box, levels=20, points_per_axis=11, margin=2):
    """Minimize ``objective`` over ``box`` by successive grid refinement.

    Each level evaluates a uniform ``points_per_axis``-per-axis grid, then
    recenters on the incumbent with half-width ``margin`` grid pitches
    (clipped to the previous box).  For convex objectives the minimizer of
    the current box stays inside the refined box.

    Parameters
    ----------
    objective : callable
        Maps a 1-D array to a float (``+inf`` allowed).
    box : Box
    levels : int
    points_per_axis : int
    margin : float
        Half-width of the refined box in units of the current pitch.

    Returns
    -------
    point : ndarray
    value : float

    Raises
    ------
    DomainError
        If every grid point of the first level evaluates to ``+inf``/NaN.
    """
    if box.dim > 4:
        raise ValueError("grid oracle is limited to dimension <= 4")
    if points_per_axis < 3:
        raise ValueError("need at least 3 points per axis")
    lo = np.array(box.lo)
    hi = np.array(box.hi)
    best_x, best_v = None, math.inf
    for level in range(levels):
        axes = [np.linspace(a, b, points_per_axis) for a, b in zip(lo, hi)]
        vals = []
        pts = []
        # itertools.product runs in lexicographic index order
        for p in itertools.product(*axes):
            x = np.array(p)
            v = float(objective(x))
            pts.append(x)
            vals.append(v if v == v else math.inf)
        k = int(np.argmin(vals))
        if not math.isfinite(vals[k]):
            if best_x is None:
                raise DomainError("objective is +inf on every grid point of the box")
            break
        if vals[k] < best_v or best_x is None:
            best_x, best_v = pts[k], vals[k]
        pitch = (hi - lo) / (points_per_axis - 1)
        lo = np.maximum(lo, best_x - margin * pitch)
        hi = np.minimum(hi, best_x + margin * pitch)
    return best_x, best_v


def phi_subdifferential(phi, t):
    """Interval ``(lo, hi)`` equal to the subdifferential of ``phi`` at ``t``.

    Raises
    ------
    DomainError
        If the subdifferential is empty there.
    """
    kind = phi.kind
    par = dict(phi.params)

    def empty():
        raise DomainError(f"subdifferential of {kind} is empty at {t!r}")

    if kind == "zero":
        return (0.0, 0.0)
    if kind == "abs_linear":
        a = par["alpha"]
        if t == 0.0:
            return (-a, a)
        return (a, a) if t > 0 else (-a, -a)
    if kind == "power":
        p = par["p"]
        if t == 0.0:
            return (-1.0, 1.0) if p == 1.0 else (0.0, 0.0)
        g = np.sign(t) * abs(t) ** (p - 1.0)
        return (g, g)
    if kind == "linear_entropy":
        if t <= 0.0:
            empty()
        g = math.log(t) + 1.0 - par["omega"]
        return (g, g)
    if kind == "neg_power":
        if t <= 0.0:
            empty()
        g = -1.0 / t ** (par["p"] + 1.0)
        return (g, g)
    if kind == "neg_root":
        if t <= 0.0:
            empty()
        g = -1.0 / t ** (1.0 - par["p"])
        return (g, g)
    if kind in ("mirror_entropy", "one_minus_log"):
        if t >= 1.0:
            empty()
        # d/dt[(1-t) log(1-t)] = -log(1-t) - 1
        g = -math.log(1.0 - t) - 1.0
        g += par["omega"] if kind == "mirror_entropy" else 1.0
        return (g, g)
    if kind == "self_hellinger":
        if not -1.0 < t < 1.0:
            empty()
        g = t / math.sqrt(1.0 - t * t)
        return (g, g)
    if kind == "burg":
        if t <= 0.0:
            empty()
        return (-1.0 / t, -1.0 / t)
    raise ValueError(f"unknown phi kind {kind!r}")


def prox_residual(legendre, phi, gamma, xi, eta):
    """Distance from ``xi`` to ``theta'(eta) + gamma * d phi(eta)``.

    Zero exactly when ``eta`` is the Bregman prox of ``gamma phi`` at ``xi``.
    """
    if not isinstance(legendre, ScalarLegendre):
        legendre = ScalarLegendre(legendre)
    if not legendre.in_interior(eta):
        raise DomainError(f"eta={eta!r} not in int dom {legendre.kind}")
    lo, hi = phi_subdifferential(phi, float(eta))
    base = float(legendre.grad(eta))
    lo, hi = base + gamma * lo, base + gamma * hi
    if xi < lo:
        return lo - xi
    if xi > hi:
        return xi - hi
    return 0.0
