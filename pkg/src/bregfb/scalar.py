"""Scalar special functions and a safeguarded monotone root solver.

These kernels back every closed-form and numeric Bregman proximity
operator in the package.  They are pure functions of their inputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError

__all__ = [
    "BRANCH_POINT",
    "Bracket",
    "lambert_w0",
    "lambert_w0_exp",
    "solve_monotone_scalar",
]

#: Left end of the principal branch, ``-1/e`` rounded to double.
BRANCH_POINT = -math.exp(-1.0)

_MAX_HALLEY = 50


@dataclass(frozen=True)
class Bracket:
    """Closed interval ``[lo, hi]`` known to contain a root."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")


# -1/e = BRANCH_POINT + _BRANCH_TAIL to about 1e-33
_BRANCH_TAIL = 1.2428753672788363e-17
# W(-1/e + d) = -1 + p - p^2/3 + ... with p = sqrt(2 e d)
_BRANCH_SERIES = (-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0,
                  769.0 / 17280.0, -221.0 / 8505.0)
# below this p the truncated series beats Halley, whose residual
# w e^w - x cannot resolve w + 1 better than ulp(x) / (w + 1)
_SERIES_P = 1e-3


def _branch_p(x):
    d = (x - BRANCH_POINT) - _BRANCH_TAIL
    return np.sqrt(np.maximum(2.0 * math.e * d, 0.0))


def _branch_series(p):
    return np.polynomial.polynomial.polyval(p, _BRANCH_SERIES)


def _w0_initial(x):
    w = np.empty_like(x)
    near = x < -0.25
    mid = (x >= -0.25) & (x <= math.e)
    far = x > math.e
    w[near] = _branch_series(_branch_p(x[near]))
    w[mid] = np.log1p(x[mid])
    l1 = np.log(x[far])
    l2 = np.log(l1)
    w[far] = l1 - l2 + l2 / l1
    return w


def lambert_w0(x):
    """Principal branch of the Lambert W function.

    Solves ``w * exp(w) = x`` for ``w >= -1`` by Halley iteration from a
    piecewise initial guess.

    Parameters
    ----------
    x : float or array_like
        Arguments, all ``>= -1/e``.

    Returns
    -------
    float or ndarray
        ``W(x)``; a Python float when ``x`` is a scalar.

    Raises
    ------
    DomainError
        If any argument lies below ``-1/e``.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    if np.any(flat < BRANCH_POINT):
        bad = flat[flat < BRANCH_POINT][0]
        raise DomainError(f"lambert_w0 needs x >= -1/e, got {float(bad)!r}")

    w = np.full_like(flat, np.nan)
    finite = np.isfinite(flat)
    w[flat == np.inf] = np.inf
    w[flat == BRANCH_POINT] = -1.0
    active = finite & (flat != BRANCH_POINT)
    xa = flat[active]
    wa = _w0_initial(xa)
    live = np.ones(xa.shape, dtype=bool)
    close = xa < -0.25
    live[close] = _branch_p(xa[close]) >= _SERIES_P

    for _ in range(_MAX_HALLEY):
        ew = np.exp(wa)
        f = wa * ew - xa
        wp1 = wa + 1.0
        denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
        step = np.zeros_like(wa)
        step[live] = f[live] / denom[live]
        wa = wa - step
        if np.all(np.abs(step) <= 4.0 * np.finfo(float).eps * (1.0 + np.abs(wa))):
            break
    w[active] = wa

    if scalar:
        return float(w[0])
    return w.reshape(x.shape)


def lambert_w0_exp(s):
    """Evaluate ``W(exp(s))`` without overflowing ``exp``.

    For large ``s`` the equation ``w + log(w) = s`` is solved by Newton's
    method; otherwise this defers to :func:`lambert_w0`.  Callers that need
    ``log W`` should use the identity ``log W(e^s) = s - W(e^s)``.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float)).ravel()
    w = np.empty_like(s)
    small = s <= 20.0
    w[small] = lambert_w0(np.exp(s[small]))
    big = ~small
    if np.any(big):
        sb = s[big]
        wb = sb - np.log(sb)
        for _ in range(_MAX_HALLEY):
            step = (wb + np.log(wb) - sb) / (1.0 + 1.0 / wb)
            wb = wb - step
            if np.all(np.abs(step) <= 4.0 * np.finfo(float).eps * wb):
                break
        w[big] = wb
    if scalar:
        return float(w[0])
    return w


def _midpoint(lo, hi):
    # geometric midpoint on wide one-signed brackets, else arithmetic
    if lo > 0.0 and hi > 4.0 * lo:
        return math.sqrt(lo) * math.sqrt(hi)
    if hi < 0.0 and lo < 4.0 * hi:
        return -math.sqrt(-lo) * math.sqrt(-hi)
    return lo + 0.5 * (hi - lo)


def solve_monotone_scalar(g, target, bracket, tol=1e-12, dg=None, max_iter=500):
    """Find ``t`` in ``bracket`` with ``|g(t) - target| <= tol``.

    ``g`` must be continuous and strictly increasing on the bracket.  The
    search is bisection, accelerated by Newton steps whenever ``dg`` (the
    derivative of ``g``) is supplied and the Newton point stays strictly
    inside the current bracket.

    Parameters
    ----------
    g : callable
        Strictly increasing scalar function.
    target : float
        Value to hit.
    bracket : Bracket or tuple of float
        Interval ``[lo, hi]`` with ``g(lo) <= target <= g(hi)``.
    tol : float
        Absolute residual tolerance.
    dg : callable, optional
        Derivative of ``g``.
    max_iter : int
        Iteration cap.

    Returns
    -------
    float

    Raises
    ------
    BracketError
        If ``target`` is not between ``g(lo)`` and ``g(hi)``.
    ConvergenceError
        If the residual tolerance is not met; ``best`` holds the closest point.
    """
    if not isinstance(bracket, Bracket):
        bracket = Bracket(*bracket)
    lo, hi = float(bracket.lo), float(bracket.hi)
    rlo = g(lo) - target
    rhi = g(hi) - target
    if abs(rlo) <= tol:
        return lo
    if abs(rhi) <= tol:
        return hi
    if not (rlo < 0.0 < rhi):
        raise BracketError(
            f"target {target!r} not bracketed: g({lo!r})={rlo + target!r}, "
            f"g({hi!r})={rhi + target!r}",
            bracket=(lo, hi),
        )

    best, best_r = (lo, rlo) if abs(rlo) < abs(rhi) else (hi, rhi)
    t = _midpoint(lo, hi)
    width = hi - lo
    for _ in range(max_iter):
        r = g(t) - target
        if abs(r) < abs(best_r):
            best, best_r = t, r
        if abs(r) <= tol:
            return t
        if r < 0.0:
            lo = t
        else:
            hi = t
        if dg is not None:
            d = dg(t)
            tn = t - r / d if d > 0.0 else math.nan
            # Newton only while it keeps halving the bracket
            if lo < tn < hi and (hi - lo) <= 0.5 * width:
                width = hi - lo
                t = tn
                continue
        width = hi - lo
        mid = _midpoint(lo, hi)
        if mid <= lo or mid >= hi:
            break
        t = mid
    raise ConvergenceError(
        f"no point with residual <= {tol:g} found; best t={best!r} "
        f"with residual {best_r:.3g}",
        best=best,
    )
