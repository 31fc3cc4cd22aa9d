import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bregfb import Bracket, lambert_w0, lambert_w0_exp, solve_monotone_scalar
from bregfb.errors import BracketError, ConvergenceError, DomainError
from bregfb.scalar import BRANCH_POINT


@pytest.mark.parametrize("x, w", [
    (0.0, 0.0),
    (math.e, 1.0),
    (BRANCH_POINT, -1.0),
    (1.0, 0.5671432904097838),
])
def test_lambert_w0_known_values(x, w):
    assert lambert_w0(x) == pytest.approx(w, abs=1e-12)


def test_lambert_w0_omega_constant_by_bisection():
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mid * math.exp(mid) < 1.0 else (lo, mid)
    assert abs(lambert_w0(1.0) - lo) <= 1e-14


def test_lambert_w0_rejects_below_branch_point():
    with pytest.raises(DomainError):
        lambert_w0(-0.5)
    with pytest.raises(DomainError):
        lambert_w0(np.array([0.0, -1.0]))


def test_lambert_w0_scalar_and_array_types():
    assert isinstance(lambert_w0(2.0), float)
    out = lambert_w0(np.array([[0.0, 1.0], [2.0, 3.0]]))
    assert out.shape == (2, 2)


def test_lambert_w0_monotone_on_grid():
    x = BRANCH_POINT + np.logspace(-14, 7, 5000)
    w = lambert_w0(x)
    assert np.all(np.diff(w) >= 0.0)
    assert np.all(w >= -1.0)


def test_lambert_w0_near_branch_point():
    x = BRANCH_POINT + np.logspace(-15, -3, 50)
    # offset from the true -1/e, which sits 1.24e-17 above BRANCH_POINT
    d = (x - BRANCH_POINT) - 1.2428753672788363e-17
    p = np.sqrt(2.0 * math.e * d)
    w = lambert_w0(x)
    assert np.all(np.abs(w - (-1.0 + p - p * p / 3.0)) <= p ** 3 + 2.5e-16)


@given(st.floats(min_value=-700.0, max_value=700.0))
def test_lambert_w0_exp_matches_direct(s):
    w = lambert_w0_exp(s)
    # w + ln w = s is the defining relation of W(e^s)
    assert w > 0.0
    assert abs(w + math.log(w) - s) <= 1e-12 * max(1.0, abs(s))


def test_lambert_w0_exp_huge_argument():
    w = lambert_w0_exp(1e5)
    assert w + math.log(w) == pytest.approx(1e5, rel=1e-15)


def test_bracket_validates():
    with pytest.raises(ValueError):
        Bracket(1.0, 1.0)
    assert Bracket(0.0, 2.0).hi == 2.0


@pytest.mark.parametrize("g, target, bracket, expect", [
    (lambda t: t, 0.5, (0.0, 1.0), 0.5),
    (lambda t: t ** 3, 8.0, (0.0, 3.0), 2.0),
    (lambda t: t + math.log(t), 1.0, (0.1, 2.0), 1.0),
])
def test_solve_monotone_examples(g, target, bracket, expect):
    t = solve_monotone_scalar(g, target, bracket, tol=1e-12)
    assert abs(g(t) - target) <= 1e-12
    assert t == pytest.approx(expect, abs=1e-10)


def test_solve_monotone_with_derivative():
    t = solve_monotone_scalar(lambda t: t ** 3, 8.0, (0.0, 3.0), dg=lambda t: 3 * t * t)
    assert t == pytest.approx(2.0, abs=1e-12)


def test_solve_monotone_bracket_error():
    with pytest.raises(BracketError) as exc:
        solve_monotone_scalar(lambda t: t, 5.0, (0.0, 1.0))
    assert exc.value.bracket == (0.0, 1.0)


def test_solve_monotone_reports_best_on_cap():
    with pytest.raises(ConvergenceError) as exc:
        solve_monotone_scalar(lambda t: t ** 3, 2.0, (0.0, 3.0), tol=1e-300, max_iter=3)
    assert 0.0 <= exc.value.best <= 3.0


@given(st.lists(st.floats(min_value=0.01, max_value=5.0), min_size=1, max_size=4),
       st.floats(min_value=-1.0, max_value=1.0))
def test_solve_monotone_random_polynomials(coefs, frac):
    # odd powers with positive coefficients: strictly increasing on R
    def g(t):
        return sum(c * t ** (2 * k + 1) for k, c in enumerate(coefs))

    target = g(2.0 * frac)
    t = solve_monotone_scalar(g, target, (-2.5, 2.5), tol=1e-10)
    assert -2.5 <= t <= 2.5
    assert abs(g(t) - target) <= 1e-10
