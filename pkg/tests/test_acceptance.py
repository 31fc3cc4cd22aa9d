"""Acceptance gate: ten criteria at their stated tolerances.

Each test records a one-line PASS/FAIL summary, printed at the end of the
pytest run.  Running this file directly prints the same lines without pytest.
"""

import math
import time

import numpy as np
import pytest

from bregfb import (Box, CompositeProblem, LegendreFunction, ScalarLegendre, BregmanFidelity,
                    StepSchedule, StopReason, build_is_regression, build_kl_regression,
                    check_trace_inequalities, flatten, grid_refine_minimize, lambert_w0,
                    make_phi, mb_solve, prox_numeric_scalar, prox_residual, solve,
                    subadditivity_check, validate_schedule)
from bregfb.legendre import KINDS, sample_interior
from bregfb.prox import CORE_CLOSED_FORMS, prox_closed_form_table

try:
    from conftest import record_criterion
except ImportError:  # run as a script from elsewhere
    def record_criterion(number, ok, detail):
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}")

SEED = 20261016


# -- shared instances ---------------------------------------------------------

def kl_toy():
    """min_x D_KL(2x, 6); minimizer x = 3, beta = 1/2."""
    return flatten(build_kl_regression([[2.0]], [6.0], "zero"))


def is_toy():
    """min_x |x| + D_IS(x, 1); minimizer x = 1/2, value ln 2."""
    return flatten(build_is_regression([[1.0]], [1.0], "abs_linear(alpha=1)"))


KL_SCHEDULE = StepSchedule(gammas=0.25, beta=0.5, eps=0.1)
IS_SCHEDULE = StepSchedule(gammas=0.45, beta=1.0, eps=0.1)

IS_BLOCKS = dict(omega=[[1.0, 0.2], [0.3, 1.0]], rho=[3.0, 2.0],
                 phis=["abs_linear(alpha=0.1)", "burg"])
KL_BLOCKS = dict(omega=[[1.0, 2.0], [0.5, 1.5]], rho=[3.0, 2.0],
                 phis=["linear_entropy(omega=1)", "power(p=2)"])


def _samples(cf, rng, n):
    """Parameter, step and in-domain input draws for one closed-form entry."""
    params = {
        "boltzmann_shannon/linear_entropy": ("linear_entropy", {"omega": 0.7}),
        "boltzmann_shannon/power": ("power", {"p": 2.5}),
        "boltzmann_shannon/power/p=1": ("power", {"p": 1.0}),
        "boltzmann_shannon/neg_power": ("neg_power", {"p": 2.0}),
        "boltzmann_shannon/neg_root": ("neg_root", {"p": 0.5}),
        "fermi_dirac/linear_entropy": ("linear_entropy", {"omega": 1.3}),
        "fermi_dirac/one_minus_log": ("one_minus_log", {}),
        "hellinger/self_hellinger": ("self_hellinger", {}),
        "burg/burg": ("burg", {}),
        "burg/abs_linear": ("abs_linear", {"alpha": 1.5}),
        "half_square/zero": ("zero", {}),
    }[cf.name]
    phi = make_phi(params[0], **params[1])
    gamma = 1.0 if cf.unit_gamma else float(rng.uniform(0.2, 3.0))
    lo, hi = cf.domain(phi, gamma)
    if math.isfinite(hi):
        xi = hi - np.exp(rng.uniform(-6.0, 3.0, n))
    else:
        xi = rng.uniform(-10.0, 10.0, n)
    return phi, gamma, xi


# -- criteria -----------------------------------------------------------------

def test_c01_prox_catalog_stationarity():
    rng = np.random.default_rng(SEED)
    table = [cf for cf in prox_closed_form_table() if cf.name in CORE_CLOSED_FORMS]
    assert len(table) == 11
    worst, worst_name = 0.0, ""
    t0 = time.perf_counter()
    for cf in table:
        phi, gamma, xi = _samples(cf, rng, 1000)
        eta = cf.evaluate(xi, phi, gamma)
        for a, b in zip(xi, eta):
            r = prox_residual(cf.legendre, phi, gamma, float(a), float(b))
            if r > worst:
                worst, worst_name = r, cf.name
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 2.0
    record_criterion(1, ok, f"11 entries x 1000 inputs, max residual {worst:.2e} "
                            f"({worst_name or 'all zero'}), {elapsed:.2f} s")
    assert worst <= 1e-9
    assert elapsed < 2.0


def test_c02_lambert_w_grid():
    x = -math.exp(-1.0) + np.logspace(-12, math.log10(1e6 + math.exp(-1.0)), 10_000)
    t0 = time.perf_counter()
    w = lambert_w0(x)
    elapsed = time.perf_counter() - t0
    rel = np.abs(w * np.exp(w) - x) / np.maximum(1.0, np.abs(x))
    ok = rel.max() <= 1e-12 and elapsed < 1.0
    record_criterion(2, ok, f"10^4-point grid, max scaled residual {rel.max():.2e}, "
                            f"{elapsed * 1e3:.1f} ms")
    assert rel.max() <= 1e-12
    assert elapsed < 1.0


def test_c03_closed_form_vs_numeric():
    rng = np.random.default_rng(SEED + 3)
    worst, worst_name = 0.0, ""
    for cf in prox_closed_form_table():
        if cf.name not in CORE_CLOSED_FORMS:
            continue
        phi, gamma, xi = _samples(cf, rng, 100)
        closed = cf.evaluate(xi, phi, gamma)
        theta = ScalarLegendre(cf.legendre)
        for a, b in zip(xi, closed):
            d = abs(prox_numeric_scalar(theta, phi, gamma, float(a)) - b)
            if d > worst:
                worst, worst_name = d, cf.name
    record_criterion(3, worst <= 1e-8, f"11 entries x 100 inputs, max |closed - numeric| "
                                       f"{worst:.2e} ({worst_name or '-'})")
    assert worst <= 1e-8


def test_c04_legendre_gradient_checks():
    rng = np.random.default_rng(SEED + 4)
    fd_err = inv_err = tp_err = 0.0
    for kind in KINDS:
        th = ScalarLegendre(kind)
        x = sample_interior(kind, rng, 64)
        y = sample_interior(kind, rng, 64)
        g = th.grad(x)
        # relative step keeps the stencil inside the domain
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        if kind in ("fermi_dirac", "hellinger"):
            h = np.full_like(x, 1e-7)
        fd = (th.value(x + h) - th.value(x - h)) / (2.0 * h)
        fd_err = max(fd_err, float(np.max(np.abs(fd - g) / np.maximum(1.0, np.abs(g)))))
        inv_err = max(inv_err, float(np.max(np.abs(th.conj_grad(g) - x))))
        lhs = (x - y) * (th.grad(x) - th.grad(y))
        rhs = th.bregman(x, y) + th.bregman(y, x)
        tp_err = max(tp_err, float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs)))))
    ok = fd_err <= 1e-6 and inv_err <= 1e-10 and tp_err <= 1e-10
    record_criterion(4, ok, f"5 kinds x 64 samples: finite-difference {fd_err:.1e}, "
                            f"inversion {inv_err:.1e}, three-point {tp_err:.1e}")
    assert fd_err <= 1e-6
    assert inv_err <= 1e-10
    assert tp_err <= 1e-10


def test_c05_kl_toy():
    p = kl_toy()
    t0 = time.perf_counter()
    rep, trace = solve(p, KL_SCHEDULE, [1.0], tol=1e-10, max_iter=200, x_ref=[3.0])
    diag = check_trace_inequalities(p, KL_SCHEDULE, trace, [3.0],
                                    objective_tol=1e-12, bregman_tol=1e-10)
    elapsed = time.perf_counter() - t0
    err = abs(rep.x[0] - 3.0)
    ok = (err <= 1e-6 and rep.iterations <= 200 and diag.ok and elapsed < 0.1)
    record_criterion(5, ok, f"|x_N - 3| = {err:.1e} at N = {rep.iterations}, objective slack "
                            f"{diag.objective_slack:.1e}, Bregman slack "
                            f"{diag.bregman_slack:.1e}, {elapsed * 1e3:.1f} ms")
    assert rep.stop_reason is StopReason.TOLERANCE
    assert err <= 1e-6 and rep.iterations <= 200
    assert diag.objective_ok and diag.bregman_ok
    assert elapsed < 0.1


def test_c06_is_toy():
    p = is_toy()
    t0 = time.perf_counter()
    rep, _ = solve(p, IS_SCHEDULE, [1.0], tol=1e-12, max_iter=1000)
    elapsed = time.perf_counter() - t0
    _, v_oracle = grid_refine_minimize(p.objective, Box((0.05,), (5.0,)), levels=30)
    err_x = abs(rep.x[0] - 0.5)
    err_v = abs(rep.objective - v_oracle)
    ok = err_x <= 1e-6 and err_v <= 1e-8 and elapsed < 0.1
    record_criterion(6, ok, f"|x - 0.5| = {err_x:.1e}, |Phi - oracle| = {err_v:.1e} "
                            f"({rep.iterations} iterations, {elapsed * 1e3:.1f} ms)")
    assert err_x <= 1e-6
    assert err_v <= 1e-8
    assert elapsed < 0.1


def _run_block_instance(mb, lo, hi):
    s = StepSchedule.constant(mb.beta)
    rep, trace = mb_solve(mb, s, np.ones(mb.m), tol=1e-12, max_iter=5000)
    rep_f, trace_f = solve(flatten(mb), s, np.ones(mb.m), tol=1e-12, max_iter=5000)
    identical = (trace.to_csv(blocks=True) == trace_f.to_csv(blocks=True)
                 and np.array_equal(rep.x, rep_f.x))
    _, v_oracle = grid_refine_minimize(mb.objective, Box((lo,) * mb.m, (hi,) * mb.m))
    return rep, abs(rep.objective - v_oracle), identical


def test_c07_multiblock_desk_instances():
    t0 = time.perf_counter()
    is_mb = build_is_regression(**IS_BLOCKS)
    kl_mb = build_kl_regression(**KL_BLOCKS)
    rep_is, gap_is, same_is = _run_block_instance(is_mb, 0.05, 10.0)
    rep_kl, gap_kl, same_kl = _run_block_instance(kl_mb, 0.01, 5.0)
    elapsed = time.perf_counter() - t0
    ok = (gap_is <= 1e-5 and gap_kl <= 1e-5 and same_is and same_kl and elapsed < 5.0
          and rep_is.stop_reason is StopReason.TOLERANCE
          and rep_kl.stop_reason is StopReason.TOLERANCE)
    record_criterion(7, ok, f"IS gap {gap_is:.1e} ({rep_is.iterations} it), KL gap "
                            f"{gap_kl:.1e} ({rep_kl.iterations} it), traces identical: "
                            f"{same_is and same_kl}, {elapsed:.2f} s")
    assert rep_is.stop_reason is StopReason.TOLERANCE
    assert rep_kl.stop_reason is StopReason.TOLERANCE
    assert gap_is <= 1e-5 and gap_kl <= 1e-5
    assert same_is and same_kl
    assert elapsed < 5.0


def test_c08_subadditivity():
    rng = np.random.default_rng(SEED + 8)
    worst = {}
    for kind in ("kullback_leibler", "itakura_saito"):
        w = -math.inf
        for m in range(1, 7):
            xis = np.exp(rng.uniform(-3.0, 3.0, (1000, m)))
            etas = np.exp(rng.uniform(-3.0, 3.0, (1000, m)))
            w = max(w, subadditivity_check(kind, xis, etas))
        worst[kind] = w
    ok = all(v <= 1e-12 for v in worst.values())
    record_criterion(8, ok, f"1000 tuples per m = 1..6: worst slack KL "
                            f"{worst['kullback_leibler']:.1e}, IS "
                            f"{worst['itakura_saito']:.1e}")
    assert ok


def test_c09_schedule_validator():
    canonical = [KL_SCHEDULE, IS_SCHEDULE,
                 StepSchedule.constant(build_is_regression(**IS_BLOCKS).beta),
                 StepSchedule.constant(build_kl_regression(**KL_BLOCKS).beta)]
    accepts = all(not validate_schedule(s, 1000) for s in canonical)

    at_beta = validate_schedule(StepSchedule(gammas=0.5, beta=0.5, eps=0.1), 50)
    every_n = sorted(v.index for v in at_beta) == list(range(50))
    upper = all(v.inequality == "gamma_n <= k*(1-eps)" for v in at_beta)

    counter = StepSchedule(gammas=[0.3, 0.2], beta=1.0, eps=0.1, etas=[0.1])
    bad = validate_schedule(counter, 1)
    exact = (len(bad) == 1 and bad[0].index == 0
             and bad[0].inequality == "(1+eta_n)*gamma_n - gamma_{n+1} <= k*eta_n"
             and math.isclose(bad[0].lhs, 0.13) and math.isclose(bad[0].rhs, 0.1))
    ok = accepts and every_n and upper and exact
    record_criterion(9, ok, f"canonical accepted: {accepts}; gamma = beta rejected at every "
                            f"n: {every_n and upper}; counterexample: "
                            f"{bad[0] if bad else 'not rejected'}")
    assert accepts
    assert every_n and upper
    assert exact


def test_c10_fixed_point():
    disp = {}
    for name, p, s, x in (("KL", kl_toy(), KL_SCHEDULE, 3.0),
                          ("IS", is_toy(), IS_SCHEDULE, 0.5)):
        rep, trace = solve(p, s, [x], tol=1e-12, max_iter=100)
        disp[name] = (rep.iterations, trace.displacement[-1])
    ok = all(it == 1 and d <= 1e-12 for it, d in disp.values())
    record_criterion(10, ok, "; ".join(f"{k}: stopped after {it} step, displacement {d:.1e}"
                                       for k, (it, d) in disp.items()))
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
