import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bregfb import (LegendreFunction, ProxOperator, ScalarLegendre, lookup_closed_form,
                    make_phi, prox_apply, prox_numeric_scalar, prox_residual, prox_scalar)
from bregfb.errors import BracketError, DomainError
from bregfb.legendre import KINDS, sample_conj_interior
from bregfb.prox import CORE_CLOSED_FORMS, prox_closed_form_table


@pytest.mark.parametrize("legendre, phi, gamma, xi, eta", [
    ("hellinger", make_phi("self_hellinger"), 1.0, 3.0, 3.0 / math.sqrt(13.0)),
    ("hellinger", make_phi("self_hellinger"), 2.7, 0.0, 0.0),
    ("boltzmann_shannon", make_phi("power", p=2.0), 1.0, 1.0, 1.0),
    ("boltzmann_shannon", make_phi("power", p=1.0), 1.0, 1.0, 1.0),
    ("fermi_dirac", make_phi("linear_entropy", omega=1.0), 1.0, 0.0, (math.sqrt(5) - 1) / 2),
    ("fermi_dirac", make_phi("one_minus_log"), 1.0, 0.0, (3 - math.sqrt(5)) / 2),
    ("burg", make_phi("abs_linear", alpha=1.0), 1.0, -1.0, 0.5),
    ("burg", make_phi("burg"), 1.0, -8.0, 0.25),
])
def test_catalog_examples(legendre, phi, gamma, xi, eta):
    got = prox_scalar(legendre, phi, gamma, xi)
    assert got == pytest.approx(eta, abs=1e-12)
    assert prox_residual(legendre, phi, gamma, xi, got) <= 1e-12


@pytest.mark.parametrize("legendre, xi, eta", [
    ("burg", -2.0, 0.5),
    ("boltzmann_shannon", 0.0, 1.0),
])
def test_numeric_zero_phi_is_conjugate_gradient(legendre, xi, eta):
    assert prox_numeric_scalar(legendre, make_phi("zero"), 1.0, xi) == pytest.approx(eta)


def test_table_shape():
    table = prox_closed_form_table()
    assert len(CORE_CLOSED_FORMS) == 11
    names = [cf.name for cf in table]
    assert len(set(names)) == len(names)
    assert set(CORE_CLOSED_FORMS) <= set(names)


def test_lookup():
    cf = lookup_closed_form("boltzmann_shannon", make_phi("power", p=1.5))
    assert cf.name == "boltzmann_shannon/power" and "W(" in cf.formula
    assert lookup_closed_form("boltzmann_shannon", make_phi("power", p=1.0)).name.endswith("p=1")
    assert lookup_closed_form("hellinger", make_phi("burg")) is None
    cf = lookup_closed_form("burg", make_phi("abs_linear", alpha=2.0))
    assert cf.domain(make_phi("abs_linear", alpha=2.0), 0.5) == (-math.inf, 1.0)
    assert lookup_closed_form("burg", "abs_linear").name == "burg/abs_linear"


def test_lookup_respects_unit_gamma():
    phi = make_phi("linear_entropy", omega=1.0)
    assert lookup_closed_form("fermi_dirac", phi, 1.0) is not None
    assert lookup_closed_form("fermi_dirac", phi, 2.0) is None
    # the numeric path takes over and still satisfies stationarity
    eta = prox_scalar("fermi_dirac", phi, 2.0, 0.3)
    assert prox_residual("fermi_dirac", phi, 2.0, 0.3, eta) <= 1e-10


def test_derived_forms_at_non_unit_gamma():
    # exp((xi + gamma (omega - 1)) / (gamma + 1)), not exp((xi + omega - 1)/(gamma + 1))
    phi = make_phi("linear_entropy", omega=3.0)
    eta = prox_scalar("boltzmann_shannon", phi, 2.0, 0.5)
    assert eta == pytest.approx(math.exp((0.5 + 2.0 * 2.0) / 3.0))
    assert prox_residual("boltzmann_shannon", phi, 2.0, 0.5, eta) <= 1e-12
    # -(1 + gamma) / xi, not -xi / (1 + gamma)
    eta = prox_scalar("burg", make_phi("burg"), 3.0, -2.0)
    assert eta == pytest.approx(2.0)


@pytest.mark.parametrize("legendre, phi, xi", [
    ("burg", make_phi("burg"), 0.5),
    ("burg", make_phi("burg"), 0.0),
    ("burg", make_phi("abs_linear", alpha=1.0), 1.0),
    ("burg", make_phi("zero"), 0.0),
])
def test_prox_domain_errors(legendre, phi, xi):
    with pytest.raises(DomainError):
        prox_scalar(legendre, phi, 1.0, xi)


def test_numeric_bracket_failure():
    # burg + neg_root: theta' + gamma phi' < 0 everywhere, so xi = 1 is unreachable
    with pytest.raises(BracketError):
        prox_numeric_scalar("burg", make_phi("neg_root", p=0.5), 1.0, 1.0)


def test_numeric_kink():
    # xi inside the subdifferential interval at 0 gives eta = 0 for half_square
    phi = make_phi("abs_linear", alpha=1.0)
    assert prox_numeric_scalar("half_square", phi, 1.0, 0.7) == 0.0
    assert prox_numeric_scalar("half_square", phi, 1.0, 2.0) == pytest.approx(1.0)
    assert prox_numeric_scalar("half_square", phi, 1.0, -2.0) == pytest.approx(-1.0)


PAIRS = [(k, q) for k in KINDS for q in (
    make_phi("zero"), make_phi("power", p=2.0), make_phi("abs_linear", alpha=0.5),
    make_phi("linear_entropy", omega=0.2), make_phi("self_hellinger"),
)]


def _in_prox_domain(kind, phi, gamma, xi):
    if kind != "burg":
        return True
    bound = {"zero": 0.0, "abs_linear": gamma * 0.5, "power": math.inf,
             "linear_entropy": math.inf, "self_hellinger": math.inf}[phi.kind]
    return xi < bound


@pytest.mark.parametrize("kind, phi", PAIRS, ids=lambda v: str(v))
def test_range_and_residual_invariants(kind, phi):
    rng = np.random.default_rng(7)
    th = ScalarLegendre(kind)
    for xi in rng.uniform(-6.0, 6.0, 40):
        gamma = float(rng.uniform(0.1, 3.0))
        if not _in_prox_domain(kind, phi, gamma, xi):
            continue
        eta = prox_scalar(th, phi, gamma, xi)
        assert th.in_interior(eta)
        assert math.isfinite(phi.value(eta))
        assert prox_residual(th, phi, gamma, xi, eta) <= 1e-9 * max(1.0, abs(xi))


def test_vector_prox_equals_scalar_proxes_exactly():
    kinds = ["boltzmann_shannon", "burg", "hellinger", "fermi_dirac", "half_square"]
    phis = [make_phi("power", p=2.0), make_phi("abs_linear", alpha=1.0),
            make_phi("self_hellinger"), make_phi("one_minus_log"), make_phi("zero")]
    op = ProxOperator(LegendreFunction(kinds), phis, 1.0)
    xstar = np.array([0.3, -2.0, 1.5, -0.4, 2.0])
    out = prox_apply(op, xstar)
    for i in range(5):
        assert out[i] == prox_scalar(kinds[i], phis[i], 1.0, xstar[i])
    assert op.closed_form_mask.tolist() == [True, True, True, True, True]


def test_operator_mixed_closed_and_numeric():
    op = ProxOperator(LegendreFunction(["hellinger", "hellinger"]),
                      [make_phi("self_hellinger"), make_phi("burg")], 0.5)
    assert op.closed_form_mask.tolist() == [True, False]
    out = prox_apply(op, np.array([1.0, 1.0]))
    assert prox_residual("hellinger", make_phi("burg"), 0.5, 1.0, out[1]) <= 1e-10


def test_operator_rejects_nonpositive_gamma():
    with pytest.raises(ValueError):
        ProxOperator(LegendreFunction(["burg"]), [make_phi("zero")], 0.0)


@given(st.floats(min_value=-30.0, max_value=30.0), st.floats(min_value=0.05, max_value=20.0))
def test_bs_power_closed_form_matches_numeric(xi, gamma):
    phi = make_phi("power", p=3.0)
    a = prox_scalar("boltzmann_shannon", phi, gamma, xi)
    b = prox_numeric_scalar("boltzmann_shannon", phi, gamma, xi)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


@given(st.floats(min_value=-50.0, max_value=50.0), st.floats(min_value=0.05, max_value=20.0))
def test_hellinger_self_odd_and_bounded(xi, gamma):
    phi = make_phi("self_hellinger")
    eta = prox_scalar("hellinger", phi, gamma, xi)
    assert -1.0 < eta < 1.0
    assert prox_scalar("hellinger", phi, gamma, -xi) == -eta


@pytest.mark.parametrize("kind", KINDS)
def test_zero_phi_inverts_gradient(kind):
    rng = np.random.default_rng(11)
    th = ScalarLegendre(kind)
    s = sample_conj_interior(kind, rng, 50)
    eta = prox_scalar(th, make_phi("zero"), 1.7, s)
    assert np.allclose(eta, th.conj_grad(s), rtol=1e-12, atol=1e-14)
