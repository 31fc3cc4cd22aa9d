"""Tour of the Bregman prox catalog.

For each closed form we evaluate the prox at a few points, check the
first-order condition theta'(eta) + gamma * d phi(eta) ∋ xi with the
independent oracle, and compare with the numeric root-finding path.

    python3 demos/prox_catalog_tour.py
"""

import numpy as np

from bregfb import lambert_w0, make_phi, prox_numeric_scalar, prox_residual
from bregfb.prox import CORE_CLOSED_FORMS, prox_closed_form_table

# Lambert W drives three of the Boltzmann-Shannon entries
print("W(1) =", lambert_w0(1.0), " W(e) =", lambert_w0(np.e))

params = {
    "linear_entropy": {"omega": 0.5},
    "power": {"p": 2.0},
    "neg_power": {"p": 1.0},
    "neg_root": {"p": 0.5},
    "abs_linear": {"alpha": 1.0},
}

print(f"\n{'entry':38s} {'xi':>7s} {'eta':>12s} {'residual':>9s} {'|num-cf|':>9s}")
for cf in prox_closed_form_table():
    if cf.name not in CORE_CLOSED_FORMS:
        continue
    kw = params.get(cf.phi, {})
    if cf.name.endswith("p=1"):
        kw = {"p": 1.0}
    phi = make_phi(cf.phi, **kw)
    gamma = 1.0 if cf.unit_gamma else 0.5
    lo, hi = cf.domain(phi, gamma)
    # three inputs inside the valid half-line or on a symmetric range
    xis = [hi - 4.0, hi - 1.0, hi - 0.1] if np.isfinite(hi) else [-2.0, 0.0, 2.0]
    for xi in xis:
        eta = float(cf.evaluate(np.array([xi]), phi, gamma)[0])
        res = prox_residual(cf.legendre, phi, gamma, xi, eta)
        num = prox_numeric_scalar(cf.legendre, phi, gamma, xi)
        print(f"{cf.name:38s} {xi:7.2f} {eta:12.6g} {res:9.1e} {abs(num - eta):9.1e}")

# Pairs with no closed form go through the numeric path
phi = make_phi("burg")
eta = prox_numeric_scalar("hellinger", phi, 0.7, 1.0)
print("\nhellinger / burg (numeric):", eta,
      "residual", prox_residual("hellinger", phi, 0.7, 1.0, eta))
