"""A walk through the kernel Lambda_n: closed form, sphere average, split."""
from __future__ import annotations

import numpy as np

from dfrqft.kernel import beta_pair, lambda_closed, lambda_quadrature, lambda_split, sphere_quadrature

# Two momenta: a pure energy and a pure x-momentum. One pair, one boost term.
k = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
b = beta_pair(k, lambda_p=1.0)
print("v+ =", b.v_plus, " v- =", b.v_minus)
print("beta+ = %.3f  beta- = %.3f" % (b.beta_plus, b.beta_minus))

# The closed form against a brute-force average of the twist phase over both sheets.
for order in (8, 16, 32, 64):
    q = lambda_quadrature(k, 1.0, sphere_quadrature(order))
    print(f"order {order:3d}: quadrature {q.real:.15f}  closed {lambda_closed(k, 1.0):.15f}  |imag| {abs(q.imag):.1e}")

# Grow the momenta: the kernel oscillates and decays like 1/t^2.
for t in (1, 3, 10, 30):
    print(f"t = {t:3d}  Lambda = {lambda_closed(t * k, 1.0): .6f}")

# Gaussian part and remainder.
s = lambda_split(k, 1.0)
print(f"split: total {s.total:.8f} = delta {s.delta_part:.8f} + continuous {s.continuous_part:.8f}")
