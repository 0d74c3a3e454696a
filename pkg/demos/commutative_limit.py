"""Lambda_n -> 1 as lambda_p -> 0, and what that does to Gamma_n on a slice."""
from __future__ import annotations

from dfrqft.gamma_transform import SliceSpec, commutative_limit_table, gamma_slice, limit_exponent
from dfrqft.kernel import MomentumConfig

rows = commutative_limit_table(radius=1.0, probes=400, lambda_values=[1, 0.5, 0.25, 0.125], n=2)
print(" lambda_p     sup|Lambda-1|   (b+^2+b-^2)/12")
for r in rows:
    print(f" {r.lambda_p:8.4f}   {r.sup:.6e}   {r.bound:.6e}")
print("fitted exponent:", round(limit_exponent(rows), 3))

# One active axis through an Off direction: the transform collapses toward a delta.
spec = SliceSpec(active_axes=((0, 1),), fixed=MomentumConfig([[0, 0, 0, 0], [1, 0, 0, 0]]), k_max=50.0, points=256)
for lam in (2.0, 1.0, 0.5, 0.25, 0.125):
    res = gamma_slice(spec, lam)
    print(f"lambda_p {lam:6.3f}: central mass {res.mass_concentration:.4f}  edge warning {res.nyquist_warning}")
