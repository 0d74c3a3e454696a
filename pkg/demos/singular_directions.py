"""Where Lambda_n does not decay: the varieties K_+ and K_-."""
from __future__ import annotations

import numpy as np

from dfrqft.microlocal import classify_direction, ray_decay, solve_single_sheet

rays = {
    "parallel pair": [[0, 1, 0, 0], [0, 1, 0, 0]],
    "energy and momentum": [[1, 0, 0, 0], [0, 1, 0, 0]],
}

# With two or three momenta both sheets see the same |v|, so a single-sheet
# point needs at least four. Solve for the spatial part of the last one.
fixed = np.array([[0.3, 1.0, 0.0, 0.0], [0.0, 0.2, 1.0, 0.0], [0.5, 0.0, 0.4, 1.0], [0.0, 0.0, 0.0, 0.0]])
plus = solve_single_sheet(fixed, sign=1, energy=0.7)
rays["solved, plus sheet"] = plus.momenta
rays["its mirror image"] = plus.parity().momenta

for name, cfg in rays.items():
    cls = classify_direction(cfg)
    rep = ray_decay(cfg, lambda_p=1.0, t_min=10, t_max=1000)
    print(
        f"{name:22s} {cls.kind.value:12s} asymptote {rep.asymptote:8.5f}"
        f"  exponent {rep.fitted_exponent:7.3f}  envelope fit {rep.envelope}"
    )
