from __future__ import annotations

import numpy as np
import pytest

from dfrqft.kernel import pair_sum_vectors_array


def random_configs(rng: np.random.Generator, count: int, n_values=(2, 3, 4), v_max: float = 10.0):
    """Seeded random configurations rescaled so that ``max |v_pm| <= v_max``."""
    out = []
    for _ in range(count):
        n = int(rng.choice(n_values))
        k = rng.normal(size=(n, 4))
        vp, vm = pair_sum_vectors_array(k)
        vmax = max(np.linalg.norm(vp), np.linalg.norm(vm))
        target = rng.uniform(0.0, v_max)
        if vmax > 0:
            # v is quadratic in k
            k *= np.sqrt(target / vmax)
        out.append(k)
    return out


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
