from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dfrqft.kernel import (
    MomentumConfig,
    beta_pair,
    lambda_closed,
    lambda_closed_array,
    lambda_minus_one,
    lambda_quadrature,
    lambda_split,
    pair_sum_vectors_array,
    sinc,
    sinc_minus_one,
    sphere_quadrature,
)

from conftest import random_configs, random_rotation

HALF_PAIR = [[1, 0, 0, 0], [0, 1, 0, 0]]


def brute_pair_sums(k):
    k = np.asarray(k, dtype=float)
    vp = np.zeros(3)
    vm = np.zeros(3)
    for j in range(len(k)):
        for l in range(j + 1, len(k)):
            boost = k[j, 0] * k[l, 1:] - k[l, 0] * k[j, 1:]
            rot = np.cross(k[j, 1:], k[l, 1:])
            vp += boost + rot
            vm += boost - rot
    return vp, vm


def test_pair_sums_hand_values():
    b = beta_pair(HALF_PAIR, 1.0)
    assert np.allclose(b.v_plus, [1, 0, 0]) and np.allclose(b.v_minus, [1, 0, 0])
    assert b.beta_plus == pytest.approx(0.5) and b.beta_minus == pytest.approx(0.5)
    b = beta_pair([[0, 1, 0, 0], [0, 0, 1, 0]], 1.0)
    assert np.allclose(b.v_plus, [0, 0, 1]) and np.allclose(b.v_minus, [0, 0, -1])
    b = beta_pair([[3, 1, 2, 0]], 1.0)
    assert b.beta_plus == 0 and b.beta_minus == 0


def test_pair_sums_match_double_loop(rng):
    for k in random_configs(rng, 50, n_values=(2, 3, 4, 5)):
        vp, vm = pair_sum_vectors_array(k)
        bp, bm = brute_pair_sums(k)
        assert np.allclose(vp, bp, atol=1e-12) and np.allclose(vm, bm, atol=1e-12)


def test_lambda_closed_values(rng):
    assert lambda_closed(np.zeros((3, 4)), 1.0) == 1.0
    assert lambda_closed(HALF_PAIR, 1.0) == pytest.approx(0.95885108, abs=1e-8)
    for _ in range(20):
        k1 = rng.normal(size=4)
        assert lambda_closed([k1, rng.normal() * k1], 1.0) == pytest.approx(1.0, abs=1e-15)


def test_quadrature_is_normalized():
    q = sphere_quadrature(16)
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert lambda_quadrature(np.zeros((2, 4)), 1.0, q) == 1.0 + 0.0j


def test_quadrature_matches_closed_form(rng):
    q = lambda_quadrature(HALF_PAIR, 1.0, sphere_quadrature(32))
    assert abs(q.real - lambda_closed(HALF_PAIR, 1.0)) < 1e-10
    assert abs(q.imag) < 1e-10
    for k in random_configs(rng, 10, n_values=(3,)):
        assert abs(lambda_quadrature(k, 1.0) - lambda_closed(k, 1.0)) < 1e-8


def test_split():
    s = lambda_split(np.zeros((2, 4)), 1.0)
    assert (s.total, s.delta_part, s.continuous_part) == (1.0, 1.0, 0.0)
    s = lambda_split(HALF_PAIR, 1.0)
    assert s.delta_part == pytest.approx(0.60653066, abs=1e-8)
    assert s.continuous_part == pytest.approx(0.35232042, abs=1e-8)
    # beta_pm = 10
    s = lambda_split([[1, 0, 0, 0], [0, 20, 0, 0]], 1.0)
    assert s.delta_part < 1e-80
    assert s.continuous_part == pytest.approx(s.total, abs=1e-80)


def test_sinc_stable_near_zero():
    x = np.array([0.0, 1e-9, 1e-5, 5e-5, 2e-4, 0.05, 0.2, 3.0])
    ref = np.array([1.0] + [np.sin(v) / v for v in x[1:]])
    assert np.allclose(sinc(x), ref, rtol=0, atol=1e-15)
    # reference for sinc - 1 from a long series in exact-ish arithmetic
    for v in (1e-6, 1e-3, 0.05, 0.099, 0.11, 1.0):
        terms = [(-1) ** m * v ** (2 * m) / np.prod(np.arange(2, 2 * m + 2, dtype=float)) for m in range(1, 12)]
        assert sinc_minus_one(v) == pytest.approx(sum(terms), rel=1e-12)


def test_lambda_minus_one_relative_accuracy():
    k = np.array(HALF_PAIR) * 1e-4
    ref = sinc_minus_one(0.5e-8)
    assert lambda_minus_one(k, 1.0) == pytest.approx(ref, rel=1e-12)
    assert lambda_minus_one(k, 1.0) != 0.0


def test_momentum_config_validation():
    with pytest.raises(ValueError):
        MomentumConfig([[1, 2, 3]])
    with pytest.raises(ValueError):
        MomentumConfig([[np.nan, 0, 0, 0]])
    assert MomentumConfig([1, 2, 3, 4, 5, 6, 7, 8]).n == 2


configs = arrays(np.float64, st.tuples(st.integers(2, 4), st.just(4)), elements=st.floats(-3, 3))


@given(configs)
@settings(max_examples=100, deadline=None)
def test_kernel_invariants_property(k):
    rot = random_rotation(np.random.default_rng(abs(hash(k.tobytes())) % 2**32))
    cfg = MomentumConfig(k)
    val = lambda_closed(cfg, 0.9)
    assert abs(val) <= 1.0
    assert abs(lambda_closed(-cfg, 0.9) - val) <= 1e-12
    assert abs(lambda_closed(cfg.parity(), 0.9) - val) <= 1e-12
    assert abs(lambda_closed(cfg.rotated(rot), 0.9) - val) <= 1e-12


def test_array_form_broadcasts(rng):
    ks = rng.normal(size=(5, 7, 3, 4))
    vals = lambda_closed_array(ks, 1.2)
    assert vals.shape == (5, 7)
    assert vals[2, 3] == pytest.approx(lambda_closed(ks[2, 3], 1.2))
