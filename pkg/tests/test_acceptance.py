"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from dfrqft.algebra import SigmaPoint, WeylElement, check_stur, optimal_state, state_moments, twist_phase, weyl_product
from dfrqft.gamma_transform import SliceSpec, ball_probes, commutative_limit_table, gamma_slice, limit_exponent
from dfrqft.kernel import (
    MomentumConfig,
    betas_array,
    delta_part_array,
    lambda_closed,
    lambda_closed_array,
    lambda_minus_one_array,
    lambda_quadrature,
    pair_sum_vectors_array,
    sphere_quadrature,
)
from dfrqft.microlocal import DirectionKind, classify_direction, ray_decay, solve_single_sheet
from dfrqft.perturbation import canonicalize, contraction_count, feynman_terms, monomial, r_product, star_wick, topologies

from conftest import random_configs, random_rotation
from displays import first_order, second_order_three_lines

EPS = np.finfo(float).eps


@pytest.fixture
def report(capsys):
    def _report(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return _report


def test_c1_kernel_oracle_agreement(report):
    rng = np.random.default_rng(1)
    quad = sphere_quadrature(64, 128)
    worst = 0.0
    for k in random_configs(rng, 100, n_values=(2, 3, 4), v_max=10.0):
        vp, vm = pair_sum_vectors_array(k)
        assert max(np.linalg.norm(vp), np.linalg.norm(vm)) <= 10.0 + 1e-9
        worst = max(worst, abs(lambda_closed(k, 1.0) - lambda_quadrature(k, 1.0, quad)))
    report("1 kernel oracle agreement", worst <= 1e-8, f"max |closed - quadrature| = {worst:.2e} (tol 1e-8)")


def test_c2_kernel_invariants(report):
    rng = np.random.default_rng(2)
    worst = {"bound": 0.0, "even": 0.0, "rotation": 0.0, "parity": 0.0}
    for k in random_configs(rng, 1000, n_values=(2, 3, 4, 5), v_max=20.0):
        cfg = MomentumConfig(k)
        val = lambda_closed(cfg, 1.0)
        worst["bound"] = max(worst["bound"], abs(val) - 1.0)
        worst["even"] = max(worst["even"], abs(lambda_closed(-cfg, 1.0) - val))
        worst["rotation"] = max(worst["rotation"], abs(lambda_closed(cfg.rotated(random_rotation(rng)), 1.0) - val))
        worst["parity"] = max(worst["parity"], abs(lambda_closed(cfg.parity(), 1.0) - val))
    zero = max(abs(lambda_closed(np.zeros((n, 4)), 1.0) - 1.0) for n in range(1, 6))
    ok = worst["bound"] <= 1e-12 and max(worst["even"], worst["rotation"], worst["parity"], zero) <= 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", Lambda(0)-1 {zero:.1e}"
    report("2 kernel invariants", ok, detail)


def test_c3_commutative_limit(report):
    ladder = [1.0, 0.5, 0.25, 0.125]
    probes = ball_probes(1.0, 400, 2, seed=3)
    per_probe = True
    for lam in ladder:
        bp, bm = betas_array(probes, lam)
        per_probe &= bool(np.all(np.abs(lambda_minus_one_array(probes, lam)) <= (bp**2 + bm**2) / 12.0))
    rows = commutative_limit_table(1.0, 400, ladder, n=2, seed=3)
    rows_ok = all(r.sup <= r.bound for r in rows)
    slope = limit_exponent(rows)
    ok = per_probe and rows_ok and abs(slope - 4.0) <= 0.1
    report("3 commutative limit", ok, f"bound on every probe {per_probe}, fitted exponent {slope:.3f} (4 +- 0.1)")


def test_c4_decay_classification(report):
    off = ray_decay([[1, 0, 0, 0], [0, 1, 0, 0]], 1.0, 10, 1000)
    off_ok = abs(off.fitted_exponent + 2.0) <= 0.15 and abs(off.asymptote) <= 0.01

    t = np.geomspace(10, 1000, 400)
    rng = np.random.default_rng(4)
    both_dev = 0.0
    for _ in range(20):
        a = rng.normal(size=4)
        cfg = np.array([a, rng.normal() * a, rng.normal() * a])
        assert classify_direction(cfg).kind is DirectionKind.IN_BOTH
        both_dev = max(both_dev, float(np.max(np.abs(lambda_closed_array(t[:, None, None] * cfg[None], 1.0) - 1.0))))
    both_ok = both_dev <= 1e-12

    single = []
    for _ in range(5):
        fixed = rng.normal(size=(4, 4))
        plus = solve_single_sheet(fixed, 1, energy=float(rng.normal()))
        for cfg, kind in ((plus, DirectionKind.IN_PLUS_ONLY), (plus.parity(), DirectionKind.IN_MINUS_ONLY)):
            assert classify_direction(cfg).kind is kind
            single.append(ray_decay(cfg, 1.0, 10, 1000).asymptote)
    single_ok = max(abs(a - 0.5) for a in single) <= 0.01
    detail = (
        f"Off exponent {off.fitted_exponent:.3f}, asymptote {off.asymptote:.1e}; "
        f"InBoth max|Lambda-1| {both_dev:.1e}; single-sheet asymptotes in "
        f"[{min(single):.4f}, {max(single):.4f}]"
    )
    report("4 decay classification", off_ok and both_ok and single_ok, detail)


def test_c5_split_identity(report):
    rng = np.random.default_rng(5)
    ks = np.stack([rng.normal(size=(3, 4)) * rng.uniform(0, 3) for _ in range(2000)])
    total = lambda_closed_array(ks, 1.0)
    delta = delta_part_array(ks, 1.0)
    cont = total - delta
    split_err = float(np.max(np.abs(total - (delta + cont))))
    split_ok = split_err <= 2 * EPS

    errors = []
    for cfg, lam in (([[1, 0, 0, 0], [0, 1, 0, 0]], 1.0), ([[0.3, 1, 0, 0.2], [0.5, 0, 1, 0]], 0.7)):
        k = np.array(cfg, dtype=float)
        vp, vm = pair_sum_vectors_array(k)
        expected = -(np.dot(vp, vp) + np.dot(vm, vm)) * lam**4 / 4.0
        # log Lambda_delta = expected * t^4 until it underflows
        t_stop = (600.0 / abs(expected)) ** 0.25
        t = np.linspace(0.05 * t_stop, t_stop, 60)
        logs = np.log(delta_part_array(t[:, None, None] * k[None], lam))
        slope = np.polyfit(t**4, logs, 1)[0]
        errors.append(abs(slope - expected) / abs(expected))
    decay_ok = max(errors) <= 0.05
    detail = f"max |Lambda - (delta + cont)| {split_err:.1e}; t^4 slope relative errors {', '.join(f'{e:.1e}' for e in errors)}"
    report("5 split identity", split_ok and decay_ok, detail)


def test_c6_diagram_oracle(report):
    eq = {k: feynman_terms(k, 4, convention="bogoliubov") == canonicalize(r_product(k, 4)) for k in (1, 2)}
    first = feynman_terms(1, 4)
    first_ok = first == canonicalize(first_order()) and len(topologies(first)) == 1
    raw = feynman_terms(2, 4, canonical=False)
    three = raw.filter(lambda t: t.time_order == ("y", "x1", "x2") and t.lines == 3)
    second_ok = three == second_order_three_lines()
    ok = all(eq.values()) and first_ok and second_ok
    detail = f"rules == Bogoliubov for k=1: {eq[1]}, k=2: {eq[2]}; first-order display {first_ok}; k=2 L=3 display {second_ok}"
    report("6 diagram oracle", ok, detail)


def test_c7_wick_combinatorics(report):
    bad = []
    for p, q in itertools.product(range(5), repeat=2):
        ts = star_wick(monomial(*[f"a{i}" for i in range(p)]), monomial(*[f"b{i}" for i in range(q)]))
        for c in range(min(p, q) + 1):
            enumerated = sum(1 for t in ts if t.lines == c)
            brute = sum(1 for _ in itertools.combinations(range(p), c) for _ in itertools.permutations(range(q), c))
            formula = math.comb(p, c) * math.comb(q, c) * math.factorial(c)
            if not enumerated == brute == formula == contraction_count(p, q, c):
                bad.append((p, q, c))
    report("7 Wick combinatorics", not bad, f"mismatches {bad}" if bad else "all (p, q, c) with p, q <= 4 agree")


def test_c8_slice_transforms(report):
    delta = gamma_slice(SliceSpec(((0, 1),), MomentumConfig([[0.0, 0.0, 0.0, 0.0]]), 20.0, 256), 1.0)
    delta_ok = delta.mass_concentration >= 0.99

    rng = np.random.default_rng(8)
    parseval = []
    for axes, points in ((((0, 1),), 256), (((0, 1), (1, 2)), 64)):
        res = gamma_slice(SliceSpec(axes, MomentumConfig(rng.normal(size=(2, 4))), 15.0, points), 1.0)
        lhs = np.sum(np.abs(res.values) ** 2)
        rhs = res.normalization() * np.sum(np.abs(res.samples) ** 2)
        parseval.append(abs(lhs - rhs) / rhs)
    parseval_ok = max(parseval) <= 1e-10

    spec = SliceSpec(((0, 1),), MomentumConfig([[0, 0, 0, 0], [1, 0, 0, 0]]), 50.0, 256)
    ladder = [2.0, 1.0, 0.5, 0.25, 0.125]
    conc = [gamma_slice(spec, lam).mass_concentration for lam in ladder]
    mono_ok = all(b > a for a, b in zip(conc, conc[1:]))
    detail = (
        f"n=1 concentration {delta.mass_concentration:.4f}; Parseval rel err {max(parseval):.1e}; "
        f"Off-slice ladder {[round(c, 4) for c in conc]}"
    )
    report("8 slice transforms", delta_ok and parseval_ok and mono_ok, detail)


def test_c9_algebra_layer(report):
    rng = np.random.default_rng(9)
    assoc = bichar = 0.0
    for _ in range(100):
        sigma = SigmaPoint.from_direction(rng.normal(size=3), int(rng.choice([1, -1])))
        k1, k2, k3 = rng.normal(size=(3, 4))
        a, b, c = (WeylElement(tuple(k), np.exp(1j * rng.uniform(0, 6))) for k in (k1, k2, k3))
        left = weyl_product(weyl_product(a, b, sigma, 1.0), c, sigma, 1.0)
        right = weyl_product(a, weyl_product(b, c, sigma, 1.0), sigma, 1.0)
        assoc = max(assoc, abs(left.phase - right.phase), float(np.max(np.abs(np.subtract(left.momentum, right.momentum)))))
        lhs = twist_phase(k1 + k2, k3, sigma, 1.0)
        rhs = twist_phase(k1, k3, sigma, 1.0) * twist_phase(k2, k3, sigma, 1.0)
        lhs2 = twist_phase(k1, k2 + k3, sigma, 1.0)
        rhs2 = twist_phase(k1, k2, sigma, 1.0) * twist_phase(k1, k3, sigma, 1.0)
        bichar = max(bichar, abs(lhs - rhs), abs(lhs2 - rhs2))
    lam = 1.3
    state = optimal_state((0.5, -1.0, 2.0, 0.0), lam)
    variances = [state_moments(state, mu)[1] for mu in range(4)]
    var_err = max(abs(v - lam**2) for v in variances)
    stur = check_stur([math.sqrt(v) for v in variances], lam)
    ok = assoc <= 1e-12 and bichar <= 1e-12 and var_err <= 1e-6 and all(stur)
    detail = f"associativity {assoc:.1e}, bicharacter {bichar:.1e}, variance error {var_err:.1e}, STUR {stur}"
    report("9 algebra layer", ok, detail)
