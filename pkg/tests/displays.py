"""Closed-form low-order integrands written out independently of the generator.

Both are built from explicit label sums with commutator functions, then
expanded into Wightman factors.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from dfrqft.perturbation import DiagramTerm, KernelFactor, Propagator, TermSum
from dfrqft.perturbation.terms import PAULI_JORDAN


def _kernel(stamp: str, n: int = 4) -> KernelFactor:
    return KernelFactor(stamp, tuple(f"{stamp}.{j}" for j in range(1, n + 1)))


def first_order(n: int = 4) -> TermSum:
    """``kappa/n! theta(y-x) sum_j Delta_m(y - x.j) prod_{m != j} phi(x.m)``."""
    terms = []
    for j in range(1, n + 1):
        terms.append(
            DiagramTerm(
                Fraction(1, factorial(n)),
                kappa_power=1,
                hbar_power=0,
                time_order=("y", "x1"),
                kernel_factors=(_kernel("x1", n),),
                cutoff_factors=("x1",),
                propagator_factors=(Propagator("y", f"x1.{j}", PAULI_JORDAN),),
                field_factors=tuple(f"x1.{m}" for m in range(1, n + 1) if m != j),
                external_points=("y",),
            )
        )
    return TermSum(terms).expanded()


def second_order_three_lines() -> TermSum:
    """The two-vertex, three-line integrand for ``x1 later than x2``, ``n = 4``.

    Prefactor ``kappa^2 hbar / (4 (4!)^2)``; the sums run over ordered
    label pairs ``(j1, j2)`` and ``(k1, k2)``.
    """
    c = Fraction(1, 4 * factorial(4) ** 2)
    labels = range(1, 5)
    terms = []
    for j in labels:
        for j1, j2 in itertools.permutations([m for m in labels if m != j], 2):
            for k1, k2 in itertools.permutations(labels, 2):
                fields = tuple(f"x1.{m}" for m in labels if m not in (j, j1, j2))
                fields += tuple(f"x2.{m}" for m in labels if m not in (k1, k2))
                pj = Propagator("y", f"x1.{j}", PAULI_JORDAN)
                forward = (Propagator(f"x1.{j1}", f"x2.{k1}"), Propagator(f"x1.{j2}", f"x2.{k2}"))
                backward = tuple(p.reversed() for p in forward)
                for props, sign in ((forward, 1), (backward, -1)):
                    terms.append(
                        DiagramTerm(
                            sign * c,
                            kappa_power=2,
                            hbar_power=1,
                            time_order=("y", "x1", "x2"),
                            kernel_factors=(_kernel("x1"), _kernel("x2")),
                            cutoff_factors=("x1", "x2"),
                            propagator_factors=(pj,) + props,
                            field_factors=fields,
                            external_points=("y",),
                        )
                    )
    return TermSum(terms).expanded()
