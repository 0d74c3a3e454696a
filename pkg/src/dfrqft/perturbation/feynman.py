"""Direct generation of the order-k integrand from the diagram rules.

Stamps are processed from the latest to the earliest. The external point is
the latest vertex. Each stamp must connect by at least one line to legs left
free by later vertices; the lines of one stamp enter as the difference of
the two Wightman orientations (``prod Delta+(later - v) - prod Delta+(v - later)``).
Legs left over become field factors.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Iterator

from .terms import DiagramTerm, KernelFactor, Propagator, TermSum, canonicalize, topologies

MAX_ORDER = 3
MAX_POWER = 4


class GuardError(ValueError):
    """Request outside the supported desk-scale range."""


def check_guard(k: int, n: int) -> None:
    if k < 0:
        raise GuardError("k must be non-negative")
    if k > MAX_ORDER:
        raise GuardError(f"order k = {k} exceeds the supported maximum {MAX_ORDER}")
    if n > MAX_POWER:
        raise GuardError(f"interaction power n = {n} exceeds the supported maximum {MAX_POWER}")
    if n < 2 and k > 0:
        raise GuardError("the diagram rules need n >= 2")


def _choices(free: list[str], slots: list[str], reduced: bool) -> Iterator[tuple[tuple[tuple[str, str], ...], int]]:
    """Nonempty matchings between earlier-free legs and this stamp's slots.

    With ``reduced`` the slots are interchangeable: only the first ``c`` are
    used and the ``C(n, c) c!`` equivalent choices fold into the multiplicity.
    """
    for c in range(1, min(len(free), len(slots)) + 1):
        for picked in itertools.combinations(free, c):
            if reduced:
                yield tuple(zip(picked, slots[:c])), comb(len(slots), c) * factorial(c)
            else:
                for targets in itertools.permutations(slots, c):
                    yield tuple(zip(picked, targets)), 1


def _skeletons(stamps: tuple[str, ...], n: int, reduced: bool, external: str):
    """Per-stamp line groups and leftover legs, latest stamp first."""

    def rec(m: int, free: list[str], groups: tuple, mult: int):
        if m == len(stamps):
            yield groups, free, mult
            return
        slots = [f"{stamps[m]}.{j}" for j in range(1, n + 1)]
        for pairs, w in _choices(free, slots, reduced):
            used_free = {p for p, _ in pairs}
            used_slots = {s for _, s in pairs}
            nxt = [f for f in free if f not in used_free] + [s for s in slots if s not in used_slots]
            yield from rec(m + 1, nxt, groups + (pairs,), mult * w)

    yield from rec(0, [external], (), 1)


def feynman_terms(
    k: int,
    n: int = 4,
    *,
    convention: str = "display",
    canonical: bool = True,
    symmetric_kernels: bool = True,
    external: str = "y",
) -> TermSum:
    """Order-``k`` contribution to ``phi_S(y)`` for a ``phi^n`` interaction.

    ``convention="display"`` gives the normalization of the written rules,
    ``"bogoliubov"`` multiplies by ``(-i)**k`` and then agrees term by term
    with ``r_product``. Every emitted term is checked for occupancy.

    With ``canonical`` only the order ``x1 > x2 > ...`` is generated and the
    ``k!`` relabelled orders are folded into the coefficient; otherwise every
    order is emitted with its own stamp labels.
    """
    check_guard(k, n)
    if convention not in ("display", "bogoliubov"):
        raise ValueError("convention must be 'display' or 'bogoliubov'")
    if k == 0:
        term = DiagramTerm(Fraction(1), time_order=(external,), field_factors=(external,), external_points=(external,))
        return TermSum([term], {"k": 0, "n": n, "convention": convention, "canonical": canonical})

    names = tuple(f"x{i}" for i in range(1, k + 1))
    orders = [names] if canonical else list(itertools.permutations(names))
    reduced = canonical and symmetric_kernels
    base = Fraction(1, factorial(k) * factorial(n) ** k)
    if canonical:
        base *= factorial(k)
    phase = 3 * k if convention == "bogoliubov" else 0
    kernels = tuple(KernelFactor(s, tuple(f"{s}.{j}" for j in range(1, n + 1))) for s in names)

    out = []
    for stamps in orders:
        tau = (external,) + stamps
        for groups, free, mult in _skeletons(stamps, n, reduced, external):
            lines = sum(len(g) for g in groups)
            for flips in itertools.product((False, True), repeat=k):
                props = []
                sign = 1
                for pairs, flip in zip(groups, flips):
                    if flip:
                        sign = -sign
                        props += [Propagator(b, a) for a, b in pairs]
                    else:
                        props += [Propagator(a, b) for a, b in pairs]
                term = DiagramTerm(
                    sym_factor=base * mult * sign,
                    phase=phase,
                    kappa_power=k,
                    hbar_power=lines - k,
                    time_order=tau,
                    kernel_factors=kernels,
                    cutoff_factors=names,
                    propagator_factors=tuple(props),
                    field_factors=tuple(free),
                    external_points=(external,),
                )
                term.check_occupancy()
                out.append(term)
    result = TermSum(out)
    if canonical:
        result = canonicalize(result, symmetric_kernels=symmetric_kernels)
    result.meta.update({"k": k, "n": n, "convention": convention, "canonical": canonical})
    return result


def summary(ts: TermSum) -> dict:
    return {
        "terms": len(ts),
        "topologies": len(topologies(ts)),
        "hbar_histogram": {str(h): c for h, c in ts.hbar_histogram().items()},
    }
