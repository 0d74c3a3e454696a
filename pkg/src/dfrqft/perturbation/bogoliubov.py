"""Retarded products from time-ordered products by the Bogoliubov formula.

``R_k(S^k, F) = i^k sum_{I} (-1)^{|I|} Tbar(S_I, F) * T(S_{I^c})``. Each
subset gives one group of blocks; blocks are expanded per total time order
of all stamps, so every emitted term carries its own theta-chain.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .terms import TermSum
from .wick import Vertex, external_point, interaction_vertex, wick_word

ORDERINGS = ("T", "Tbar", "plain")


@dataclass(frozen=True)
class Block:
    """A product over ``operands``: chronological, antichronological or as written."""

    ordering: str
    operands: tuple[str, ...]

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")

    def word(self, position: dict[str, int]) -> tuple[str, ...]:
        if self.ordering == "plain":
            return self.operands
        chrono = tuple(sorted(self.operands, key=position.__getitem__))
        return chrono if self.ordering == "T" else chrono[::-1]

    def __str__(self) -> str:
        inner = ",".join(self.operands)
        if self.ordering == "plain":
            return "*".join(self.operands)
        return f"{self.ordering}{len(self.operands)}({inner})"


@dataclass(frozen=True)
class Group:
    sign: int
    blocks: tuple[Block, ...]

    def word(self, position: dict[str, int]) -> tuple[str, ...]:
        return tuple(op for b in self.blocks for op in b.word(position))

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + " " + " * ".join(str(b) for b in self.blocks)


@dataclass(frozen=True)
class GroupSum:
    """``i**phase * sum(groups)`` before Wick expansion."""

    phase: int
    groups: tuple[Group, ...]
    checked: bool = True


def _stamps(k: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, k + 1))


def bogoliubov_groups(k: int, observable: str = "y") -> GroupSum:
    """The alternating subset sum; ``T`` over the empty set is the identity."""
    if k < 0:
        raise ValueError("k must be non-negative")
    stamps = _stamps(k)
    groups = []
    for size in range(k + 1):
        for subset in itertools.combinations(stamps, size):
            rest = tuple(s for s in stamps if s not in subset)
            blocks = [Block("Tbar", subset + (observable,))]
            if rest:
                blocks.append(Block("T", rest))
            groups.append(Group((-1) ** size, tuple(blocks)))
    return GroupSum(k % 4, tuple(groups))


def display_groups(k: int, observable: str = "y") -> GroupSum:
    """The closed first- and second-order forms written with T-products and plain star products.

    For ``k = 2`` the closed form is the six-group sum
    ``T3(S1,S2,F) - S1*T2(S2,F) - S2*T2(S1,F) - T2(S1,S2)*F + S1*S2*F + S2*S1*F``;
    it equals ``R_2`` up to the overall ``i**2`` carried here as ``phase``.
    Other orders fall back to the subset sum, marked unchecked.
    """
    F = observable
    if k == 1:
        groups = (Group(1, (Block("T", ("x1", F)),)), Group(-1, (Block("plain", ("x1", F)),)))
        return GroupSum(1, groups)
    if k == 2:
        groups = (
            Group(1, (Block("T", ("x1", "x2", F)),)),
            Group(-1, (Block("plain", ("x1",)), Block("T", ("x2", F)))),
            Group(-1, (Block("plain", ("x2",)), Block("T", ("x1", F)))),
            Group(-1, (Block("T", ("x1", "x2")), Block("plain", (F,)))),
            Group(1, (Block("plain", ("x1", "x2", F)),)),
            Group(1, (Block("plain", ("x2", "x1", F)),)),
        )
        return GroupSum(2, groups)
    general = bogoliubov_groups(k, observable)
    return GroupSum(general.phase, general.groups, checked=False)


def expand_groups(
    groups: GroupSum,
    operands: dict[str, Vertex],
    time_ordered: Sequence[str],
) -> TermSum:
    """Wick-expand every group, one total order of ``time_ordered`` at a time.

    Words with equal operand sequence under one total order are summed
    before expansion, so cancelling groups never reach the Wick layer.
    """
    words: dict[tuple, int] = defaultdict(int)
    for tau in itertools.permutations(time_ordered):
        position = {s: i for i, s in enumerate(tau)}
        for g in groups.groups:
            words[(tau, g.word(position))] += g.sign
    terms = []
    for (tau, word), weight in words.items():
        if weight == 0:
            continue
        terms += wick_word(tuple(operands[o] for o in word), tau, Fraction(weight))
    return TermSum(terms).scaled(phase=groups.phase)


def r_product(
    k: int,
    n: int = 4,
    *,
    observable: str = "y",
    interaction: Vertex | None = None,
    form: str = "general",
    convention: str = "bogoliubov",
) -> TermSum:
    """Order-``k`` term of the interacting field ``phi_S(y)``.

    Includes the Dyson factor ``kappa**k / (k! hbar**k)`` on top of ``R_k``;
    every interaction vertex carries the weight ``-1/n!`` (or that of
    ``interaction``, used as the template for every stamp). ``form`` picks the
    subset sum (``"general"``) or the closed displays (``"display"``).
    ``convention="display"`` removes the overall ``(-i)**k`` so that the
    result matches the normalization of the written Feynman rules.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if form not in ("general", "display"):
        raise ValueError("form must be 'general' or 'display'")
    if convention not in ("bogoliubov", "display"):
        raise ValueError("convention must be 'bogoliubov' or 'display'")
    stamps = _stamps(k)
    operands = {observable: external_point(observable)}
    for s in stamps:
        if interaction is None:
            operands[s] = interaction_vertex(s, n)
        else:
            operands[s] = Vertex(
                s,
                tuple(s + leg[len(interaction.id):] for leg in interaction.legs),
                interaction.kind,
                interaction.weight,
                interaction.derivatives,
            )
    groups = bogoliubov_groups(k, observable) if form == "general" else display_groups(k, observable)
    result = expand_groups(groups, operands, stamps + (observable,))
    result = result.scaled(Fraction(1, factorial(k)), hbar=-k)
    if convention == "display":
        # (-i)^k == i^(3k)
        result = result.scaled(phase=-3 * k)
    result.meta.update({"k": k, "n": n, "form": form, "convention": convention, "checked": groups.checked})
    return result
