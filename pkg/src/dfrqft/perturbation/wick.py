"""Wick expansion of star products of normally ordered field monomials."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .terms import DiagramTerm, KernelFactor, Propagator, TermSum


class VertexKind(enum.Enum):
    TIME_STAMP = "TimeStamp"
    EXTERNAL_POINT = "ExternalPoint"
    MONOMIAL = "Monomial"  # fields at fixed, non-integrated points


@dataclass(frozen=True)
class Vertex:
    """One operand of a star product.

    A time stamp carries ``Gamma_n``, the cutoff ``g`` and ``n`` field legs at
    its slots; an external point carries one leg at itself; a plain monomial
    carries legs at fixed point labels.
    """

    id: str
    legs: tuple[str, ...]
    kind: VertexKind = VertexKind.MONOMIAL
    weight: Fraction = Fraction(1)
    derivatives: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if len(set(self.legs)) != len(self.legs):
            raise ValueError(f"repeated leg label in {self.legs}")
        if self.kind is VertexKind.EXTERNAL_POINT and self.legs != (self.id,):
            raise ValueError("an external point has exactly one leg, at itself")
        if self.derivatives is not None and len(self.derivatives) != len(self.legs):
            raise ValueError("one derivative multi-index per leg")
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def is_stamp(self) -> bool:
        return self.kind is VertexKind.TIME_STAMP

    @property
    def timed(self) -> bool:
        return self.kind is not VertexKind.MONOMIAL

    def static_factors(self) -> dict:
        out = {"kernels": [], "cutoffs": [], "derivs": [], "external": [], "kappa": 0}
        if self.is_stamp:
            if len(self.legs) > 1:
                out["kernels"].append(KernelFactor(self.id, self.legs))
            out["cutoffs"].append(self.id)
            out["kappa"] = 1
        if self.kind is VertexKind.EXTERNAL_POINT:
            out["external"].append(self.id)
        if self.derivatives:
            out["derivs"] = [(leg, a) for leg, a in zip(self.legs, self.derivatives)]
        return out


def interaction_vertex(stamp: str, n: int, weight: Fraction | None = None, derivatives=None) -> Vertex:
    """``weight * g(x) Gamma_n(x_1..x_n; x) phi(x_1)...phi(x_n)``; default weight ``-1/n!``."""
    if n < 1:
        raise ValueError("n must be positive")
    if weight is None:
        weight = Fraction(-1, factorial(n))
    # a linear source has no kernel: its one field sits at the stamp itself
    legs = (stamp,) if n == 1 else tuple(f"{stamp}.{j}" for j in range(1, n + 1))
    return Vertex(stamp, legs, VertexKind.TIME_STAMP, weight, derivatives)


def external_point(name: str = "y") -> Vertex:
    return Vertex(name, (name,), VertexKind.EXTERNAL_POINT)


def monomial(*points: str, name: str | None = None) -> Vertex:
    """Normally ordered product of fields at the given point labels."""
    return Vertex(name or "*".join(points), tuple(points), VertexKind.MONOMIAL)


def contraction_count(p: int, q: int, c: int) -> int:
    """Number of c-fold pairings between p and q legs: ``C(p,c) C(q,c) c!``."""
    if c < 0 or c > min(p, q):
        return 0
    return factorial(p) // (factorial(c) * factorial(p - c)) * factorial(q) // (factorial(c) * factorial(q - c)) * factorial(c)


def _matchings(fields: tuple[tuple[str, int], ...]) -> Iterator[tuple[tuple[str, str], ...]]:
    """All partial matchings between fields of distinct operands, left to right."""
    if not fields:
        yield ()
        return
    (head, owner), rest = fields[0], fields[1:]
    # head stays free
    yield from _matchings(rest)
    for idx, (other, other_owner) in enumerate(rest):
        if other_owner == owner:
            continue
        remaining = rest[:idx] + rest[idx + 1:]
        for m in _matchings(remaining):
            yield ((head, other),) + m


@lru_cache(maxsize=4096)
def _expand_word(word: tuple[Vertex, ...]) -> tuple[tuple[tuple[tuple[str, str], ...], tuple[str, ...]], ...]:
    fields = tuple((leg, i) for i, v in enumerate(word) for leg in v.legs)
    legs = [leg for leg, _ in fields]
    out = []
    for edges in _matchings(fields):
        used = {x for e in edges for x in e}
        out.append((edges, tuple(l for l in legs if l not in used)))
    return tuple(out)


def wick_word(word: Sequence[Vertex], time_order: tuple[str, ...] | None = None, coefficient=Fraction(1)) -> list[DiagramTerm]:
    """Wick expansion of ``word[0] * word[1] * ...`` (star products, left to right).

    Every contraction between a leg of an earlier and a leg of a later
    operand gives ``hbar * Delta+(earlier - later)``.
    """
    word = tuple(word)
    labels = [leg for v in word for leg in v.legs]
    if len(set(labels)) != len(labels):
        raise ValueError("repeated point label across operands")
    kernels, cutoffs, derivs, external = [], [], [], []
    kappa = 0
    weight = Fraction(coefficient)
    for v in word:
        s = v.static_factors()
        kernels += s["kernels"]
        cutoffs += s["cutoffs"]
        derivs += s["derivs"]
        external += s["external"]
        kappa += s["kappa"]
        weight *= v.weight
    terms = []
    for edges, free in _expand_word(word):
        terms.append(
            DiagramTerm(
                sym_factor=weight,
                kappa_power=kappa,
                hbar_power=len(edges),
                time_order=time_order,
                kernel_factors=tuple(kernels),
                cutoff_factors=tuple(cutoffs),
                propagator_factors=tuple(Propagator(a, b) for a, b in edges),
                field_factors=free,
                derivatives=tuple(derivs),
                external_points=tuple(external),
            )
        )
    return terms


def star_wick(a: Vertex, b: Vertex) -> TermSum:
    """``A * B`` for normally ordered monomials over distinct point labels."""
    shared = set(a.legs) & set(b.legs)
    if shared:
        raise ValueError(f"point labels {sorted(shared)} appear in both operands")
    return TermSum(wick_word((a, b)))


def _check_timed(vertices: Sequence[Vertex]) -> None:
    ids = [v.id for v in vertices]
    if len(set(ids)) != len(ids):
        raise ValueError("time stamps must be distinct")
    for v in vertices:
        if not v.timed:
            raise ValueError(f"operand {v.id} has no time stamp")


def t_product(vertices: Sequence[Vertex], antichronological: bool = False) -> TermSum:
    """Time-ordered product as a sum over orderings with theta-chains.

    Each ordering is stored with its time order (latest first) and the
    operands star-multiplied latest first; ``antichronological`` reverses
    the operand order inside each branch.
    """
    vertices = tuple(vertices)
    _check_timed(vertices)
    if len(vertices) <= 1:
        return TermSum(wick_word(vertices))
    terms = []
    for perm in itertools.permutations(vertices):
        order = tuple(v.id for v in perm)
        word = tuple(reversed(perm)) if antichronological else perm
        terms += wick_word(word, order)
    return TermSum(terms)


def t_bar_product(vertices: Sequence[Vertex]) -> TermSum:
    return t_product(vertices, antichronological=True)
