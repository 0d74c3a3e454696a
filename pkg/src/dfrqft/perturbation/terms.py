"""Symbolic integrand terms and their canonical multiset form.

A ``DiagramTerm`` is one monomial: a rational coefficient, an optional
factor ``i``, powers of the coupling and of hbar, a total time order of the
time stamps (the theta-chain), kernel and cutoff factors per time stamp,
Wightman propagators ``Delta+(a - b)`` and the remaining field factors.

Slot ids are written ``"<stamp>.<j>"`` (``x1.3`` is the third non-local
variable of time stamp ``x1``); the external point carries its own field.
"""
from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

SCHEMA_VERSION = 1

WIGHTMAN = "W+"
PAULI_JORDAN = "PJ"


class Propagator(NamedTuple):
    """``Delta+(source - target)``, or the commutator function for kind ``PJ``."""

    source: str
    target: str
    kind: str = WIGHTMAN

    def reversed(self) -> "Propagator":
        return Propagator(self.target, self.source, self.kind)


class KernelFactor(NamedTuple):
    """``Gamma_n(slots; stamp)``; slot order matters unless kernels are symmetrized."""

    stamp: str
    slots: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.slots)


def _fold_phase(coefficient: Fraction, phase: int) -> tuple[Fraction, int]:
    phase %= 4
    if phase >= 2:
        return -coefficient, phase - 2
    return coefficient, phase


@dataclass(frozen=True)
class DiagramTerm:
    sym_factor: Fraction
    phase: int = 0
    kappa_power: int = 0
    hbar_power: int = 0
    time_order: tuple[str, ...] | None = None
    kernel_factors: tuple[KernelFactor, ...] = ()
    cutoff_factors: tuple[str, ...] = ()
    propagator_factors: tuple[Propagator, ...] = ()
    field_factors: tuple[str, ...] = ()
    derivatives: tuple[tuple[str, tuple[int, ...]], ...] = ()
    external_points: tuple[str, ...] = ()

    def __post_init__(self):
        coefficient, phase = _fold_phase(Fraction(self.sym_factor), self.phase)
        object.__setattr__(self, "sym_factor", coefficient)
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "kernel_factors", tuple(sorted(KernelFactor(s, tuple(sl)) for s, sl in self.kernel_factors)))
        object.__setattr__(self, "cutoff_factors", tuple(sorted(self.cutoff_factors)))
        object.__setattr__(self, "propagator_factors", tuple(sorted(Propagator(*p) for p in self.propagator_factors)))
        object.__setattr__(self, "field_factors", tuple(sorted(self.field_factors)))
        object.__setattr__(self, "derivatives", tuple(sorted((s, tuple(a)) for s, a in self.derivatives if any(a))))
        object.__setattr__(self, "external_points", tuple(sorted(self.external_points)))
        if self.time_order is not None:
            object.__setattr__(self, "time_order", tuple(self.time_order))

    def key(self) -> tuple:
        """Everything but the coefficient; terms with equal keys merge."""
        return (
            self.phase,
            self.kappa_power,
            self.hbar_power,
            self.time_order,
            self.kernel_factors,
            self.cutoff_factors,
            self.propagator_factors,
            self.field_factors,
            self.derivatives,
            self.external_points,
        )

    def sort_key(self) -> tuple:
        k = self.key()
        return (k[0], k[1], k[2], () if k[3] is None else (1,) + k[3]) + k[4:]

    @property
    def theta_factors(self) -> tuple[tuple[str, str], ...]:
        """``theta(a^0 - b^0)`` for consecutive stamps of the time order."""
        if self.time_order is None:
            return ()
        return tuple(zip(self.time_order, self.time_order[1:]))

    @property
    def lines(self) -> int:
        return len(self.propagator_factors)

    @property
    def rules_hbar_power(self) -> int:
        """hbar power without the global ``hbar**-k`` of the Dyson series."""
        return self.hbar_power + self.kappa_power

    @property
    def slot_owner(self) -> dict[str, str]:
        return {s: kf.stamp for kf in self.kernel_factors for s in kf.slots}

    @property
    def integration_vars(self) -> tuple[str, ...]:
        stamps = {kf.stamp for kf in self.kernel_factors} | set(self.cutoff_factors)
        slots = {s for kf in self.kernel_factors for s in kf.slots}
        return tuple(sorted(stamps | slots))

    def with_coefficient(self, coefficient: Fraction) -> "DiagramTerm":
        return replace(self, sym_factor=Fraction(coefficient))

    def scaled(self, factor: Fraction = Fraction(1), phase: int = 0, kappa: int = 0, hbar: int = 0) -> "DiagramTerm":
        return replace(
            self,
            sym_factor=self.sym_factor * Fraction(factor),
            phase=self.phase + phase,
            kappa_power=self.kappa_power + kappa,
            hbar_power=self.hbar_power + hbar,
        )

    def check_occupancy(self) -> None:
        """Every slot (and external point) is a propagator end or a field, exactly once."""
        ends = Counter()
        for p in self.propagator_factors:
            ends[p.source] += 1
            ends[p.target] += 1
        ends.update(self.field_factors)
        kernel_stamps = {kf.stamp for kf in self.kernel_factors}
        legs = [s for kf in self.kernel_factors for s in kf.slots] + list(self.external_points)
        legs += [s for s in self.cutoff_factors if s not in kernel_stamps]
        for leg in legs:
            if ends[leg] != 1:
                raise AssertionError(f"leg {leg} occupied {ends[leg]} times in {self}")
        extra = set(ends) - set(legs)
        if self.kernel_factors and extra:
            raise AssertionError(f"labels {sorted(extra)} belong to no vertex")


class TermSum:
    """A finite sum of ``DiagramTerm`` with identical terms merged."""

    def __init__(self, terms: Iterable[DiagramTerm] = (), meta: dict | None = None):
        acc: dict[tuple, Fraction] = defaultdict(Fraction)
        proto: dict[tuple, DiagramTerm] = {}
        for t in terms:
            k = t.key()
            acc[k] += t.sym_factor
            proto.setdefault(k, t)
        self._terms = {k: proto[k].with_coefficient(c) for k, c in acc.items() if c != 0}
        self.meta = dict(meta or {})

    @property
    def terms(self) -> list[DiagramTerm]:
        return sorted(self._terms.values(), key=DiagramTerm.sort_key)

    def __iter__(self) -> Iterator[DiagramTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TermSum):
            return NotImplemented
        return {k: t.sym_factor for k, t in self._terms.items()} == {
            k: t.sym_factor for k, t in other._terms.items()
        }

    __hash__ = None

    def __add__(self, other: "TermSum") -> "TermSum":
        return TermSum(itertools.chain(self._terms.values(), other._terms.values()))

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + other.scaled(-1)

    def scaled(self, factor=Fraction(1), phase: int = 0, kappa: int = 0, hbar: int = 0) -> "TermSum":
        return TermSum((t.scaled(factor, phase, kappa, hbar) for t in self._terms.values()), self.meta)

    def filter(self, predicate) -> "TermSum":
        return TermSum((t for t in self._terms.values() if predicate(t)), self.meta)

    def coefficient_of(self, term: DiagramTerm) -> Fraction:
        t = self._terms.get(term.key())
        return Fraction(0) if t is None else t.sym_factor

    def hbar_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(t.hbar_power for t in self._terms.values()).items()))

    def expanded(self) -> "TermSum":
        """Rewrite every commutator function as a difference of two Wightman factors."""
        out = []
        for t in self._terms.values():
            pj = [p for p in t.propagator_factors if p.kind == PAULI_JORDAN]
            rest = [p for p in t.propagator_factors if p.kind != PAULI_JORDAN]
            for choice in itertools.product((0, 1), repeat=len(pj)):
                props = list(rest)
                sign = 1
                for p, flip in zip(pj, choice):
                    w = Propagator(p.source, p.target)
                    props.append(w.reversed() if flip else w)
                    sign = -sign if flip else sign
                out.append(replace(t, propagator_factors=tuple(props), sym_factor=sign * t.sym_factor))
        return TermSum(out, self.meta)

    def to_json(self, with_meta: bool = False) -> dict:
        """Canonical payload; provenance metadata is opt-in so equal sums serialize identically."""
        payload = {"schema": SCHEMA_VERSION, "terms": [term_to_json(t) for t in self.terms]}
        if with_meta:
            payload["meta"] = self.meta
        return payload

    def dumps(self, with_meta: bool = False) -> str:
        return json.dumps(self.to_json(with_meta), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, payload: dict) -> "TermSum":
        if payload.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {payload.get('schema')!r}")
        return cls((term_from_json(t) for t in payload["terms"]), payload.get("meta"))

    def __repr__(self) -> str:
        return f"TermSum({len(self)} terms)"


def term_to_json(t: DiagramTerm) -> dict:
    return {
        "coefficient": {"num": t.sym_factor.numerator, "den": t.sym_factor.denominator},
        "phase_i": t.phase,
        "kappa_power": t.kappa_power,
        "hbar_power": t.hbar_power,
        "rules_hbar_power": t.rules_hbar_power,
        "lines": t.lines,
        "time_order": None if t.time_order is None else list(t.time_order),
        "theta": [list(p) for p in t.theta_factors],
        "kernels": [{"stamp": kf.stamp, "slots": list(kf.slots), "n": kf.n} for kf in t.kernel_factors],
        "cutoffs": list(t.cutoff_factors),
        "propagators": [{"kind": p.kind, "from": p.source, "to": p.target} for p in t.propagator_factors],
        "fields": list(t.field_factors),
        "derivatives": {s: list(a) for s, a in t.derivatives},
        "external": list(t.external_points),
        "integration_vars": list(t.integration_vars),
    }


def term_from_json(d: dict) -> DiagramTerm:
    return DiagramTerm(
        sym_factor=Fraction(d["coefficient"]["num"], d["coefficient"]["den"]),
        phase=d["phase_i"],
        kappa_power=d["kappa_power"],
        hbar_power=d["hbar_power"],
        time_order=None if d["time_order"] is None else tuple(d["time_order"]),
        kernel_factors=tuple(KernelFactor(k["stamp"], tuple(k["slots"])) for k in d["kernels"]),
        cutoff_factors=tuple(d["cutoffs"]),
        propagator_factors=tuple(Propagator(p["from"], p["to"], p["kind"]) for p in d["propagators"]),
        field_factors=tuple(d["fields"]),
        derivatives=tuple((s, tuple(a)) for s, a in d["derivatives"].items()),
        external_points=tuple(d["external"]),
    )


# --- canonical form ---------------------------------------------------------


def _rename_stamps(t: DiagramTerm) -> DiagramTerm:
    if t.time_order is None:
        return t
    owned = {kf.stamp for kf in t.kernel_factors} | set(t.cutoff_factors)
    dummies = [s for s in t.time_order if s in owned]
    mapping = {old: f"x{i}" for i, old in enumerate(dummies, 1)}
    if all(k == v for k, v in mapping.items()):
        return t
    # two-step rename through unique placeholders avoids collisions
    slot_map = {}
    for kf in t.kernel_factors:
        if kf.stamp in mapping:
            new = mapping[kf.stamp]
            for s in kf.slots:
                slot_map[s] = new + s[len(kf.stamp):] if s.startswith(kf.stamp + ".") else f"{new}.{s}"
    names = {**mapping, **slot_map}
    return _relabel(t, names)


def _relabel(t: DiagramTerm, names: dict[str, str]) -> DiagramTerm:
    def r(x: str) -> str:
        return names.get(x, x)

    return replace(
        t,
        time_order=None if t.time_order is None else tuple(r(s) for s in t.time_order),
        kernel_factors=tuple(KernelFactor(r(kf.stamp), tuple(r(s) for s in kf.slots)) for kf in t.kernel_factors),
        cutoff_factors=tuple(r(s) for s in t.cutoff_factors),
        propagator_factors=tuple(Propagator(r(p.source), r(p.target), p.kind) for p in t.propagator_factors),
        field_factors=tuple(r(s) for s in t.field_factors),
        derivatives=tuple((r(s), a) for s, a in t.derivatives),
        external_points=tuple(r(s) for s in t.external_points),
    )


def _positional_slots(t: DiagramTerm) -> DiagramTerm:
    names = {s: f"{kf.stamp}.{j}" for kf in t.kernel_factors for j, s in enumerate(kf.slots, 1)}
    return _relabel(t, names)


def _symmetric_slots(t: DiagramTerm) -> DiagramTerm:
    owner = t.slot_owner
    deriv = dict(t.derivatives)
    zero = ()

    def d(x):
        return deriv.get(x, zero)

    def home(x):
        return owner.get(x, x)

    partner: dict[str, tuple] = {}
    for p in t.propagator_factors:
        partner[p.source] = (0, p.kind, home(p.target), d(p.target))
        partner[p.target] = (1, p.kind, home(p.source), d(p.source))
    descriptor = {}
    for kf in t.kernel_factors:
        for s in kf.slots:
            descriptor[s] = (d(s), (1,) + partner[s] if s in partner else (0,))
    names: dict[str, str] = {}
    for kf in t.kernel_factors:
        ordered = sorted(kf.slots, key=lambda s: descriptor[s])
        for j, s in enumerate(ordered, 1):
            names[s] = f"{kf.stamp}.{j}"
    # re-pair edges inside each interchangeable class in sorted order
    classes: dict[tuple, list[Propagator]] = defaultdict(list)
    for p in t.propagator_factors:
        cls = (p.kind, home(p.source), d(p.source), home(p.target), d(p.target))
        classes[cls].append(p)
    props = []
    for cls, plist in classes.items():
        sources = sorted(names.get(p.source, p.source) for p in plist)
        targets = sorted(names.get(p.target, p.target) for p in plist)
        props.extend(Propagator(a, b, cls[0]) for a, b in zip(sources, targets))
    renamed = _relabel(replace(t, propagator_factors=()), names)
    kernels = tuple(KernelFactor(kf.stamp, tuple(sorted(kf.slots))) for kf in renamed.kernel_factors)
    return replace(renamed, propagator_factors=tuple(props), kernel_factors=kernels)


def canonical_term(t: DiagramTerm, symmetric_kernels: bool = True, relabel_stamps: bool = True) -> DiagramTerm:
    if relabel_stamps:
        t = _rename_stamps(t)
    if not t.kernel_factors:
        return t
    return _symmetric_slots(t) if symmetric_kernels else _positional_slots(t)


def canonicalize(ts: TermSum, symmetric_kernels: bool = True, relabel_stamps: bool = True) -> TermSum:
    """Normal form: dummy stamps numbered along the time order, dummy slots
    sorted by incidence, identical terms merged by adding coefficients.

    With ``symmetric_kernels`` the kernel is taken symmetrized in its slots,
    so slots of one stamp are interchangeable; otherwise slots are named by
    their kernel position. Idempotent.
    """
    meta = dict(ts.meta)
    meta["canonical"] = True
    return TermSum((canonical_term(t, symmetric_kernels, relabel_stamps) for t in ts), meta)


def coarsen_theta(ts: TermSum) -> TermSum:
    """Use ``sum over orders of the theta-chains = 1``.

    Terms that appear under every total order of their time stamps with one
    common coefficient are replaced by a single term without theta factors.
    """
    groups: dict[tuple, dict[tuple, DiagramTerm]] = defaultdict(dict)
    for t in ts:
        if t.time_order is None:
            continue
        groups[replace(t, time_order=None).key()][t.time_order] = t
    out = [t for t in ts if t.time_order is None]
    for members in groups.values():
        orders = list(members)
        stamps = orders[0]
        coefficients = {t.sym_factor for t in members.values()}
        complete = set(orders) == set(itertools.permutations(stamps))
        if complete and len(coefficients) == 1:
            out.append(replace(next(iter(members.values())), time_order=None))
        else:
            out.extend(members.values())
    return TermSum(out, ts.meta)


def local_limit(ts: TermSum) -> TermSum:
    """Drop kernel factors: the term structure of the local theory (Gamma -> delta)."""
    return TermSum((replace(t, kernel_factors=()) for t in ts), ts.meta)


def topology(t: DiagramTerm) -> tuple:
    """Undirected line counts between vertices, minimized over dummy-stamp relabelings."""
    owner = t.slot_owner
    counts = Counter()
    for p in t.propagator_factors:
        a, b = owner.get(p.source, p.source), owner.get(p.target, p.target)
        counts[tuple(sorted((a, b)))] += 1
    stamps = sorted({kf.stamp for kf in t.kernel_factors})
    best = None
    for perm in itertools.permutations(range(len(stamps))):
        rename = {s: f"x{perm[i] + 1}" for i, s in enumerate(stamps)}
        rep = tuple(sorted((tuple(sorted((rename.get(a, a), rename.get(b, b)))), c) for (a, b), c in counts.items()))
        if best is None or rep < best:
            best = rep
    return best if best is not None else ()


def topologies(ts: TermSum) -> set[tuple]:
    return {topology(t) for t in ts}


# --- text rendering ----------------------------------------------------------


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_term(t: DiagramTerm) -> str:
    parts = [("-" if t.sym_factor < 0 else "+") + " " + _frac(abs(t.sym_factor))]
    if t.phase:
        parts.append("i")
    if t.kappa_power:
        parts.append("κ" + (f"^{t.kappa_power}" if t.kappa_power != 1 else ""))
    if t.hbar_power:
        parts.append("ħ" + (f"^{t.hbar_power}" if t.hbar_power != 1 else ""))
    parts += [f"θ({a}⁰-{b}⁰)" for a, b in t.theta_factors]
    parts += [f"g({s})" for s in t.cutoff_factors]
    parts += [f"Γ{kf.n}({','.join(kf.slots)};{kf.stamp})" for kf in t.kernel_factors]
    deriv = dict(t.derivatives)

    def dlabel(s):
        return f"∂{list(deriv[s])}" if s in deriv else ""

    for p in t.propagator_factors:
        sym = "Δm" if p.kind == PAULI_JORDAN else "Δ⁺"
        parts.append(f"{dlabel(p.source)}{dlabel(p.target)}{sym}({p.source}-{p.target})")
    parts += [f"{dlabel(s)}φ({s})" for s in t.field_factors]
    return " ".join(parts)


def group_pauli_jordan(ts: TermSum) -> TermSum:
    """Merge pairs ``c W(a,b) X - c W(b,a) X`` into ``c Delta_m(a-b) X`` for display."""
    pool = {t.key(): t for t in ts}
    out = []
    for t in ts.terms:
        if t.key() not in pool:
            continue
        merged = False
        owner = t.slot_owner
        order = {s: i for i, s in enumerate(t.time_order or ())}

        def rank(x):
            return (order.get(owner.get(x, x), len(order)), x)

        for p in t.propagator_factors:
            if p.kind != WIGHTMAN:
                continue
            others = list(t.propagator_factors)
            others.remove(p)
            mirror = replace(t, propagator_factors=tuple(others + [p.reversed()]), sym_factor=-t.sym_factor)
            if mirror.key() != t.key() and mirror.key() in pool and pool[mirror.key()].sym_factor == -t.sym_factor:
                del pool[t.key()], pool[mirror.key()]
                # orient from the later vertex
                if rank(p.source) <= rank(p.target):
                    pj, c = Propagator(p.source, p.target, PAULI_JORDAN), t.sym_factor
                else:
                    pj, c = Propagator(p.target, p.source, PAULI_JORDAN), -t.sym_factor
                out.append(replace(t, propagator_factors=tuple(others + [pj]), sym_factor=c))
                merged = True
                break
        if not merged:
            out.append(pool.pop(t.key()))
    return TermSum(out, ts.meta)


def render(ts: TermSum, group: bool = True) -> str:
    source = group_pauli_jordan(ts) if group else ts
    return "\n".join(render_term(t) for t in source.terms)
