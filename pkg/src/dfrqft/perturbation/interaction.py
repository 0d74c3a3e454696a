"""Non-local effective interaction built from a local field polynomial."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from ..algebra import TestFunction, gaussian_test_function
from ..kernel import MomentumConfig, lambda_closed
from .wick import Vertex, interaction_vertex


@dataclass(frozen=True)
class LocalFieldSpec:
    """``weight * f(x) * prod_j d^{a_j} phi(x)`` with one multi-index per factor."""

    n: int
    derivative_multiindices: tuple[tuple[int, int, int, int], ...] | None = None
    coefficient: TestFunction = field(default_factory=gaussian_test_function)
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        a = self.derivative_multiindices
        if a is not None:
            a = tuple(tuple(int(c) for c in m) for m in a)
            if len(a) != self.n or any(len(m) != 4 or min(m) < 0 for m in a):
                raise ValueError("need n multi-indices of four non-negative integers")
            object.__setattr__(self, "derivative_multiindices", a)
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def coefficient_ref(self) -> str:
        return self.coefficient.name


def phi_n_interaction(n: int, g: TestFunction | None = None) -> LocalFieldSpec:
    """``-(1/n!) g phi^n``."""
    return LocalFieldSpec(n, None, g or gaussian_test_function(name="g"), Fraction(-1, factorial(n)))


@dataclass(frozen=True)
class EffectiveInteraction:
    """Momentum-space integrand plus its position-space record.

    ``integrand(k) = weight * ghat(-sum k) * prod_j (i k^j)^{a_j} * Lambda_n(k)``.
    The symbolic layer only sees ``record`` and ``vertex``; kernel values
    enter through ``integrand`` alone.
    """

    spec: LocalFieldSpec

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def has_kernel(self) -> bool:
        return self.spec.n > 1

    def integrand(self, momenta, lambda_p: float) -> complex:
        cfg = momenta if isinstance(momenta, MomentumConfig) else MomentumConfig(momenta)
        if cfg.n != self.n:
            raise ValueError(f"expected {self.n} momenta, got {cfg.n}")
        k = cfg.momenta
        value = complex(self.spec.weight) * self.spec.coefficient(-k.sum(axis=0))
        if self.spec.derivative_multiindices is not None:
            for kj, a in zip(k, self.spec.derivative_multiindices):
                value *= complex(np.prod((1j * kj) ** np.asarray(a)))
        if self.has_kernel and lambda_p != 0:
            value *= lambda_closed(cfg, lambda_p)
        return value

    def record(self) -> dict:
        slots = [f"x.{j}" for j in range(1, self.n + 1)] if self.has_kernel else ["x"]
        a = self.spec.derivative_multiindices or [(0, 0, 0, 0)] * self.n
        return {
            "weight": {"num": self.spec.weight.numerator, "den": self.spec.weight.denominator},
            "cutoff": f"{self.spec.coefficient_ref}(x)",
            "kernel": f"Gamma_{self.n}({','.join(slots)};x)" if self.has_kernel else None,
            "fields": [{"slot": s, "derivative": list(m)} for s, m in zip(slots, a)],
            "integration_vars": ["x"] + (slots if self.has_kernel else []),
        }

    def vertex(self, stamp: str) -> Vertex:
        return interaction_vertex(stamp, self.n, self.spec.weight, self.spec.derivative_multiindices)


def effective_interaction(spec: LocalFieldSpec) -> EffectiveInteraction:
    return EffectiveInteraction(spec)
