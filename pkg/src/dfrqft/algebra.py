"""Weyl-algebra layer of the DFR quantum spacetime.

Covectors are plain length-4 arrays ``(k_0, k_1, k_2, k_3)``. Bilinear forms
``k_mu sigma^{mu nu} k'_nu`` are evaluated directly on these components; no
metric is applied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

UNIT_TOL = 1e-12

# Levi-Civita symbol on three indices.
_EPS3 = np.zeros((3, 3, 3))
_EPS3[0, 1, 2] = _EPS3[1, 2, 0] = _EPS3[2, 0, 1] = 1.0
_EPS3[0, 2, 1] = _EPS3[2, 1, 0] = _EPS3[1, 0, 2] = -1.0

_ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def _as_covector(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape != (4,):
        raise ValueError(f"expected a 4-component covector, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("covector components must be finite")
    return k


def _check_lambda(lambda_p: float) -> float:
    lambda_p = float(lambda_p)
    if not lambda_p > 0:
        raise ValueError(f"lambda_p must be positive, got {lambda_p}")
    return lambda_p


@dataclass(frozen=True)
class SigmaPoint:
    """A point of the base Sigma_1: unit electric vector ``e`` and a sheet sign.

    The magnetic part equals ``sign * e``: both parts have unit norm and
    ``e . m = sign``, so the two Quantum Conditions hold by construction.
    """

    e: tuple[float, float, float]
    sign: int = 1

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.shape != (3,):
            raise ValueError("e must be a 3-vector")
        if abs(np.linalg.norm(e) - 1.0) > UNIT_TOL:
            raise ValueError(f"e must be a unit vector, |e| = {np.linalg.norm(e)!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "e", tuple(float(c) for c in e))

    @classmethod
    def from_direction(cls, v, sign: int = 1) -> "SigmaPoint":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)), sign)

    def matrix(self) -> np.ndarray:
        """Antisymmetric sigma^{mu nu} (upper indices)."""
        return sigma_matrices(np.asarray(self.e)[None, :], np.array([self.sign]))[0]


def sigma_matrices(e: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Batched sigma^{mu nu} for unit vectors ``e`` (N, 3) and signs (N,)."""
    e = np.asarray(e, dtype=float)
    signs = np.asarray(signs, dtype=float)
    out = np.zeros(e.shape[:-1] + (4, 4))
    out[..., 0, 1:] = e
    out[..., 1:, 0] = -e
    out[..., 1:, 1:] = signs[..., None, None] * np.einsum("ijk,...k->...ij", _EPS3, e)
    return out


def quantum_conditions(sigma: np.ndarray) -> tuple[float, float]:
    """Return ``(sigma_{mu nu} sigma^{mu nu}, ((1/4) sigma_{mu nu} (*sigma)^{mu nu})**2)``.

    On Sigma_1 these are 0 and 1. The second invariant equals the squared
    Pfaffian of ``sigma``.
    """
    lower = _ETA @ sigma @ _ETA
    first = float(np.sum(lower * sigma))
    a = sigma
    pf = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
    return first, float(pf**2)


def twist_exponent(k1, k2, sigma: SigmaPoint) -> float:
    """The bilinear form ``k1_mu sigma^{mu nu} k2_nu``."""
    return float(_as_covector(k1) @ sigma.matrix() @ _as_covector(k2))


def twist_phase(k1, k2, sigma: SigmaPoint, lambda_p: float) -> complex:
    """Moyal twist ``exp(i (lambda_p**2 / 2) k1 sigma k2)``."""
    lambda_p = _check_lambda(lambda_p)
    return complex(np.exp(0.5j * lambda_p**2 * twist_exponent(k1, k2, sigma)))


@dataclass(frozen=True)
class WeylElement:
    """``phase * exp(i k_mu q^mu)`` in a fixed irreducible representation."""

    momentum: tuple[float, float, float, float]
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        k = _as_covector(self.momentum)
        if abs(abs(self.phase) - 1.0) > UNIT_TOL:
            raise ValueError(f"phase must be unimodular, |phase| = {abs(self.phase)!r}")
        object.__setattr__(self, "momentum", tuple(float(c) for c in k))
        object.__setattr__(self, "phase", complex(self.phase))


def weyl_product(a: WeylElement, b: WeylElement, sigma: SigmaPoint, lambda_p: float) -> WeylElement:
    """Moyal product of two Weyl elements."""
    k1 = np.asarray(a.momentum)
    k2 = np.asarray(b.momentum)
    phase = a.phase * b.phase * twist_phase(k1, k2, sigma, lambda_p)
    # renormalize to stay on the unit circle after repeated products
    phase /= abs(phase)
    return WeylElement(tuple(k1 + k2), phase)


@dataclass(frozen=True)
class StateFunctional:
    """Generating functional ``k -> omega(exp(i k q))`` of a state."""

    eval: Callable[[np.ndarray], complex]
    x: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    lambda_p: float = 1.0

    def __call__(self, k) -> complex:
        return complex(self.eval(_as_covector(k)))


def optimal_state_eval(k, x, lambda_p: float) -> complex:
    """Optimally localized state around ``x``: Gaussian in the Euclidean norm of ``k``."""
    lambda_p = _check_lambda(lambda_p)
    k = _as_covector(k)
    x = _as_covector(x)
    return complex(np.exp(-0.5 * lambda_p**2 * np.dot(k, k) + 1j * np.dot(k, x)))


def optimal_state(x=(0.0, 0.0, 0.0, 0.0), lambda_p: float = 1.0) -> StateFunctional:
    x = tuple(float(c) for c in _as_covector(x))
    lambda_p = _check_lambda(lambda_p)
    return StateFunctional(lambda k: optimal_state_eval(k, x, lambda_p), x=x, lambda_p=lambda_p)


class NumericalDifferentiationError(ArithmeticError):
    pass


def _five_point(f: Callable[[float], complex], h: float) -> tuple[complex, complex]:
    f2p, f1p, f0, f1m, f2m = f(2 * h), f(h), f(0.0), f(-h), f(-2 * h)
    d1 = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h)
    d2 = (-f2p + 16 * f1p - 30 * f0 + 16 * f1m - f2m) / (12 * h * h)
    return d1, d2


def state_moments(
    s: StateFunctional, mu_index: int, step: float | None = None, *, tol: float = 1e-8
) -> tuple[float, float]:
    """Mean and variance of ``q^mu`` from derivatives of the generating functional.

    With ``f(t) = omega(exp(i t q^mu))`` one has ``f'(0) = i <q>`` and
    ``f''(0) = -<q^2>``. Derivatives use a five-point central stencil refined
    by one Richardson step (step ``h`` against ``2h``).
    """
    if mu_index not in (0, 1, 2, 3):
        raise ValueError("mu_index must be in 0..3")
    if step is None:
        step = 1e-3 / s.lambda_p
    if not step > 0:
        raise ValueError("step must be positive")
    unit = np.zeros(4)
    unit[mu_index] = 1.0

    def f(t: float) -> complex:
        return s(t * unit)

    d1_h, d2_h = _five_point(f, step)
    d1_2h, d2_2h = _five_point(f, 2 * step)
    # O(h^4) stencil: Richardson weight 2**4
    d1 = (16 * d1_h - d1_2h) / 15
    d2 = (16 * d2_h - d2_2h) / 15
    mean = float((d1 / 1j).real)
    second = float(-d2.real)
    variance = second - mean**2
    if variance < -tol * max(1.0, second):
        raise NumericalDifferentiationError(
            f"negative variance {variance:.3e} along axis {mu_index}; reduce the step"
        )
    return mean, max(variance, 0.0)


def check_stur(deltas, lambda_p: float) -> tuple[bool, bool]:
    """Check both space-time uncertainty relations for ``(dq0, dq1, dq2, dq3)``."""
    d = np.asarray(deltas, dtype=float)
    if d.shape != (4,) or not np.all(np.isfinite(d)):
        raise ValueError("deltas must be four finite numbers")
    bound = 0.5 * float(lambda_p) ** 2
    time_space = d[0] * (d[1] + d[2] + d[3])
    space_space = d[1] * d[2] + d[1] * d[3] + d[2] * d[3]
    return bool(time_space >= bound), bool(space_space >= bound)


@dataclass(frozen=True)
class TestFunction:
    """A test function carried by its Fourier transform ``fhat``."""

    __test__ = False  # not a pytest class

    fhat: Callable[[np.ndarray], complex]
    name: str = field(default="f")

    def __call__(self, k) -> complex:
        value = complex(self.fhat(np.asarray(k, dtype=float)))
        if not np.isfinite(value):
            raise ValueError(f"{self.name}^ is not finite at {k!r}")
        return value

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return TestFunction(lambda k: self.fhat(k) + other.fhat(k), f"{self.name}+{other.name}")


def gaussian_test_function(width: float = 1.0, name: str = "g") -> TestFunction:
    """``fhat(k) = exp(-width**2 |k|_E**2 / 2)`` with the Euclidean norm."""
    return TestFunction(lambda k: np.exp(-0.5 * width**2 * np.dot(k, k)), name)


def delta_test_function(name: str = "delta") -> TestFunction:
    """Formal delta at the origin: ``fhat == 1``."""
    return TestFunction(lambda k: 1.0, name)


def integral_functional(f: TestFunction, k) -> complex:
    """Action of ``I(f)`` on ``exp(i k q)`` in any representation: ``fhat(-k)``."""
    return f(-_as_covector(k))
