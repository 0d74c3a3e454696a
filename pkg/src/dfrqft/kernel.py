"""The non-commutativity kernel Lambda_n.

``Lambda_n(k^1..k^n)`` is the average over Sigma_1 of the twist phase
accumulated by n Weyl exponentials. Its closed form is
``(sinc(beta_+) + sinc(beta_-)) / 2`` with ``beta_pm = (lambda_p**2 / 2) |v_pm|``.

Functions ending in ``_array`` take momenta of shape ``(..., n, 4)`` and
broadcast over the leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import sigma_matrices

SINC_TAYLOR_CUTOFF = 1e-4
SINCM1_TAYLOR_CUTOFF = 0.1


class MomentumConfig:
    """An ordered tuple of n covectors, stored as an ``(n, 4)`` array."""

    __slots__ = ("momenta",)

    def __init__(self, momenta):
        k = np.array(momenta, dtype=float)
        if k.ndim == 1 and k.size % 4 == 0:
            k = k.reshape(-1, 4)
        if k.ndim != 2 or k.shape[1] != 4 or k.shape[0] < 1:
            raise ValueError(f"momenta must have shape (n, 4) with n >= 1, got {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ValueError("momentum components must be finite")
        k.setflags(write=False)
        self.momenta = k

    @property
    def n(self) -> int:
        return self.momenta.shape[0]

    def scaled(self, t: float) -> "MomentumConfig":
        return MomentumConfig(t * self.momenta)

    def rotated(self, rotation) -> "MomentumConfig":
        """Apply one rotation to every spatial part."""
        k = self.momenta.copy()
        k[:, 1:] = k[:, 1:] @ np.asarray(rotation, dtype=float).T
        return MomentumConfig(k)

    def parity(self) -> "MomentumConfig":
        k = self.momenta.copy()
        k[:, 1:] *= -1
        return MomentumConfig(k)

    def __neg__(self) -> "MomentumConfig":
        return MomentumConfig(-self.momenta)

    def __sub__(self, other: "MomentumConfig") -> "MomentumConfig":
        return MomentumConfig(self.momenta - other.momenta)

    def is_zero(self) -> bool:
        return not np.any(self.momenta)

    def __eq__(self, other) -> bool:
        return isinstance(other, MomentumConfig) and np.array_equal(self.momenta, other.momenta)

    def __hash__(self):
        return hash(self.momenta.tobytes())

    def __repr__(self) -> str:
        return f"MomentumConfig({self.momenta.tolist()!r})"


def _momenta(cfg) -> np.ndarray:
    if isinstance(cfg, MomentumConfig):
        return cfg.momenta
    return MomentumConfig(cfg).momenta


def pair_sum_vectors_array(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``v_pm = sum_{j<l} (k0^j kvec^l - k0^l kvec^j  pm  kvec^j x kvec^l)``.

    Uses prefix sums: ``sum_{j<l} a^j b^l = sum_l (sum_{j<l} a^j) b^l``.
    """
    k = np.asarray(k, dtype=float)
    k0 = k[..., 0]
    kv = k[..., 1:]
    prev_k0 = np.cumsum(k0, axis=-1) - k0
    prev_kv = np.cumsum(kv, axis=-2) - kv
    boost = np.sum(prev_k0[..., None] * kv - k0[..., None] * prev_kv, axis=-2)
    rot = np.sum(np.cross(prev_kv, kv), axis=-2)
    return boost + rot, boost - rot


def betas_array(k: np.ndarray, lambda_p: float) -> tuple[np.ndarray, np.ndarray]:
    v_plus, v_minus = pair_sum_vectors_array(k)
    scale = 0.5 * float(lambda_p) ** 2
    return scale * np.linalg.norm(v_plus, axis=-1), scale * np.linalg.norm(v_minus, axis=-1)


def sinc(x):
    """``sin(x)/x`` with ``sinc(0) = 1``; Taylor series below ``SINC_TAYLOR_CUTOFF``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < SINC_TAYLOR_CUTOFF
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def sinc_minus_one(x):
    """``sinc(x) - 1`` without cancellation for small arguments."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < SINCM1_TAYLOR_CUTOFF
    # -x^2/3! + x^4/5! - x^6/7! + x^8/9! - x^10/11!
    series = -x2 / 6.0 * (1 - x2 / 20.0 * (1 - x2 / 42.0 * (1 - x2 / 72.0 * (1 - x2 / 110.0))))
    safe = np.where(small, 1.0, x)
    out = np.where(small, series, np.sin(safe) / safe - 1.0)
    return out[()] if out.ndim == 0 else out


def lambda_closed_array(k: np.ndarray, lambda_p: float) -> np.ndarray:
    bp, bm = betas_array(k, lambda_p)
    return 0.5 * (sinc(bp) + sinc(bm))


def lambda_minus_one_array(k: np.ndarray, lambda_p: float) -> np.ndarray:
    bp, bm = betas_array(k, lambda_p)
    return 0.5 * (sinc_minus_one(bp) + sinc_minus_one(bm))


@dataclass(frozen=True)
class BetaPair:
    v_plus: np.ndarray
    v_minus: np.ndarray
    beta_plus: float
    beta_minus: float
    lambda_p: float


def beta_pair(cfg, lambda_p: float) -> BetaPair:
    if float(lambda_p) < 0:
        raise ValueError("lambda_p must be non-negative")
    v_plus, v_minus = pair_sum_vectors_array(_momenta(cfg))
    scale = 0.5 * float(lambda_p) ** 2
    return BetaPair(
        v_plus,
        v_minus,
        float(scale * np.linalg.norm(v_plus)),
        float(scale * np.linalg.norm(v_minus)),
        float(lambda_p),
    )


def lambda_closed(cfg, lambda_p: float) -> float:
    b = beta_pair(cfg, lambda_p)
    return float(0.5 * (sinc(b.beta_plus) + sinc(b.beta_minus)))


def lambda_minus_one(cfg, lambda_p: float) -> float:
    """``Lambda_n - 1`` evaluated stably near the commutative limit."""
    b = beta_pair(cfg, lambda_p)
    return float(0.5 * (sinc_minus_one(b.beta_plus) + sinc_minus_one(b.beta_minus)))


@dataclass(frozen=True)
class SphereQuadrature:
    """Normalized quadrature on S^2: Gauss-Legendre in cos(theta) times trapezoid in phi."""

    nodes: np.ndarray
    weights: np.ndarray
    order: tuple[int, int]

    def __post_init__(self):
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 1")
        if np.max(np.abs(np.linalg.norm(self.nodes, axis=1) - 1.0)) > 1e-12:
            raise ValueError("quadrature nodes must lie on the unit sphere")


@lru_cache(maxsize=8)
def sphere_quadrature(n_theta: int = 64, n_phi: int | None = None) -> SphereQuadrature:
    if n_phi is None:
        n_phi = 2 * n_theta
    if n_theta < 1 or n_phi < 1:
        raise ValueError("quadrature orders must be positive")
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - u * u)
    nodes = np.stack(
        [
            np.outer(s, np.cos(phi)).ravel(),
            np.outer(s, np.sin(phi)).ravel(),
            np.repeat(u, n_phi),
        ],
        axis=1,
    )
    # numerical unit-norm cleanup; leggauss nodes give |n| = 1 to ~1 ulp already
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.repeat(wu / 2.0, n_phi) / n_phi
    weights /= weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereQuadrature(nodes, weights, (n_theta, n_phi))


def lambda_quadrature(cfg, lambda_p: float, quad: SphereQuadrature | None = None) -> complex:
    """Two-sheet sphere average of the n-momentum twist phase.

    Independent of the ``v_pm`` reduction: the phase is built from the full
    sigma matrices, ``sum_{j<m} k^j sigma k^m``, at every node.
    """
    if quad is None:
        quad = sphere_quadrature()
    k = _momenta(cfg)
    n = k.shape[0]
    total = 0.0 + 0.0j
    for sign in (1, -1):
        sig = sigma_matrices(quad.nodes, np.full(len(quad.nodes), sign))
        # (N, n, n) matrix of k^j sigma k^m at every node
        forms = np.einsum("ja,Nab,mb->Njm", k, sig, k)
        upper = np.triu(np.ones((n, n), dtype=bool), 1)
        exponent = forms[:, upper].sum(axis=1)
        total += 0.5 * np.dot(quad.weights, np.exp(0.5j * float(lambda_p) ** 2 * exponent))
    return complex(total)


@dataclass(frozen=True)
class KernelSplit:
    total: float
    delta_part: float
    continuous_part: float


def lambda_split(cfg, lambda_p: float) -> KernelSplit:
    """Split Lambda_n into ``exp(-beta_+^2 - beta_-^2)`` and the remainder."""
    b = beta_pair(cfg, lambda_p)
    total = float(0.5 * (sinc(b.beta_plus) + sinc(b.beta_minus)))
    delta = float(np.exp(-b.beta_plus**2 - b.beta_minus**2))
    return KernelSplit(total, delta, total - delta)


def delta_part_array(k: np.ndarray, lambda_p: float) -> np.ndarray:
    bp, bm = betas_array(k, lambda_p)
    return np.exp(-bp**2 - bm**2)
