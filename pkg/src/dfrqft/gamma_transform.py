"""Position-space probes of Gamma_n and commutative-limit diagnostics.

The full 4n-dimensional inverse transform is never formed; Lambda_n is
sampled on one or two momentum axes with every other component frozen.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .kernel import (
    MomentumConfig,
    betas_array,
    delta_part_array,
    lambda_closed_array,
    lambda_minus_one_array,
)
from .microlocal import DirectionKind, classify_direction

NYQUIST_LEVEL = 1e-3


@dataclass(frozen=True)
class SliceSpec:
    """Active axes are ``(j, mu)`` pairs, 0-based: momentum index and component."""

    active_axes: tuple[tuple[int, int], ...]
    fixed: MomentumConfig
    k_max: float
    points: int = 256

    def __post_init__(self):
        axes = tuple((int(j), int(mu)) for j, mu in self.active_axes)
        if not 1 <= len(axes) <= 2:
            raise ValueError("a slice has one or two active axes")
        if len(set(axes)) != len(axes):
            raise ValueError("active axes must be distinct")
        fixed = self.fixed if isinstance(self.fixed, MomentumConfig) else MomentumConfig(self.fixed)
        for j, mu in axes:
            if not (0 <= j < fixed.n and 0 <= mu < 4):
                raise ValueError(f"axis {(j, mu)} out of range for n = {fixed.n}")
        if self.points < 16 or self.points & (self.points - 1):
            raise ValueError("points must be a power of two, at least 16")
        if not self.k_max > 0:
            raise ValueError("k_max must be positive")
        object.__setattr__(self, "active_axes", axes)
        object.__setattr__(self, "fixed", fixed)

    @property
    def dk(self) -> float:
        return 2.0 * self.k_max / self.points

    def momentum_axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.dk

    def position_axis(self) -> np.ndarray:
        dx = 2.0 * np.pi / (self.points * self.dk)
        return (np.arange(self.points) - self.points // 2) * dx

    def momentum_grid(self) -> np.ndarray:
        """Momentum configurations on the slice, shape ``(N,)*d + (n, 4)``."""
        axis = self.momentum_axis()
        d = len(self.active_axes)
        grid = np.broadcast_to(self.fixed.momenta, (self.points,) * d + self.fixed.momenta.shape).copy()
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        for (j, mu), values in zip(self.active_axes, mesh):
            grid[..., j, mu] = values
        return grid


@dataclass(frozen=True)
class SliceResult:
    positions: tuple[np.ndarray, ...]
    values: np.ndarray
    lambda_p: float
    mass_concentration: float
    nyquist_warning: bool
    samples: np.ndarray  # the sampled momentum-space kernel
    dk: float

    def normalization(self) -> float:
        """Factor ``c`` in ``sum |values|^2 = c * sum |samples|^2``."""
        n = self.values.shape[0]
        return ((self.dk / (2 * np.pi)) ** 2 * n) ** self.values.ndim


def _inverse_transform(samples: np.ndarray, dk: float) -> np.ndarray:
    # sum_n f(k_n) exp(+i k_n x_m) dk / (2 pi) per axis, centred grids
    axes = tuple(range(samples.ndim))
    n = samples.shape[0]
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(samples, axes=axes), axes=axes), axes=axes)
    return out * (n * dk / (2.0 * np.pi)) ** samples.ndim


def mass_concentration(values: np.ndarray, fraction: float = 0.1) -> float:
    """Share of the l1 mass inside the central ``fraction`` of the window, per axis."""
    mass = np.abs(values)
    total = mass.sum()
    if total == 0:
        return 0.0
    n = values.shape[0]
    half = fraction * n / 2.0
    idx = np.arange(n) - n // 2
    inside = np.abs(idx) <= half
    sel = np.ix_(*([inside] * values.ndim))
    return float(mass[sel].sum() / total)


def _nyquist_flag(spec: SliceSpec, samples: np.ndarray, lambda_p: float) -> bool:
    d = samples.ndim
    edge = []
    grid = spec.momentum_grid()
    for axis in range(d):
        for pos in (0, -1):
            index = [slice(None)] * d
            index[axis] = pos
            edge_vals = np.abs(samples[tuple(index)])
            worst = np.unravel_index(np.argmax(edge_vals), edge_vals.shape)
            cfg_index = list(worst)
            cfg_index.insert(axis, pos)
            edge.append((edge_vals.max(), grid[tuple(cfg_index)]))
    for level, cfg in edge:
        if level <= NYQUIST_LEVEL:
            continue
        try:
            if classify_direction(MomentumConfig(cfg)).kind is DirectionKind.OFF:
                return True
        except ValueError:
            continue
    return False


def gamma_slice(spec: SliceSpec, lambda_p: float, part: str = "total") -> SliceResult:
    """Inverse Fourier transform of Lambda_n along the slice.

    ``part`` selects the sampled kernel: ``"total"``, ``"delta"`` or
    ``"continuous"`` (the two pieces of the split).
    """
    grid = spec.momentum_grid()
    if part == "total":
        samples = lambda_closed_array(grid, lambda_p)
    elif part == "delta":
        samples = delta_part_array(grid, lambda_p)
    elif part == "continuous":
        samples = lambda_closed_array(grid, lambda_p) - delta_part_array(grid, lambda_p)
    else:
        raise ValueError(f"unknown part {part!r}")
    values = _inverse_transform(samples.astype(complex), spec.dk)
    x = spec.position_axis()
    return SliceResult(
        positions=tuple(x for _ in spec.active_axes),
        values=values,
        lambda_p=float(lambda_p),
        mass_concentration=mass_concentration(values),
        nyquist_warning=_nyquist_flag(spec, samples, lambda_p),
        samples=samples,
        dk=spec.dk,
    )


@dataclass(frozen=True)
class LimitRow:
    lambda_p: float
    sup: float
    bound: float


def ball_probes(radius: float, probes: int, n: int, seed: int = 0) -> np.ndarray:
    """Quasi-random configurations with every ``|k^j| <= radius`` (Euclidean 4-norm)."""
    if not radius > 0 or probes < 1 or n < 1:
        raise ValueError("need radius > 0, probes >= 1, n >= 1")
    sampler = qmc.Halton(d=5 * n, scramble=True, seed=seed)
    u = sampler.random(probes).reshape(probes, n, 5)
    # direction from a Gaussian image of 4 coordinates, radius from the fifth
    g = ndtri(np.clip(u[..., :4], 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    r = radius * u[..., 4:5] ** 0.25
    return g * r


def commutative_limit_table(
    radius: float,
    probes: int,
    lambda_values,
    n: int = 2,
    seed: int = 0,
) -> list[LimitRow]:
    """``sup |Lambda_n - 1|`` over a fixed probe set next to ``max (beta_+^2 + beta_-^2)/12``."""
    if probes < 10:
        raise ValueError("need at least 10 probes")
    k = ball_probes(radius, probes, n, seed)
    rows = []
    for lam in lambda_values:
        lam = float(lam)
        if lam < 0:
            raise ValueError("lambda_p must be non-negative")
        dev = np.abs(lambda_minus_one_array(k, lam))
        bp, bm = betas_array(k, lam)
        rows.append(LimitRow(lam, float(dev.max()), float(((bp**2 + bm**2) / 12.0).max())))
    return rows


def limit_exponent(rows: list[LimitRow]) -> float:
    """Least-squares slope of ``log sup`` against ``log lambda_p``."""
    lam = np.array([r.lambda_p for r in rows if r.lambda_p > 0 and r.sup > 0])
    sup = np.array([r.sup for r in rows if r.lambda_p > 0 and r.sup > 0])
    if lam.size < 2:
        raise ValueError("need two positive rows to fit an exponent")
    return float(np.polyfit(np.log(lam), np.log(sup), 1)[0])
