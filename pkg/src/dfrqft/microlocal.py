"""Singular directions of Lambda_n: the varieties K_+, K_- and ray asymptotics."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .kernel import MomentumConfig, lambda_closed_array, pair_sum_vectors_array

DEFAULT_TOL = 1e-9
# Lambda_n is the mean of two sinc terms, each tending to 0 or staying at 1.
ADMISSIBLE_LIMITS = (0.0, 0.5, 1.0)


class DecayUnderflowError(ArithmeticError):
    pass


class DirectionKind(enum.Enum):
    IN_BOTH = "InBoth"
    IN_PLUS_ONLY = "InPlusOnly"
    IN_MINUS_ONLY = "InMinusOnly"
    OFF = "Off"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DirectionClass:
    kind: DirectionKind
    residual_plus: float
    residual_minus: float

    @property
    def in_k0(self) -> bool:
        return self.kind is not DirectionKind.OFF


def _config(cfg) -> MomentumConfig:
    return cfg if isinstance(cfg, MomentumConfig) else MomentumConfig(cfg)


def variety_residual(cfg, sign: int) -> np.ndarray:
    """Left-hand side of the three K_sign equations; zero iff ``cfg`` lies in K_sign."""
    cfg = _config(cfg)
    if cfg.n < 2:
        raise ValueError("the varieties K_pm are defined for n >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    v_plus, v_minus = pair_sum_vectors_array(cfg.momenta)
    return v_plus if sign == 1 else v_minus


def pair_scale(cfg) -> float:
    """``max_{j<l} |k^j| |k^l|`` (Euclidean 4-norms); residuals scale like this."""
    norms = np.linalg.norm(_config(cfg).momenta, axis=1)
    prod = np.outer(norms, norms)
    iu = np.triu_indices(len(norms), 1)
    return float(prod[iu].max()) if len(iu[0]) else 0.0


def normalized_residuals(cfg) -> tuple[float, float]:
    cfg = _config(cfg)
    scale = pair_scale(cfg)
    if scale == 0.0:
        return 0.0, 0.0
    rp = float(np.linalg.norm(variety_residual(cfg, 1))) / scale
    rm = float(np.linalg.norm(variety_residual(cfg, -1))) / scale
    return rp, rm


def classify_direction(cfg, tol: float = DEFAULT_TOL) -> DirectionClass:
    cfg = _config(cfg)
    if cfg.is_zero():
        raise ValueError("the zero configuration has no direction")
    if cfg.n < 2:
        raise ValueError("classification needs n >= 2")
    rp, rm = normalized_residuals(cfg)
    plus, minus = rp <= tol, rm <= tol
    if plus and minus:
        kind = DirectionKind.IN_BOTH
    elif plus:
        kind = DirectionKind.IN_PLUS_ONLY
    elif minus:
        kind = DirectionKind.IN_MINUS_ONLY
    else:
        kind = DirectionKind.OFF
    return DirectionClass(kind, rp, rm)


def in_k0(cfg, tol: float = DEFAULT_TOL) -> bool:
    """Membership in ``K_0 = K_+ u K_-``; the zero configuration is a member."""
    cfg = _config(cfg)
    if cfg.is_zero():
        return True
    rp, rm = normalized_residuals(cfg)
    return min(rp, rm) <= tol


def solve_single_sheet(k_fixed, sign: int = 1, free_index: int = -1, energy: float = 0.0) -> MomentumConfig:
    """Complete ``k_fixed`` to a point of K_sign by solving for one momentum.

    ``v_sign`` is affine in any single ``k^j``; with the energy of that
    momentum pinned to ``energy``, the three spatial components solve a 3x3
    linear system.
    """
    k = np.array(k_fixed, dtype=float)
    n = k.shape[0]
    j = free_index % n

    def residual(spatial):
        trial = k.copy()
        trial[j] = [energy, *spatial]
        vp, vm = pair_sum_vectors_array(trial)
        return vp if sign == 1 else vm

    base = residual(np.zeros(3))
    jac = np.stack([residual(np.eye(3)[c]) - base for c in range(3)], axis=1)
    spatial = np.linalg.solve(jac, -base)
    k[j] = [energy, *spatial]
    return MomentumConfig(k)


@dataclass(frozen=True)
class DecayReport:
    direction: MomentumConfig
    kind: DirectionKind
    asymptote: float
    limit: float
    fitted_exponent: float
    fit_residual: float
    t_range: tuple[float, float]
    samples: int
    envelope: bool

    @property
    def exponent_defined(self) -> bool:
        return not math.isnan(self.fitted_exponent)


def _fit_loglog(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    lt, ly = np.log(t), np.log(y)
    A = np.stack([lt, np.ones_like(lt)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def ray_decay(
    cfg,
    lambda_p: float = 1.0,
    t_min: float = 10.0,
    t_max: float = 1000.0,
    samples: int = 400,
    *,
    tol: float = DEFAULT_TOL,
    envelope_bins: int = 12,
) -> DecayReport:
    """Asymptotics of ``t -> Lambda_n(t cfg)`` on a log-spaced grid.

    ``asymptote`` is the mean over the last decile. The fit subtracts the
    nearest admissible limit (0, 1/2 or 1) and regresses ``log|Lambda - limit|``
    on ``log t`` over the last half of the samples. If the plain fit leaves
    a residual larger than the oscillation it is meant to average (the sinc
    terms are sampled far below their period), the fit is redone on the
    per-bin maxima of the tail.
    """
    cfg = _config(cfg)
    if not t_max > t_min > 0:
        raise ValueError("need t_max > t_min > 0")
    if samples < 8:
        raise ValueError("need at least 8 samples")
    kind = classify_direction(cfg, tol).kind
    t = np.geomspace(t_min, t_max, samples)
    values = lambda_closed_array(t[:, None, None] * cfg.momenta[None], lambda_p)
    last = values[-max(1, samples // 10):]
    asymptote = float(np.mean(last))
    limit = min(ADMISSIBLE_LIMITS, key=lambda a: abs(a - asymptote))

    tail = slice(samples // 2, None)
    dev = np.abs(values[tail] - limit)
    t_tail = t[tail]
    if not np.any(dev):
        return DecayReport(cfg, kind, asymptote, limit, math.nan, 0.0, (t_min, t_max), samples, False)
    if np.all(dev < 1e-300):
        raise DecayUnderflowError("all tail deviations underflow; shorten the ray")

    keep = dev > 1e-300
    slope, resid = _fit_loglog(t_tail[keep], dev[keep])
    used_envelope = False
    if resid > 0.1:
        bins = np.array_split(np.arange(len(t_tail)), min(envelope_bins, len(t_tail)))
        peaks = [b[np.argmax(dev[b])] for b in bins if len(b)]
        peaks = [p for p in peaks if dev[p] > 1e-300]
        if len(peaks) >= 3:
            slope, resid = _fit_loglog(t_tail[peaks], dev[peaks])
            used_envelope = True
    return DecayReport(cfg, kind, asymptote, limit, slope, resid, (t_min, t_max), samples, used_envelope)


def wf_candidate(x_cfg, k_cfg, lambda_samples, tol: float = DEFAULT_TOL) -> bool:
    """Test the containment condition for the wavefront set of Gamma_n^(delta).

    True iff ``x`` lies in K_0 and ``x - lam k`` lies in K_0 for every sampled
    ``lam``. Position tuples are tested against the same quadratic equations
    as momenta.
    """
    x = _config(x_cfg)
    k = _config(k_cfg)
    if x.n != k.n:
        raise ValueError("x_cfg and k_cfg must have the same number of points")
    lams = np.atleast_1d(np.asarray(lambda_samples, dtype=float))
    if lams.size == 0:
        raise ValueError("lambda_samples must be non-empty")
    if not in_k0(x, tol):
        return False
    return all(in_k0(MomentumConfig(x.momenta - lam * k.momenta), tol) for lam in lams)
