"""Collision-prone random band selection (system S-hat).

Each user independently picks a band every slot from its column of a
selection-probability matrix; simultaneous picks of one band by several
backlogged users all fail. Closed analysis exists for two users on one or two
bands via dominant systems (a designated queue transmits dummy packets when
empty, which decouples the interaction); the general multi-user case is only
simulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError, RateMatrix
from .optim import FractionalCoeffs, maximize_fractional_1d

_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SelectionMatrix:
    """Per-user band selection probabilities gamma[j, k]; column sums at most one."""

    gamma: np.ndarray

    def __post_init__(self) -> None:
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 2:
            raise ConfigurationError("gamma must be an M_p x M_s matrix")
        if np.any(gamma < -_TOL):
            raise ConfigurationError("gamma entries must be nonnegative")
        if np.any(gamma.sum(axis=0) > 1 + _TOL):
            raise ConfigurationError("gamma column sums must not exceed 1")
        object.__setattr__(self, "gamma", np.clip(gamma, 0.0, None))

    @property
    def m_p(self) -> int:
        return self.gamma.shape[0]

    @property
    def m_s(self) -> int:
        return self.gamma.shape[1]


@dataclass(frozen=True)
class DominantEnvelopePoint:
    """Envelope point of one dominant system ("first": user 1 maximized, "second": user 2)."""

    fixed_lambda: float
    dominant: str
    feasible: bool
    max_lambda: float | None = None
    gamma_star: SelectionMatrix | None = None


def conditional_service_rate(gamma, nonempty, rates: RateMatrix, k: int) -> float:
    """Service rate of backlogged user k: sum_j mu[j,k]*gamma[j,k]*prod_{v in nonempty, v!=k}(1-gamma[j,v]).

    ``nonempty`` is the set of users with backlogged queues (k included by
    convention); only they can collide with k.
    """
    g = np.asarray(getattr(gamma, "gamma", gamma), dtype=float)
    if g.shape != rates.mu.shape:
        raise ConfigurationError(f"gamma has shape {g.shape}, expected {rates.mu.shape}")
    if not 0 <= k < rates.m_s:
        raise ConfigurationError(f"user index {k} out of range")
    others = [v for v in set(nonempty) if v != k]
    clear = np.prod(1.0 - g[:, others], axis=1) if others else np.ones(rates.m_p)
    return float(np.sum(rates.mu[:, k] * g[:, k] * clear))


def _coeffs(mu: np.ndarray, gamma21: float, lambda_s2: float) -> FractionalCoeffs:
    """Reduced fractional-program coefficients for a fixed gamma21 (2x2 instance)."""
    g21b = 1.0 - gamma21
    return FractionalCoeffs(
        K1=g21b * mu[0, 0] - gamma21 * mu[1, 0],
        K2=g21b * mu[0, 0],
        C=g21b * mu[1, 1] - gamma21 * mu[0, 1],
        D=gamma21 * mu[0, 1],
        lambda_s2=lambda_s2,
        gamma21=gamma21,
    )


def _dominant1_at(mu: np.ndarray, lambda_s2: float, gamma21: float) -> tuple[float, float] | None:
    """Best lambda_s1 for a fixed gamma21, or None when lambda_s2 is unsupportable there.

    lambda_s1 = (1-g21)*mu11 + g21*mu21 + lambda_s2 * (g22*K1 - K2)/(D + C*g22),
    the affine lift of the reduced fractional objective.
    """
    coeffs = _coeffs(mu, gamma21, lambda_s2)
    g22, status = maximize_fractional_1d(coeffs)
    if status != "optimal":
        return None
    base = (1.0 - gamma21) * mu[0, 0] + gamma21 * mu[1, 0]
    if lambda_s2 == 0:
        return base, g22
    denom = coeffs.D + coeffs.C * g22  # equals mu_s2 >= lambda_s2 > 0
    return base + lambda_s2 * (g22 * coeffs.K1 - coeffs.K2) / denom, g22


def dominant1_envelope_2x2(mu, lambda_s2: float, grid_step: float = 1e-3) -> DominantEnvelopePoint:
    """Max stable rate of user 1 when user 2's rate is fixed (user 1 sends dummy packets).

    Sweeps gamma21 over a grid, solves the inner one-dimensional fractional
    program in closed form, then refines around the best grid point with a
    golden-section pass.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (2, 2):
        raise ConfigurationError("mu must be 2x2")
    if lambda_s2 < 0:
        raise ConfigurationError("lambda_s2 must be >= 0")
    if lambda_s2 > max(mu[0, 1], mu[1, 1]) + _TOL:
        return DominantEnvelopePoint(fixed_lambda=lambda_s2, dominant="first", feasible=False)

    n = int(round(1.0 / grid_step))
    best_val = -math.inf
    best_g21 = None
    for i in range(n + 1):
        g21 = min(i * grid_step, 1.0)
        res = _dominant1_at(mu, lambda_s2, g21)
        if res is not None and res[0] > best_val:
            best_val, best_g21 = res[0], g21
    if best_g21 is None:
        return DominantEnvelopePoint(fixed_lambda=lambda_s2, dominant="first", feasible=False)

    def value(g21: float) -> float:
        res = _dominant1_at(mu, lambda_s2, g21)
        return res[0] if res is not None else -math.inf

    lo = max(best_g21 - grid_step, 0.0)
    hi = min(best_g21 + grid_step, 1.0)
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = value(x1), value(x2)
    for _ in range(60):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = value(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = value(x2)
    for cand in (best_g21, (a + b) / 2.0):
        v = value(cand)
        if v > best_val:
            best_val, best_g21 = v, cand

    g21 = best_g21
    g22 = _dominant1_at(mu, lambda_s2, g21)[1]
    gamma = SelectionMatrix(np.array([[1.0 - g21, 1.0 - g22], [g21, g22]]))
    return DominantEnvelopePoint(
        fixed_lambda=lambda_s2, dominant="first", feasible=True,
        max_lambda=float(best_val), gamma_star=gamma,
    )


def dominant2_envelope_2x2(mu, lambda_s1: float, grid_step: float = 1e-3) -> DominantEnvelopePoint:
    """Mirror image of dominant1_envelope_2x2 with the user roles swapped."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (2, 2):
        raise ConfigurationError("mu must be 2x2")
    swapped = dominant1_envelope_2x2(mu[:, ::-1], lambda_s1, grid_step)
    gamma = None
    if swapped.gamma_star is not None:
        gamma = SelectionMatrix(swapped.gamma_star.gamma[:, ::-1])
    return DominantEnvelopePoint(
        fixed_lambda=lambda_s1,
        dominant="second",
        feasible=swapped.feasible,
        max_lambda=swapped.max_lambda,
        gamma_star=gamma,
    )


def region_2x2_check(mu, lambda_pair) -> bool:
    """True iff the rate pair lies strictly inside the union of the two dominant regions."""
    lam1, lam2 = (float(v) for v in lambda_pair)
    if lam1 < 0 or lam2 < 0:
        return False
    d1 = dominant1_envelope_2x2(mu, lam2)
    if d1.feasible and lam1 < d1.max_lambda - _TOL:
        return True
    d2 = dominant2_envelope_2x2(mu, lam1)
    return d2.feasible and lam2 < d2.max_lambda - _TOL


def shat_section_lambda2(mu, lambda_s1: float, tol: float = 1e-6) -> float | None:
    """Largest lambda_s2 such that (lambda_s1, lambda_s2) is in the union region.

    Takes the better of the dominant-2 envelope at lambda_s1 and the inverse of
    the dominant-1 envelope (nonincreasing in lambda_s2, so invertible by
    bisection). None when even lambda_s2 = 0 cannot carry lambda_s1.
    """
    mu = np.asarray(mu, dtype=float)
    best = None
    d2 = dominant2_envelope_2x2(mu, lambda_s1)
    if d2.feasible:
        best = float(d2.max_lambda)

    def d1val(lam2: float) -> float:
        p = dominant1_envelope_2x2(mu, lam2)
        return p.max_lambda if p.feasible else -math.inf

    hi = max(mu[0, 1], mu[1, 1])
    if d1val(0.0) >= lambda_s1:
        lo = 0.0
        if hi > 0 and d1val(hi) >= lambda_s1:
            lo = hi
        elif hi > 0:
            while hi - lo > tol:
                mid = (lo + hi) / 2.0
                if d1val(mid) >= lambda_s1:
                    lo = mid
                else:
                    hi = mid
        if best is None or lo > best:
            best = lo
    return None if best is None else float(best)


def one_band_gamma_opt(mu11: float, mu12: float, lambda_s2: float) -> SelectionMatrix | None:
    """Optimal selection probabilities when only band 1 is ever available.

    The sole non-trivial parameter is user 1's probability of staying on the
    live band: gamma11 = 1 - min(sqrt(lambda_s2/mu12), 1); user 2 always picks
    the live band. None when lambda_s2 exceeds mu12.
    """
    if mu11 < 0 or mu12 < 0 or lambda_s2 < 0:
        raise ConfigurationError("rates must be >= 0")
    if mu12 == 0:
        if lambda_s2 > 0:
            return None
        g11 = 1.0
    else:
        ratio = lambda_s2 / mu12
        if ratio > 1.0 + _TOL:
            return None
        g11 = 1.0 - min(math.sqrt(ratio), 1.0)
    return SelectionMatrix(np.array([[g11, 1.0], [1.0 - g11, 0.0]]))


def one_band_region_check(mu11: float, mu12: float, lambda_pair) -> bool:
    """Single-band region: sqrt(lambda1/mu11) + sqrt(lambda2/mu12) < 1 (not convex)."""
    total = 0.0
    for lam, mu in zip(lambda_pair, (mu11, mu12)):
        if lam < 0:
            return False
        if lam == 0:
            continue
        if mu == 0:
            return False
        total += math.sqrt(lam / mu)
    return total < 1.0 - _TOL
