"""Stability envelope of the orthogonal band-allocation system (system S).

The general envelope is the LP over assignment fractions omega[j, k] (row and
column sums at most one); the closed forms cover the classic special cases:
two users/two bands, a single available band, symmetric users, symmetric
bands, and the fully symmetric network.

Convention used throughout the package: envelope computations use non-strict
constraints (the closure of the stability region), region-membership
predicates use strict inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optim
from .model import ConfigurationError, RateMatrix

_TOL = 1e-9


@dataclass(frozen=True)
class AssignmentMatrix:
    """Fractions omega[j, k] of slots in which band j is assigned to user k."""

    omega: np.ndarray

    def __post_init__(self) -> None:
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 2:
            raise ConfigurationError("omega must be an M_p x M_s matrix")
        if np.any(omega < -_TOL):
            raise ConfigurationError("omega entries must be nonnegative")
        if np.any(omega.sum(axis=1) > 1 + _TOL) or np.any(omega.sum(axis=0) > 1 + _TOL):
            raise ConfigurationError("omega row and column sums must not exceed 1")
        object.__setattr__(self, "omega", np.clip(omega, 0.0, None))

    @property
    def m_p(self) -> int:
        return self.omega.shape[0]

    @property
    def m_s(self) -> int:
        return self.omega.shape[1]


@dataclass(frozen=True)
class EnvelopePoint:
    """One point of a stability envelope: the largest supportable rate of one user.

    ``max_rate`` and ``omega_star`` are None when the fixed rates themselves are
    unsupportable (infeasible point).
    """

    fixed_rates: tuple[float, ...]
    free_user: int
    feasible: bool
    max_rate: float | None = None
    omega_star: AssignmentMatrix | None = None


def _fixed_vector(fixed_lambdas, m_s: int, k: int) -> np.ndarray:
    lam = np.asarray(fixed_lambdas, dtype=float)
    if lam.shape != (m_s,):
        raise ConfigurationError(f"fixed_lambdas must have length {m_s}")
    lam = lam.copy()
    lam[k] = 0.0
    if np.any(lam < 0):
        raise ConfigurationError("fixed rates must be >= 0")
    return lam


def envelope_point(rates: RateMatrix, fixed_lambdas, k: int) -> EnvelopePoint:
    """Maximize user k's stable rate with the other users' rates held fixed.

    Solves: max sum_j omega[j,k]*mu[j,k] subject to omega >= 0, row/column sums
    <= 1, and each fixed user's rate not exceeding its service rate. The entry
    of ``fixed_lambdas`` at position k is ignored.
    """
    m_p, m_s = rates.m_p, rates.m_s
    if not 0 <= k < m_s:
        raise ConfigurationError(f"user index {k} out of range")
    lam = _fixed_vector(fixed_lambdas, m_s, k)

    n = m_p * m_s  # variable v = j * m_s + l
    c = np.zeros(n)
    c[np.arange(m_p) * m_s + k] = rates.mu[:, k]
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for j in range(m_p):  # row sums
        r = np.zeros(n)
        r[j * m_s : (j + 1) * m_s] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for l in range(m_s):  # column sums
        r = np.zeros(n)
        r[np.arange(m_p) * m_s + l] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for l in range(m_s):  # service covers the fixed arrivals
        if l == k:
            continue
        r = np.zeros(n)
        r[np.arange(m_p) * m_s + l] = -rates.mu[:, l]
        rows.append(r)
        rhs.append(-lam[l])
    problem = optim.LpProblem(c=c, A=np.array(rows), b=np.array(rhs), lo=np.zeros(n), hi=np.ones(n))
    sol = optim.solve_lp(problem)
    if sol.status == "infeasible":
        return EnvelopePoint(fixed_rates=tuple(lam), free_user=k, feasible=False)
    if not sol.is_optimal:
        raise RuntimeError(f"envelope LP unexpectedly {sol.status}")
    omega = AssignmentMatrix(sol.x.reshape(m_p, m_s))
    return EnvelopePoint(
        fixed_rates=tuple(lam), free_user=k, feasible=True, max_rate=sol.value, omega_star=omega
    )


def two_by_two_closed_form(mu, lambda_s1: float) -> tuple[float, float] | None:
    """Closed-form envelope for 2 users / 2 bands.

    Maximizes eps*(mu12 - mu22) subject to lambda_s1 - mu11 <= eps*(mu21 - mu11)
    and 0 <= eps <= 1, where eps is the probability of the swapped assignment.
    Returns (eps_star, lambda_s2_max), or None when lambda_s1 is unsupportable.
    When mu12 == mu22 every feasible eps is optimal and the smallest is returned.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (2, 2):
        raise ConfigurationError("mu must be 2x2")
    if lambda_s1 < 0:
        raise ConfigurationError("lambda_s1 must be >= 0")
    mu11, mu12, mu21, mu22 = mu[0, 0], mu[0, 1], mu[1, 0], mu[1, 1]
    a = mu21 - mu11
    r = lambda_s1 - mu11
    if a > 0:
        if r / a > 1:  # lambda_s1 > mu21
            return None
        lower, upper = max(r / a, 0.0), 1.0
    elif a < 0:
        if r > 0:  # lambda_s1 > mu11
            return None
        lower, upper = 0.0, (min(r / a, 1.0) if r < 0 else 0.0)
    else:
        if r > 0:
            return None
        lower, upper = 0.0, 1.0
    slope = mu12 - mu22
    eps = float(upper if slope > 0 else lower)
    return eps, float(eps * mu12 + (1.0 - eps) * mu22)


def one_band_envelope(mu_row, fixed_lambdas, k: int) -> EnvelopePoint:
    """Envelope when only one band is ever available.

    Fixed users take exactly the share lambda/mu they need; user k gets the
    rest of the band: lambda_k_max = mu_row[k] * (1 - sum_{l != k} lambda_l / mu_row[l]).
    """
    mu_row = np.asarray(mu_row, dtype=float)
    m_s = mu_row.size
    lam = _fixed_vector(fixed_lambdas, m_s, k)
    omega = np.zeros((1, m_s))
    load = 0.0
    for l in range(m_s):
        if l == k or lam[l] == 0:
            continue
        if mu_row[l] == 0:
            return EnvelopePoint(fixed_rates=tuple(lam), free_user=k, feasible=False)
        omega[0, l] = lam[l] / mu_row[l]
        load += lam[l] / mu_row[l]
    if load > 1:
        return EnvelopePoint(fixed_rates=tuple(lam), free_user=k, feasible=False)
    omega[0, k] = 1.0 - load
    return EnvelopePoint(
        fixed_rates=tuple(lam),
        free_user=k,
        feasible=True,
        max_rate=float(mu_row[k] * (1.0 - load)),
        omega_star=AssignmentMatrix(omega),
    )


def symmetric_su_max(g, m_s: int) -> tuple[float, tuple[float, ...]]:
    """Symmetric users (mu[j, k] = g[j] for every k): share the best min(M_p, M_s) bands.

    Returns (lambda_max, theta_star) where theta_star[j] is each user's
    per-slot probability of being on band j (1/M_s on the chosen bands).
    """
    g = np.asarray(g, dtype=float)
    if m_s < 1:
        raise ConfigurationError("m_s must be >= 1")
    m_p = g.size
    order = sorted(range(m_p), key=lambda j: (-g[j], j))
    theta = [0.0] * m_p
    for j in order[: min(m_p, m_s)]:
        theta[j] = 1.0 / m_s
    lam_max = float(sum(theta[j] * g[j] for j in range(m_p)))
    return lam_max, tuple(theta)


def symmetric_band_region_check(beta, m_p: int, lambdas) -> bool:
    """Membership test for identical bands (mu[j, k] = beta[k] for every j).

    M_p >= M_s: the region is the open orthotope lambda_k < beta_k. M_p < M_s:
    additionally sum_k lambda_k / beta_k < M_p.
    """
    beta = np.asarray(beta, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != beta.shape:
        raise ConfigurationError("lambdas must match beta in length")
    m_s = beta.size
    if np.any(lam < 0):
        return False
    if not np.all(lam < beta - _TOL):
        return False
    if m_p < m_s and float(np.sum(lam / beta)) >= m_p - _TOL:
        return False
    return True


def fully_symmetric_max(m_p: int, m_s: int, beta: float) -> float:
    """Per-user maximum stable rate with symmetric users and bands: min(M_p/M_s, 1) * beta."""
    if m_p < 1 or m_s < 1:
        raise ConfigurationError("need at least one band and one user")
    if beta < 0:
        raise ConfigurationError("beta must be >= 0")
    return min(m_p / m_s, 1.0) * beta


def sweep_envelope(rates: RateMatrix, axis: int, grid, others=None, sweep_user=None) -> list[EnvelopePoint]:
    """Envelope of user ``axis`` as one other user's rate walks an ascending grid.

    ``sweep_user`` (default: the lowest index other than ``axis``) takes each
    grid value in turn; the remaining users keep the rates given in ``others``
    (default all zero). Infeasible grid points are returned as infeasible
    envelope points rather than raised.
    """
    m_s = rates.m_s
    if sweep_user is None:
        sweep_user = next(u for u in range(m_s) if u != axis)
    if sweep_user == axis:
        raise ConfigurationError("sweep_user must differ from axis")
    grid = [float(v) for v in grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ConfigurationError("grid must be ascending")
    base = np.zeros(m_s) if others is None else _fixed_vector(others, m_s, axis)
    points = []
    for value in grid:
        fixed = base.copy()
        fixed[sweep_user] = value
        points.append(envelope_point(rates, fixed, axis))
    return points
