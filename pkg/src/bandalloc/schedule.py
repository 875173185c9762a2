"""From assignment fractions to a slot-by-slot permutation schedule.

The controller needs a probability distribution over orthogonal assignment
patterns whose marginals reproduce a target fraction matrix omega. That is
obtained by padding omega to a square doubly stochastic matrix with virtual
bands/users and decomposing it into permutation matrices (Birkhoff-von
Neumann). The decomposition here is the greedy variant: repeatedly find a
perfect matching on the strictly-positive support with augmenting paths and
subtract the minimum matched entry.

Permutations are encoded as M_s-tuples of band numbers (1-based), 0 meaning
the user sits on a virtual band that slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError
from .orthogonal import AssignmentMatrix

_TOL = 1e-9


class DecompositionError(RuntimeError):
    """The positive support lost its perfect matching (numerical damage)."""


@dataclass(frozen=True)
class DoublyStochasticMatrix:
    """Square nonnegative matrix whose rows and columns each sum to one (within 1e-9)."""

    m: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigurationError("matrix must be square")
        if np.any(m < -_TOL):
            raise ConfigurationError("matrix entries must be nonnegative")
        if np.any(np.abs(m.sum(axis=0) - 1) > _TOL) or np.any(np.abs(m.sum(axis=1) - 1) > _TOL):
            raise ConfigurationError("rows and columns must each sum to 1")
        object.__setattr__(self, "m", np.clip(m, 0.0, None))

    @property
    def n(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class PermutationSchedule:
    """Weighted orthogonal assignment patterns: entries of ((m_1..m_Ms), weight)."""

    entries: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self) -> None:
        entries = tuple((tuple(int(m) for m in perm), float(w)) for perm, w in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ConfigurationError("schedule needs at least one entry")
        total = 0.0
        size = len(entries[0][0])
        for perm, w in entries:
            if len(perm) != size:
                raise ConfigurationError("all permutations must have the same length")
            if w <= 0:
                raise ConfigurationError("weights must be > 0")
            real = [m for m in perm if m != 0]
            if len(set(real)) != len(real):
                raise ConfigurationError(f"assignment {perm} reuses a band")
            total += w
        if abs(total - 1.0) > _TOL:
            raise ConfigurationError(f"weights sum to {total!r}, expected 1")

    @property
    def m_s(self) -> int:
        return len(self.entries[0][0])

    def marginal(self, band: int, user: int) -> float:
        """Total probability that ``band`` (1-based) is assigned to ``user`` (0-based)."""
        return sum(w for perm, w in self.entries if perm[user] == band)

    def to_dict(self) -> dict:
        return {"entries": [{"assignment": list(perm), "weight": w} for perm, w in self.entries]}

    @classmethod
    def from_dict(cls, doc: dict) -> "PermutationSchedule":
        return cls(tuple((tuple(e["assignment"]), e["weight"]) for e in doc["entries"]))


@dataclass(frozen=True)
class PaddedAssignment:
    """omega embedded in a doubly stochastic matrix plus the index maps back.

    ``band_of_row[i]`` is the 1-based band number of row i (0 for a virtual
    band row); ``user_of_col[j]`` is the user index of column j (None for a
    virtual user column).
    """

    matrix: DoublyStochasticMatrix
    band_of_row: tuple[int, ...]
    user_of_col: tuple[int | None, ...]


def pad_to_doubly_stochastic(omega: AssignmentMatrix | np.ndarray) -> PaddedAssignment:
    """Embed omega into an n x n doubly stochastic matrix, n = max(M_p, M_s).

    Row/column slack is routed into the virtual rows/columns first (northwest
    order); residual mass that has no virtual cell to live in (possible only
    when omega itself is slack and M_p = M_s leaves no virtual block) is placed
    northwest-first in the real block, which only ever adds assignments on
    otherwise-idle bands/users.
    """
    if not isinstance(omega, AssignmentMatrix):
        omega = AssignmentMatrix(omega)
    m_p, m_s = omega.m_p, omega.m_s
    n = max(m_p, m_s)
    D = np.zeros((n, n))
    D[:m_p, :m_s] = omega.omega
    row_slack = np.clip(1.0 - D.sum(axis=1), 0.0, None)
    col_slack = np.clip(1.0 - D.sum(axis=0), 0.0, None)
    for i in range(n):
        for j in range(n):
            if i < m_p and j < m_s:
                continue
            fill = min(row_slack[i], col_slack[j])
            if fill > 0:
                D[i, j] += fill
                row_slack[i] -= fill
                col_slack[j] -= fill
    for i in range(m_p):
        if row_slack[i] <= 0:
            continue
        for j in range(m_s):
            fill = min(row_slack[i], col_slack[j])
            if fill > 0:
                D[i, j] += fill
                row_slack[i] -= fill
                col_slack[j] -= fill
    band_of_row = tuple(j + 1 if j < m_p else 0 for j in range(n))
    user_of_col = tuple(k if k < m_s else None for k in range(n))
    return PaddedAssignment(DoublyStochasticMatrix(D), band_of_row, user_of_col)


def _perfect_matching(support: np.ndarray) -> list[int] | None:
    """Perfect matching on a boolean support via augmenting paths; row of each column."""
    n = support.shape[0]
    row_of_col = [-1] * n

    def augment(r: int, seen: list[bool]) -> bool:
        for c in range(n):
            if support[r, c] and not seen[c]:
                seen[c] = True
                if row_of_col[c] < 0 or augment(row_of_col[c], seen):
                    row_of_col[c] = r
                    return True
        return False

    for r in range(n):
        if not augment(r, [False] * n):
            return None
    return row_of_col


def birkhoff_decompose(
    matrix: DoublyStochasticMatrix | np.ndarray,
    band_of_row: tuple[int, ...] | None = None,
    user_of_col: tuple[int | None, ...] | None = None,
) -> PermutationSchedule:
    """Greedy Birkhoff-von Neumann decomposition of a doubly stochastic matrix.

    Repeatedly finds a perfect matching on the > 1e-9 support, emits it with
    the minimum matched entry as weight, and subtracts. At most (n-1)^2 + 1
    permutations result; weights are renormalized to sum to one exactly.
    Index maps translate padded rows/columns back to band numbers and users
    (defaults treat every row as band 1..n and every column as a real user).
    """
    if not isinstance(matrix, DoublyStochasticMatrix):
        matrix = DoublyStochasticMatrix(matrix)
    n = matrix.n
    if band_of_row is None:
        band_of_row = tuple(range(1, n + 1))
    if user_of_col is None:
        user_of_col = tuple(range(n))
    user_cols = [(user, col) for col, user in enumerate(user_of_col) if user is not None]
    user_cols.sort()

    residual = matrix.m.copy()
    raw: list[tuple[tuple[int, ...], float]] = []
    for _ in range(n * n + 1):
        if residual.max() <= _TOL:
            break
        row_of_col = _perfect_matching(residual > _TOL)
        if row_of_col is None:
            raise DecompositionError("support has no perfect matching")
        weight = min(residual[row_of_col[c], c] for c in range(n))
        perm = tuple(band_of_row[row_of_col[col]] for _, col in user_cols)
        raw.append((perm, weight))
        for c in range(n):
            residual[row_of_col[c], c] -= weight
    else:
        raise DecompositionError("decomposition did not terminate")

    kept = [(perm, w) for perm, w in raw if w >= _TOL]
    total = sum(w for _, w in kept)
    return PermutationSchedule(tuple((perm, w / total) for perm, w in kept))


def schedule_from_assignment(omega: AssignmentMatrix | np.ndarray) -> tuple[PaddedAssignment, PermutationSchedule]:
    """Pad omega and decompose it in one step."""
    padded = pad_to_doubly_stochastic(omega)
    schedule = birkhoff_decompose(padded.matrix, padded.band_of_row, padded.user_of_col)
    return padded, schedule


def sample_permutation(schedule: PermutationSchedule, rng) -> tuple[int, ...]:
    """Draw one assignment pattern; consumes exactly one uniform from ``rng``."""
    u = rng.random()
    for perm, w in schedule.entries:
        u -= w
        if u < 0:
            return perm
    return schedule.entries[-1][0]
