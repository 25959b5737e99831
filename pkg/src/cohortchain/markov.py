"""Transition counts, row-stochastic matrices, and the chain readout.

Counts stay exact integers; probabilities appear only once a matrix is
built, so pooling cohorts never loses precision.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData
from .states import ABSORBING, ALLOWED_SET, N_STATES, TRANSIENT, AcademicState

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ForbiddenTransition:
    frm: AcademicState
    to: AcademicState

    def __str__(self):
        return f"forbidden transition {self.frm.name} -> {self.to.name}"


@dataclass(frozen=True)
class RowSumViolation:
    row: AcademicState
    total: float

    def __str__(self):
        return f"row {self.row.name} sums to {self.total!r}, expected 1"


@dataclass(frozen=True)
class EntryOutOfRange:
    frm: AcademicState
    to: AcademicState
    value: float

    def __str__(self):
        return f"entry ({self.frm.name}, {self.to.name}) = {self.value!r} outside [0, 1]"


def _as_grid(p):
    a = np.asarray(p, dtype=float)
    if a.shape != (N_STATES, N_STATES):
        raise ValueError(f"expected an {N_STATES}x{N_STATES} grid, got shape {a.shape}")
    return a


def validate_structure(p):
    """Diagnose a probability grid against the allowed sparsity pattern.

    Accepts a TransitionMatrix or a raw 8x8 array. Returns a list of
    violations (empty iff the grid is valid); never raises on bad content.
    """
    if isinstance(p, TransitionMatrix):
        a = p.p
    else:
        a = _as_grid(p)
    violations = []
    for i in range(N_STATES):
        for j in range(N_STATES):
            v = a[i, j]
            frm, to = AcademicState(i), AcademicState(j)
            if not 0.0 <= v <= 1.0:
                violations.append(EntryOutOfRange(frm, to, float(v)))
            allowed = (i, j) in ALLOWED_SET or (frm.is_absorbing and i == j)
            if v != 0.0 and not allowed:
                violations.append(ForbiddenTransition(frm, to))
        total = float(a[i].sum())
        if abs(total - 1.0) > ROW_SUM_TOL:
            violations.append(RowSumViolation(AcademicState(i), total))
    return violations


@dataclass(frozen=True)
class TransitionCounts:
    """Observed year-to-year transition tallies (8x8, integer).

    Only the allowed transient cells may be nonzero; absorbing rows are all
    zero because self-loops are implied, not observed.
    """

    counts: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.counts, dtype=np.int64)
        if a.shape != (N_STATES, N_STATES):
            raise ValueError(f"counts must be {N_STATES}x{N_STATES}, got {a.shape}")
        if (a < 0).any():
            raise ValueError("counts must be non-negative")
        for i in range(N_STATES):
            for j in range(N_STATES):
                if a[i, j] != 0 and (i, j) not in ALLOWED_SET:
                    raise ValueError(
                        f"count at ({AcademicState(i).name}, {AcademicState(j).name}) "
                        "is outside the allowed transition pattern"
                    )
        a.flags.writeable = False
        object.__setattr__(self, "counts", a)

    @classmethod
    def zero(cls):
        return cls(np.zeros((N_STATES, N_STATES), dtype=np.int64))

    @classmethod
    def from_cells(cls, cells):
        """Build from a {(from_state, to_state): count} mapping."""
        a = np.zeros((N_STATES, N_STATES), dtype=np.int64)
        for (frm, to), n in cells.items():
            a[int(frm), int(to)] = n
        return cls(a)

    def row_total(self, state):
        return int(self.counts[int(state)].sum())

    def __add__(self, other):
        return TransitionCounts(self.counts + other.counts)

    def __eq__(self, other):
        if not isinstance(other, TransitionCounts):
            return NotImplemented
        return bool((self.counts == other.counts).all())


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic 8x8 matrix with the chain's sparsity pattern.

    Construction validates; an instance is always structurally sound.
    """

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = _as_grid(self.p).copy()
        violations = validate_structure(a)
        if violations:
            detail = "; ".join(str(v) for v in violations)
            raise ValueError(f"invalid transition matrix: {detail}")
        a.flags.writeable = False
        object.__setattr__(self, "p", a)

    @classmethod
    def from_rows(cls, rows):
        """Build from a {from_state: {to_state: prob}} mapping over transient
        rows; absorbing rows are filled with their identity pattern."""
        a = np.zeros((N_STATES, N_STATES))
        for frm, entries in rows.items():
            for to, v in entries.items():
                a[int(frm), int(to)] = v
        for s in ABSORBING:
            a[int(s), int(s)] = 1.0
        return cls(a)

    def __getitem__(self, key):
        i, j = key
        return float(self.p[int(i), int(j)])

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return bool((self.p == other.p).all())


def pool_counts(parts):
    """Element-wise sum of transition counts across cohorts.

    Pooling before normalizing is exactly the combined-cohort estimate:
    the pooled probability is (sum of destination tallies) / (sum of row
    totals).
    """
    parts = list(parts)
    if not parts:
        raise ValueError("pool_counts requires at least one TransitionCounts")
    total = parts[0].counts.copy()
    for part in parts[1:]:
        total += part.counts
    return TransitionCounts(total)


def build_matrix(counts, *, allow_unreachable=False):
    """Normalize counts row-wise into a TransitionMatrix.

    A transient row with no observations raises InsufficientData rather
    than being imputed. With allow_unreachable=True, an empty row whose
    state has no incoming counts either (so the chain can never visit it)
    is filled with a unit drop-out entry; this cannot affect any quantity
    read off the chain from Y1, but keeps matrix powers well defined for
    pooled partial-cohort data.
    """
    a = np.zeros((N_STATES, N_STATES))
    grid = counts.counts
    for s in TRANSIENT:
        i = int(s)
        total = grid[i].sum()
        if total == 0:
            reachable = s is AcademicState.Y1 or grid[:, i].sum() > 0
            if allow_unreachable and not reachable:
                a[i, int(AcademicState.DROP_OUT)] = 1.0
                continue
            raise InsufficientData(s)
        a[i] = grid[i] / total
    for s in ABSORBING:
        a[int(s), int(s)] = 1.0
    return TransitionMatrix(a)


def matrix_power(p, n):
    """n-th power of the transition matrix as a plain probability grid."""
    if n < 0:
        raise ValueError("power must be non-negative")
    return np.linalg.matrix_power(p.p, n)


def sygr_markov(p):
    """Six-year graduation rate read off the chain: the probability of
    reaching the graduated state within six steps of starting in year 1."""
    return float(matrix_power(p, 6)[int(AcademicState.Y1), int(AcademicState.GRADUATED)])
