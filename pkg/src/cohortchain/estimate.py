"""Six-year graduation rate estimators over parsed student records.

Three estimators: the traditional cohort ratio, the reduced-form chain
restricted to one complete cohort (the positive control), and the full
pooled chain that also absorbs partial-cohort evidence. Each comes in a
plain-function form and as an estimator object exposing per-record count
contributions, which lets the bootstrap re-aggregate resamples without
re-deriving transitions.
"""


from enum import Enum

import numpy as np

from .errors import EmptyCohort, HorizonTooEarly, NoRecords
from .markov import TransitionCounts, build_matrix, sygr_markov
from .records import Outcome, cohort_slice, derive_transitions, la_truncate
from .states import ALLOWED_CELLS, N_STATES, AcademicState

_CELL_INDEX = {cell: i for i, cell in enumerate(ALLOWED_CELLS)}
_N_CELLS = len(ALLOWED_CELLS)


class EstimatorKind(Enum):
    TRADITIONAL = "traditional"
    MARKOV_REDUCED = "markov-reduced"
    MARKOV_FULL = "markov-full"


def counts_from_transitions(transitions):
    grid = np.zeros((N_STATES, N_STATES), dtype=np.int64)
    for t in transitions:
        grid[int(t.frm), int(t.to)] += 1
    return TransitionCounts(grid)


def _record_transitions(r, horizon_year, from_la_year):
    steps = derive_transitions(r, horizon_year)
    if from_la_year:
        steps = la_truncate(r, steps)
    return steps


def _record_cells(r, horizon_year, from_la_year):
    """Indices into ALLOWED_CELLS for one record's observable steps."""
    return [
        _CELL_INDEX[(int(t.frm), int(t.to))]
        for t in _record_transitions(r, horizon_year, from_la_year)
    ]


def _cells_to_counts(cells):
    grid = np.zeros((N_STATES, N_STATES), dtype=np.int64)
    for (i, j), n in zip(ALLOWED_CELLS, cells):
        grid[i, j] = int(n)
    return TransitionCounts(grid)


def _sygr_from_counts(counts):
    return sygr_markov(build_matrix(counts, allow_unreachable=True))


def sygr_traditional(records, cohort_year, horizon_year):
    """Graduated-within-six-years fraction of one fully observed cohort."""
    if horizon_year < cohort_year + 6:
        raise HorizonTooEarly(cohort_year, horizon_year)
    cohort = cohort_slice(records, cohort_year)
    if not cohort:
        raise EmptyCohort(cohort_year)
    n_deg = sum(
        1 for r in cohort if r.outcome is Outcome.GRADUATED and r.outcome_year <= 6
    )
    return n_deg / len(cohort)


def sygr_markov_reduced(records, cohort_year, horizon_year):
    """Chain estimate restricted to exactly the data the traditional
    estimate uses; agrees with it to floating-point precision on complete
    cohorts (the path probabilities telescope)."""
    if horizon_year < cohort_year + 6:
        raise HorizonTooEarly(cohort_year, horizon_year)
    cohort = cohort_slice(records, cohort_year)
    if not cohort:
        raise EmptyCohort(cohort_year)
    transitions = [t for r in cohort for t in derive_transitions(r, horizon_year)]
    return _sygr_from_counts(counts_from_transitions(transitions))


def sygr_markov_full(records, horizon_year, target_cohort=None, *, from_la_year=False):
    """Pooled chain estimate over all records observable at the horizon.

    Partial cohorts contribute only their completed transitions. The
    target_cohort argument is a report label; the pooled matrix itself is
    cohort-agnostic.
    """
    if not records:
        raise NoRecords()
    transitions = [
        t for r in records for t in _record_transitions(r, horizon_year, from_la_year)
    ]
    return _sygr_from_counts(counts_from_transitions(transitions))


def pooled_matrix(records, horizon_year, *, from_la_year=False):
    if not records:
        raise NoRecords()
    transitions = [
        t for r in records for t in _record_transitions(r, horizon_year, from_la_year)
    ]
    return build_matrix(counts_from_transitions(transitions), allow_unreachable=True)


def persistence_rates(records, horizon_year, *, from_la_year=False):
    """Year-to-year persistence probabilities from the pooled matrix, keyed
    by starting year of study (1..5). Full precision; rounding is a
    reporting concern."""
    p = pooled_matrix(records, horizon_year, from_la_year=from_la_year)
    return {
        k: p[AcademicState.year(k), AcademicState.year(k + 1)] for k in range(1, 6)
    }


class TraditionalEstimator:
    """Resamplable form of sygr_traditional."""

    kind = EstimatorKind.TRADITIONAL

    def __init__(self, cohort_year, horizon_year):
        if horizon_year < cohort_year + 6:
            raise HorizonTooEarly(cohort_year, horizon_year)
        self.cohort_year = cohort_year
        self.horizon_year = horizon_year

    def point(self, records):
        return sygr_traditional(records, self.cohort_year, self.horizon_year)

    def contributions(self, records):
        out = np.zeros((len(records), 2), dtype=np.int64)
        for i, r in enumerate(records):
            if r.cohort_year == self.cohort_year:
                out[i, 0] = 1
                if r.outcome is Outcome.GRADUATED and r.outcome_year <= 6:
                    out[i, 1] = 1
        return out

    def from_indices(self, contrib, idx):
        n_start, n_deg = contrib[idx].sum(axis=0)
        if n_start == 0:
            raise EmptyCohort(self.cohort_year)
        return n_deg / n_start


class _ChainEstimator:
    """Shared resampling plumbing for the chain-based estimators."""

    def contributions(self, records):
        out = np.zeros((len(records), _N_CELLS), dtype=np.int64)
        for i, r in enumerate(records):
            for cell in self._cells(r):
                out[i, cell] += 1
        return out

    def from_indices(self, contrib, idx):
        return _sygr_from_counts(_cells_to_counts(contrib[idx].sum(axis=0)))


class MarkovReducedEstimator(_ChainEstimator):
    kind = EstimatorKind.MARKOV_REDUCED

    def __init__(self, cohort_year, horizon_year):
        if horizon_year < cohort_year + 6:
            raise HorizonTooEarly(cohort_year, horizon_year)
        self.cohort_year = cohort_year
        self.horizon_year = horizon_year

    def point(self, records):
        return sygr_markov_reduced(records, self.cohort_year, self.horizon_year)

    def _cells(self, r):
        if r.cohort_year != self.cohort_year:
            return []
        return _record_cells(r, self.horizon_year, False)


class MarkovFullEstimator(_ChainEstimator):
    kind = EstimatorKind.MARKOV_FULL

    def __init__(self, horizon_year, *, from_la_year=False):
        self.horizon_year = horizon_year
        self.from_la_year = from_la_year

    def point(self, records):
        return sygr_markov_full(records, self.horizon_year, from_la_year=self.from_la_year)

    def _cells(self, r):
        return _record_cells(r, self.horizon_year, self.from_la_year)
