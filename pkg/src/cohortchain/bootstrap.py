"""Bootstrap resampling, percentile confidence intervals, and KDE summaries.

Each replicate draws its indices from an RNG stream seeded by (seed,
replicate index), so the ensemble is reproducible bit-for-bit regardless
of execution order. Replicates that fail with an estimation error (e.g. a
resample of a tiny subgroup losing a whole transition row) are dropped and
counted, with a hard 10% failure ceiling.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEnsemble,
    EnsembleTooSmall,
    EstimationError,
    EstimatorFailedOnOriginal,
    TooManyFailedReplicates,
)

FAILURE_CEILING = 0.10
KDE_GRID_POINTS = 256


@dataclass(frozen=True)
class BootstrapConfig:
    seed: int
    replicates: int = 1000
    ci_level: float = 0.95

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError(f"replicates must be >= 2, got {self.replicates}")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError(f"ci_level must be in (0, 1), got {self.ci_level}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EstimateSummary:
    """A bootstrap ensemble and its percentile summary.

    replicate_ids[i] is the 1-based replicate index that produced
    ensemble[i]; gaps mark dropped replicates.
    """

    ensemble: np.ndarray = field(repr=False)
    replicate_ids: np.ndarray = field(repr=False)
    point: float
    lo: float
    median: float
    hi: float
    width: float
    n_failed: int = 0


def percentile_ci(ensemble, level):
    """(lo, median, hi) by linear interpolation between closest ranks.

    Percentile q sits at position h = (n-1)*q in the sorted ensemble, with
    the fractional part interpolated linearly between neighbours.
    """
    values = np.asarray(ensemble, dtype=float)
    if values.size < 2:
        raise EnsembleTooSmall(values.size)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    alpha = (1.0 - level) / 2.0
    lo, median, hi = np.percentile(values, [100 * alpha, 50, 100 * (1 - alpha)])
    return float(lo), float(median), float(hi)


def resample_indices(seed, replicate, n):
    """The index draw for one replicate; deterministic in (seed, replicate)."""
    rng = np.random.default_rng([seed, replicate])
    return rng.integers(0, n, size=n)


def bootstrap(records, estimator, cfg):
    """Resample records with replacement and summarize the estimate ensemble.

    The estimator must succeed on the original data first; otherwise the
    ensemble would characterize nothing.
    """
    records = list(records)
    try:
        point = estimator.point(records)
    except EstimationError as exc:
        raise EstimatorFailedOnOriginal(str(exc)) from exc

    contrib = estimator.contributions(records)
    n = len(records)
    values = []
    ids = []
    failed = 0
    for b in range(1, cfg.replicates + 1):
        idx = resample_indices(cfg.seed, b, n)
        try:
            est = estimator.from_indices(contrib, idx)
        except EstimationError:
            failed += 1
            continue
        values.append(est)
        ids.append(b)
    if failed > FAILURE_CEILING * cfg.replicates:
        raise TooManyFailedReplicates(failed, cfg.replicates)

    ensemble = np.array(values, dtype=float)
    lo, median, hi = percentile_ci(ensemble, cfg.ci_level)
    return EstimateSummary(
        ensemble=ensemble,
        replicate_ids=np.array(ids, dtype=np.int64),
        point=float(point),
        lo=lo,
        median=median,
        hi=hi,
        width=hi - lo,
        n_failed=failed,
    )


def silverman_bandwidth(values):
    values = np.asarray(values, dtype=float)
    sd = values.std(ddof=1)
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    # A zero IQR with positive spread would zero out the bandwidth; fall
    # back to the standard deviation alone in that corner.
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * scale * values.size ** (-0.2)


def kde(ensemble, bandwidth=None):
    """Gaussian kernel density of a rate ensemble on a 256-point grid.

    Grid spans [min - 3h, max + 3h] clipped to [0, 1]. Returns (xs,
    densities) arrays; the density integrates to ~1 over the grid when the
    mass sits inside the unit interval.
    """
    values = np.asarray(ensemble, dtype=float)
    if values.size < 2:
        raise EnsembleTooSmall(values.size)
    # min == max rather than std == 0: summation noise can leave a constant
    # ensemble with a std of ~1e-16, which would yield a useless sliver grid
    if values.min() == values.max():
        raise DegenerateEnsemble()
    h = silverman_bandwidth(values) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    lo = max(0.0, values.min() - 3 * h)
    hi = min(1.0, values.max() + 3 * h)
    xs = np.linspace(lo, hi, KDE_GRID_POINTS)
    z = (xs[:, None] - values[None, :]) / h
    dens = np.exp(-0.5 * z**2).sum(axis=1) / (values.size * h * np.sqrt(2 * np.pi))
    return xs, dens
