"""Grid-based Bayesian inference from sequential-measurement records.

The prior is uniform on a rectangular grid unless a log-prior array is
given. Likelihoods are multinomial with the coefficient dropped, evaluated
in the log domain and normalised with log-sum-exp.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from . import protocol
from .models import ParameterVector
from .protocol import ProtocolSchedule, TrajectoryDistribution, TrajectoryRecord


class DegenerateDataError(ValueError):
    """No grid point assigns non-zero probability to the observed record."""


@dataclass(frozen=True)
class ParameterGrid:
    """Rectangular grid; ``axes[i] = (min, max, count)``. Flattening is C order."""

    axes: tuple[tuple[float, float, int], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(n)) for lo, hi, n in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(axes) != len(self.labels):
            raise ValueError("one label per axis is required")
        for lo, hi, n in axes:
            if n < 2:
                raise ValueError("every axis needs at least two points")
            if hi <= lo:
                raise ValueError(f"axis range ({lo}, {hi}) is empty")

    @property
    def k(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(n for _, _, n in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis_values(self, i: int) -> np.ndarray:
        lo, hi, n = self.axes[i]
        return np.linspace(lo, hi, n)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([(hi - lo) / (n - 1) for lo, hi, n in self.axes])

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[self.axis_values(i) for i in range(self.k)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def point(self, index: int) -> np.ndarray:
        idx = np.unravel_index(index, self.shape)
        return np.array([self.axis_values(i)[j] for i, j in enumerate(idx)])

    def key(self) -> tuple:
        return (self.axes, self.labels)


def distribution_table(model, schedule: ProtocolSchedule, grid: ParameterGrid, threads: int = 1) -> np.ndarray:
    """``table[g, xi] = p(xi | lambda_g)`` for every grid point."""
    pts = grid.points()

    def one(x):
        return protocol.trajectory_distribution(model, x, schedule).probabilities

    table = np.empty((len(pts), 2 ** schedule.n_seq))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for g, row in enumerate(pool.map(one, pts)):
                table[g] = row
    else:
        for g, x in enumerate(pts):
            table[g] = one(x)
    table.setflags(write=False)
    return table


class _TableCache:
    """Memoises distribution tables per (model object, schedule, grid)."""

    def __init__(self, maxsize: int = 8):
        self.maxsize = maxsize
        self._store: dict = {}

    def get(self, model, schedule, grid, threads: int = 1) -> np.ndarray:
        key = (id(model), schedule, grid.key())
        hit = self._store.get(key)
        if hit is not None and hit[0] is model:
            return hit[1]
        table = distribution_table(model, schedule, grid, threads)
        if len(self._store) >= self.maxsize:
            self._store.pop(next(iter(self._store)))
        self._store[key] = (model, table)
        return table

    def clear(self):
        self._store.clear()


table_cache = _TableCache()


def _log_likelihood_matrix(counts: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``LL[r, g] = sum_j counts[r, j] ln table[g, j]`` with impossible data at ``-inf``."""
    counts = np.atleast_2d(counts).astype(float)
    positive = table > 0
    with np.errstate(divide="ignore"):
        logp = np.where(positive, np.log(np.where(positive, table, 1.0)), 0.0)
    ll = counts @ logp.T
    impossible = (counts > 0).astype(float) @ (~positive).astype(float).T
    ll[impossible > 0] = -np.inf
    return ll


def log_likelihood(record: TrajectoryRecord, dist: TrajectoryDistribution) -> float:
    """``sum_j s_j ln p(xi_j | lambda)``; ``-inf`` if the record is impossible."""
    if record.n_seq != dist.n_seq:
        raise ValueError("record and distribution have different n_seq")
    return float(_log_likelihood_matrix(record.counts, dist.probabilities[None, :])[0, 0])


@dataclass(frozen=True)
class Posterior:
    grid: ParameterGrid
    weights: np.ndarray

    def as_array(self) -> np.ndarray:
        return self.weights.reshape(self.grid.shape)

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(header)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*self.grid.labels, "weight"])
        for x, wt in zip(self.grid.points(), self.weights):
            w.writerow([f"{v:.10g}" for v in x] + [f"{wt:.17g}"])
        return buf.getvalue()


def posterior_from_table(table: np.ndarray, grid: ParameterGrid, record: TrajectoryRecord,
                         log_prior: np.ndarray | None = None) -> Posterior:
    ll = _log_likelihood_matrix(record.counts, table)[0]
    if log_prior is not None:
        ll = ll + np.asarray(log_prior, dtype=float).ravel()
    if np.all(np.isneginf(ll)):
        raise DegenerateDataError("the record has zero likelihood at every grid point")
    w = np.exp(ll - logsumexp(ll))
    w /= w.sum()
    return Posterior(grid, w)


def posterior(model, schedule: ProtocolSchedule, grid: ParameterGrid, record: TrajectoryRecord,
              log_prior: np.ndarray | None = None, threads: int = 1) -> Posterior:
    """Posterior over ``grid`` given ``record``; distributions are cached per grid."""
    table = table_cache.get(model, schedule, grid, threads)
    return posterior_from_table(table, grid, record, log_prior)


class MapEstimate(NamedTuple):
    values: ParameterVector
    index: int
    tie: bool


def map_estimate(post: Posterior) -> MapEstimate:
    """Arg-max grid point; ties go to the lowest flattened index."""
    w = post.weights
    idx = int(np.argmax(w))
    tie = int(np.count_nonzero(w == w[idx])) > 1
    return MapEstimate(ParameterVector(tuple(post.grid.point(idx)), post.grid.labels), idx, tie)


@dataclass(frozen=True)
class EstimationReport:
    map_estimates: np.ndarray
    covariance: np.ndarray
    trace_cov: float
    m: int
    mu: int
    seed: int
    labels: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "m": self.m,
            "mu": self.mu,
            "seed": self.seed,
            "mean_estimate": self.map_estimates.mean(axis=0).tolist(),
            "covariance": self.covariance.tolist(),
            "trace_cov": self.trace_cov,
        }


def repetition_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent stream for repetition ``rep``: ``SeedSequence([seed, rep])``."""
    return np.random.default_rng([seed, rep])


def covariance_experiment(model, true_values, schedule: ProtocolSchedule, grid: ParameterGrid,
                          m: int, mu: int, seed: int, table: np.ndarray | None = None,
                          threads: int = 1) -> EstimationReport:
    """Spread of MAP estimates over ``mu`` simulated data sets of ``m`` trajectories.

    Repetition ``r`` draws its record from :func:`repetition_rng` ``(seed, r)``,
    so results do not depend on evaluation order. The covariance is the
    population form ``<x_i x_j> - <x_i><x_j>``.
    """
    if mu < 2:
        raise ValueError("mu must be at least 2")
    if table is None:
        table = table_cache.get(model, schedule, grid, threads)
    truth = protocol.trajectory_distribution(model, np.asarray(getattr(true_values, "values", true_values)), schedule)
    p = truth.probabilities / truth.probabilities.sum()
    counts = np.stack([repetition_rng(seed, r).multinomial(m, p) for r in range(mu)])
    ll = _log_likelihood_matrix(counts, table)
    idx = np.argmax(ll, axis=1)
    pts = grid.points()
    est = pts[idx]
    cov = np.atleast_2d(np.cov(est.T, ddof=0))
    return EstimationReport(est, cov, float(np.trace(cov)), m, mu, seed, grid.labels)


@dataclass(frozen=True)
class CredibleRegion:
    """Highest-posterior-density set of grid cells holding at least ``mass``."""

    mask: np.ndarray
    mass: float
    cell_area: float

    @property
    def cells(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.cells * self.cell_area

    def extent(self, grid: ParameterGrid) -> np.ndarray:
        """Width of the region's bounding box along each axis."""
        idx = np.array(np.nonzero(self.mask.reshape(grid.shape)))
        return (idx.max(axis=1) - idx.min(axis=1)) * grid.spacing


def credible_region(post: Posterior, mass: float = 0.95) -> CredibleRegion:
    """Smallest set of cells, taken in order of decreasing weight, with total weight ``>= mass``.

    Ties are broken by flattened index so the region is deterministic.
    """
    if not 0 < mass <= 1:
        raise ValueError("mass must lie in (0, 1]")
    w = post.weights
    order = np.lexsort((np.arange(w.size), -w))
    cum = np.cumsum(w[order])
    n = int(np.searchsorted(cum, mass * cum[-1] * (1 - 1e-12))) + 1
    mask = np.zeros(w.size, dtype=bool)
    mask[order[:min(n, w.size)]] = True
    return CredibleRegion(mask, mass, float(np.prod(post.grid.spacing)))
