"""Plain and multilevel Monte Carlo estimation of first-passage functionals.

Every estimator is deterministic given (seed, schedule, workers): the trial
budget is split across workers by a fixed rule, each worker owns the
substream ``SeedSequence(seed, spawn_key=(level, worker))``, and per-worker
(count, sum, sum of squares, steps) accumulators are merged in worker order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .coupling import simulate_coupled_batch
from .engine import FourTuple, GridSpec, SimulationBatch, simulate_batch
from .errors import DataError, ParameterError
from .models import LevyModel
from .sampling import build_sampler, default_truncation

Seed = Union[int, np.random.Generator]

_PLAIN_CHUNK = 1 << 17


# ---------------------------------------------------------------------------
# functionals

@dataclass(frozen=True)
class FirstPassageTime:
    """f(tuple) = capped passage time."""

    def values(self, batch: SimulationBatch) -> np.ndarray:
        return batch.time


@dataclass(frozen=True)
class IndicatorCdf:
    """f(tuple) = 1{crossed and time <= s}: one point of the passage-time cdf."""

    s: float

    def values(self, batch: SimulationBatch) -> np.ndarray:
        return (batch.crossed & (batch.time <= self.s)).astype(float)


@dataclass(frozen=True)
class DiscountedOvershootIndicator:
    """f(tuple) = exp(-q time) 1{overshoot <= y} on crossing, else 0.

    Non-crossing trials contribute zero: with the horizon chosen large the
    discounted mass beyond it is negligible, and any other convention would
    inject an arbitrary constant.
    """

    q: float
    y: float

    def __post_init__(self):
        if not (self.q > 0 and self.y > 0):
            raise ParameterError("q and y must be > 0")

    def values(self, batch: SimulationBatch) -> np.ndarray:
        ok = batch.crossed & (batch.overshoot <= self.y)
        return np.where(ok, np.exp(-self.q * batch.time), 0.0)


@dataclass(frozen=True)
class TerminalPayoff:
    """f = payoff(V_n, J_n) with a user map vectorized over arrays."""

    payoff: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def values(self, batch: SimulationBatch) -> np.ndarray:
        return np.asarray(self.payoff(batch.terminal_v, batch.terminal_j), dtype=float)


@dataclass(frozen=True)
class TupleMap:
    """f = scalar map applied to each trial's FourTuple."""

    fn: Callable[[FourTuple], float]

    def values(self, batch: SimulationBatch) -> np.ndarray:
        return np.array([self.fn(batch.tuple_at(k)) for k in range(len(batch))], dtype=float)


Functional = Union[
    FirstPassageTime, IndicatorCdf, DiscountedOvershootIndicator, TerminalPayoff, TupleMap
]


def gerber_shiu_value(tup: FourTuple, q: float, y: float) -> float:
    """Discounted overshoot indicator of a single tuple."""
    if not (q > 0 and y > 0):
        raise ParameterError("q and y must be > 0")
    if not tup.crossed:
        return 0.0
    return float(math.exp(-q * tup.time)) if tup.overshoot <= y else 0.0


# ---------------------------------------------------------------------------
# reports and schedules

@dataclass(frozen=True)
class LevelStats:
    level: int
    n: int
    samples: int
    mean: float
    variance: float
    steps: int


@dataclass(frozen=True)
class EstimateReport:
    value: float
    std_error: float
    ci95: tuple[float, float]
    samples: list[int]
    steps_consumed: int
    levels: Optional[list[LevelStats]] = None


@dataclass(frozen=True)
class LevelSchedule:
    """Geometric level ladder n_l = 2^l n0 with per-level trial counts."""

    n0: int
    levels: int
    m: list[int]

    def __post_init__(self):
        if self.n0 < 1:
            raise ParameterError("n0 must be >= 1")
        if self.levels < 0:
            raise ParameterError("levels must be >= 0")
        if len(self.m) != self.levels + 1:
            raise ParameterError("m must list one trial count per level")
        if any(mk < 1 for mk in self.m):
            raise ParameterError("every level needs at least one trial")

    def n_at(self, level: int) -> int:
        return self.n0 * (1 << level)


# ---------------------------------------------------------------------------
# rng plumbing

def substream(seed: int, *key: int) -> np.random.Generator:
    """Worker substream: documented split (seed, key) -> PCG64 stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def _shard_sizes(m: int, workers: int) -> list[int]:
    base, rem = divmod(m, workers)
    return [base + (1 if w < rem else 0) for w in range(workers)]


def _resolve_streams(rng: Seed, workers: int, level: int) -> list[np.random.Generator]:
    if isinstance(rng, np.random.Generator):
        if workers != 1:
            raise ParameterError("worker sharding needs an integer seed, not a Generator")
        return [rng]
    return [substream(rng, level, w) for w in range(workers)]


# ---------------------------------------------------------------------------
# estimators

@dataclass
class _Acc:
    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0
    steps: int = 0

    def add_values(self, vals: np.ndarray, steps: int, offset: int) -> None:
        bad = ~np.isfinite(vals)
        if bad.any():
            k = int(np.argmax(bad))
            raise DataError(f"non-finite functional value at trial {offset + k}")
        self.count += len(vals)
        self.total += float(vals.sum())
        self.total_sq += float((vals * vals).sum())
        self.steps += steps

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def variance(self) -> float:
        if self.count < 2:
            return float("nan")
        v = (self.total_sq - self.total * self.total / self.count) / (self.count - 1)
        return max(v, 0.0)


def _plain_level(model, functional, u, grid, m, streams, sizes, truncation_n) -> _Acc:
    if truncation_n is None:
        truncation_n = default_truncation(grid.n)
    sampler = build_sampler(model, grid.rate, truncation_n)
    acc = _Acc()
    offset = 0
    for rng_w, m_w in zip(streams, sizes):
        done = 0
        while done < m_w:
            rows = min(_PLAIN_CHUNK, m_w - done)
            batch = simulate_batch(sampler, grid, u, rows, rng_w)
            acc.add_values(functional.values(batch), rows * grid.n, offset)
            done += rows
            offset += rows
    return acc


def _coupled_level(model, functional, u, grid_fine, m, streams, sizes, truncation_n) -> _Acc:
    acc = _Acc()
    offset = 0
    for rng_w, m_w in zip(streams, sizes):
        if m_w == 0:
            continue
        cb = simulate_coupled_batch(model, u, grid_fine, m_w, rng_w, truncation_n=truncation_n)
        diff = functional.values(cb.fine) - functional.values(cb.coarse)
        acc.add_values(diff, cb.steps, offset)
        offset += m_w
    return acc


def mc_estimate(
    model: LevyModel,
    functional: Functional,
    u: float,
    grid: GridSpec,
    m: int,
    rng: Seed,
    workers: int = 1,
    truncation_n: Optional[int] = None,
) -> EstimateReport:
    """Sample mean and standard error of the functional over m plain trials."""
    if m < 2:
        raise ParameterError("m must be >= 2")
    streams = _resolve_streams(rng, workers, level=0)
    sizes = _shard_sizes(m, workers)
    acc = _plain_level(model, functional, u, grid, m, streams, sizes, truncation_n)
    se = math.sqrt(acc.variance / acc.count)
    stats = LevelStats(0, grid.n, acc.count, acc.mean, acc.variance, acc.steps)
    return EstimateReport(
        value=acc.mean,
        std_error=se,
        ci95=(acc.mean - 1.96 * se, acc.mean + 1.96 * se),
        samples=[m],
        steps_consumed=acc.steps,
        levels=[stats],
    )


def mlmc_estimate(
    model: LevyModel,
    functional: Functional,
    u: float,
    t: float,
    schedule: LevelSchedule,
    rng: Seed,
    workers: int = 1,
    truncation_n: Optional[int] = None,
) -> EstimateReport:
    """Telescoped estimate over [0, t]: plain mean at n0 plus coupled-difference means."""
    levels: list[LevelStats] = []
    value = 0.0
    var_of_mean = 0.0
    steps = 0
    gen_mode = isinstance(rng, np.random.Generator)
    for ell in range(schedule.levels + 1):
        m_l = schedule.m[ell]
        n_l = schedule.n_at(ell)
        streams = [rng] if gen_mode else _resolve_streams(rng, workers, level=ell)
        sizes = _shard_sizes(m_l, 1 if gen_mode else workers)
        if ell == 0:
            acc = _plain_level(model, functional, u, GridSpec(n=n_l, t=t), m_l, streams, sizes, truncation_n)
        else:
            acc = _coupled_level(model, functional, u, GridSpec(n=n_l, t=t), m_l, streams, sizes, truncation_n)
        value += acc.mean
        if acc.count >= 2:
            var_of_mean += acc.variance / acc.count
        steps += acc.steps
        levels.append(LevelStats(ell, n_l, acc.count, acc.mean, acc.variance, acc.steps))
    se = math.sqrt(var_of_mean)
    return EstimateReport(
        value=value,
        std_error=se,
        ci95=(value - 1.96 * se, value + 1.96 * se),
        samples=list(schedule.m),
        steps_consumed=steps,
        levels=levels,
    )


_VARIANCE_FLOOR = 1e-12


def mlmc_plan(
    level_variances: Sequence[float],
    level_costs: Sequence[float],
    target_stderr: float,
    n0: int,
    level_means: Optional[Sequence[float]] = None,
) -> LevelSchedule:
    """Optimal per-level trial counts for a target standard error.

    Allocates M_l = ceil( sum_k sqrt(V_k C_k) * sqrt(V_l / C_l) / target^2 ),
    the cost-minimizing split with total variance target^2.  When level means
    are supplied, trailing levels are dropped once the correction mean falls
    below target / sqrt(2), a bias proxy that is crude but adequate in the
    variance-dominated regime.
    """
    if not target_stderr > 0:
        raise ParameterError("target_stderr must be > 0")
    if len(level_variances) != len(level_costs) or not level_variances:
        raise ParameterError("need matching non-empty variance and cost lists")
    v = np.maximum(np.asarray(level_variances, dtype=float), _VARIANCE_FLOOR)
    c = np.asarray(level_costs, dtype=float)
    if (c <= 0).any():
        raise ParameterError("level costs must be > 0")
    last = len(v) - 1
    if level_means is not None:
        for ell in range(1, len(v)):
            if abs(level_means[ell]) < target_stderr / math.sqrt(2.0):
                last = ell
                break
    v = v[: last + 1]
    c = c[: last + 1]
    weight = float(np.sum(np.sqrt(v * c)))
    m = np.ceil(weight * np.sqrt(v / c) / target_stderr**2).astype(np.int64)
    m = np.maximum(m, 1)
    m = np.minimum.accumulate(m)  # enforce the planned counts non-increasing
    return LevelSchedule(n0=n0, levels=last, m=[int(x) for x in m])


def mlmc_pilot(
    model: LevyModel,
    functional: Functional,
    u: float,
    t: float,
    n0: int,
    max_levels: int,
    rng: Seed,
    m_pilot: int = 1000,
    workers: int = 1,
    truncation_n: Optional[int] = None,
) -> tuple[list[float], list[float], list[float]]:
    """Pilot (means, variances, per-sample costs) for levels 0..max_levels."""
    means, variances, costs = [], [], []
    gen_mode = isinstance(rng, np.random.Generator)
    for ell in range(max_levels + 1):
        streams = [rng] if gen_mode else [substream(rng, 1000 + ell, w) for w in range(workers)]
        sizes = _shard_sizes(m_pilot, 1 if gen_mode else workers)
        grid = GridSpec(n=n0 * (1 << ell), t=t)
        if ell == 0:
            acc = _plain_level(model, functional, u, grid, m_pilot, streams, sizes, truncation_n)
        else:
            acc = _coupled_level(model, functional, u, grid, m_pilot, streams, sizes, truncation_n)
        means.append(acc.mean)
        variances.append(acc.variance)
        costs.append(acc.steps / acc.count)
    return means, variances, costs


# ---------------------------------------------------------------------------
# consecutive-level mean-square differences

_COORDS = ("time", "overshoot", "undershoot", "gap_to_max")


@dataclass(frozen=True)
class LevelMseRow:
    """Per-coordinate E[(f_fine - f_coarse)^2] between levels l and l-1."""

    level: int
    n_fine: int
    n_coarse: int
    samples: int
    mse: dict[str, float] = field(default_factory=dict)
    se: dict[str, float] = field(default_factory=dict)


def level_mse_study(
    model: LevyModel,
    u: float,
    t: float,
    levels: Sequence[int],
    m: int,
    rng: Seed,
    workers: int = 1,
    truncation_n: Optional[int] = None,
) -> list[LevelMseRow]:
    """Consecutive-level mean-square differences of all four coordinates.

    Level l compares n = 2^l against n = 2^(l-1) on coupled pairs.  With a
    single sample the row is still emitted, with the standard error flagged
    as NaN.
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    rows = []
    gen_mode = isinstance(rng, np.random.Generator)
    for ell in levels:
        n_f = 1 << ell
        streams = [rng] if gen_mode else [substream(rng, ell, w) for w in range(workers)]
        sizes = _shard_sizes(m, 1 if gen_mode else workers)
        sq_acc = {k: _Acc() for k in _COORDS}
        offset = 0
        for rng_w, m_w in zip(streams, sizes):
            if m_w == 0:
                continue
            cb = simulate_coupled_batch(model, u, GridSpec(n=n_f, t=t), m_w, rng_w, truncation_n=truncation_n)
            for k in _COORDS:
                d = getattr(cb.fine, k) - getattr(cb.coarse, k)
                sq_acc[k].add_values(d * d, 0, offset)
            offset += m_w
        mse = {k: sq_acc[k].mean for k in _COORDS}
        se = {
            k: (math.sqrt(sq_acc[k].variance / m) if m >= 2 else float("nan"))
            for k in _COORDS
        }
        rows.append(LevelMseRow(level=ell, n_fine=n_f, n_coarse=n_f // 2, samples=m, mse=mse, se=se))
    return rows


def fit_log2_slope(levels: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares slope of log2(values) against the level index."""
    if len(levels) != len(values) or len(levels) < 2:
        return float("nan")
    x = np.asarray(levels, dtype=float)
    y = np.log2(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
