"""The stochastic-grid random walk and its first-passage functionals.

A walk of n steps stands in for the process observed on a random grid whose
spacings are i.i.d. Exp(n/t), so the k-th grid point is near k t / n.  Each
step consumes one supremum draw S and one infimum draw I (in that order) and
updates

    V_k = V_{k-1} + S_k + I_k,      J_k = max(J_{k-1}, V_{k-1} + S_k),

which reproduces, jointly in k, the law of (position, running maximum) of the
process at the grid times.  First passage over a barrier u is read off the J
sequence: kappa is the first index with J_k > u (strictly), and the emitted
tuple is

    ( (t/n) (kappa ^ n),  V_{kappa^n} - u,  u - V_{(kappa-1)^n},  u - J_{(kappa-1)^n} )

together with a crossed flag (kappa <= n).  Ties J_k = u count as not yet
crossed; they have probability zero and the strict rule keeps the outcome
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, ParameterError
from .sampling import WhFactorSampler


@dataclass(frozen=True)
class GridSpec:
    """Step count n over the horizon [0, t]; the grid rate is n / t."""

    n: int
    t: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if not self.t > 0:
            raise ParameterError("t must be > 0")

    @property
    def rate(self) -> float:
        return self.n / self.t


@dataclass
class WhPath:
    """One simulated walk: positions v[0..n] and running maxima j[0..n]."""

    v: np.ndarray
    j: np.ndarray

    @property
    def n(self) -> int:
        return len(self.v) - 1


@dataclass(frozen=True)
class FourTuple:
    """First-passage quadruple of one trial, plus the crossed flag."""

    time: float
    overshoot: float
    undershoot: float
    gap_to_max: float
    crossed: bool


@dataclass
class SimulationBatch:
    """Vectorized first-passage output of m trials at one step count."""

    grid: GridSpec
    u: float
    time: np.ndarray
    overshoot: np.ndarray
    undershoot: np.ndarray
    gap_to_max: np.ndarray
    crossed: np.ndarray
    terminal_v: np.ndarray
    terminal_j: np.ndarray

    def __len__(self) -> int:
        return len(self.time)

    def tuple_at(self, i: int) -> FourTuple:
        return FourTuple(
            time=float(self.time[i]),
            overshoot=float(self.overshoot[i]),
            undershoot=float(self.undershoot[i]),
            gap_to_max=float(self.gap_to_max[i]),
            crossed=bool(self.crossed[i]),
        )


def walk_from_steps(s: np.ndarray, i: np.ndarray) -> WhPath:
    """Run the (V, J) recursion over explicit step draws."""
    s = np.asarray(s, dtype=float)
    i = np.asarray(i, dtype=float)
    if s.shape != i.shape:
        raise ParameterError("s and i must have equal length")
    n = len(s)
    v = np.zeros(n + 1)
    j = np.zeros(n + 1)
    for k in range(1, n + 1):
        cand = v[k - 1] + s[k - 1]
        j[k] = cand if cand > j[k - 1] else j[k - 1]
        v[k] = cand + i[k - 1]
    return WhPath(v=v, j=j)


def _check_rate(sampler: WhFactorSampler, grid: GridSpec) -> None:
    if abs(sampler.q - grid.rate) > 1e-9 * max(1.0, grid.rate):
        raise ContractError(
            f"sampler killing rate q={sampler.q!r} does not match grid rate n/t={grid.rate!r}"
        )


def simulate_wh_path(sampler: WhFactorSampler, grid: GridSpec, rng: np.random.Generator) -> WhPath:
    """Simulate one materialized n-step walk; consumes exactly 2n draws."""
    _check_rate(sampler, grid)
    s = np.empty(grid.n)
    i = np.empty(grid.n)
    for k in range(grid.n):
        s[k] = sampler.sample_sup(rng)
        i[k] = sampler.sample_inf(rng)
    return walk_from_steps(s, i)


def first_passage_tuple(path: WhPath, grid: GridSpec, u: float) -> FourTuple:
    """Read the first-passage quadruple off a materialized walk."""
    if not u > 0:
        raise DomainError("u must be > 0")
    n = path.n
    exceed = path.j > u
    if exceed.any():
        kappa = int(np.argmax(exceed))
        return FourTuple(
            time=(grid.t / grid.n) * kappa,
            overshoot=float(path.v[kappa] - u),
            undershoot=float(u - path.v[kappa - 1]),
            gap_to_max=float(u - path.j[kappa - 1]),
            crossed=True,
        )
    return FourTuple(
        time=grid.t,
        overshoot=float(path.v[n] - u),
        undershoot=float(u - path.v[n]),
        gap_to_max=float(u - path.j[n]),
        crossed=False,
    )


def terminal_pair(path: WhPath) -> tuple[float, float]:
    """(V_n, J_n): the walk's approximation of (X_t, running max of X at t)."""
    return float(path.v[-1]), float(path.j[-1])


def simulate_first_passage(
    sampler: WhFactorSampler, grid: GridSpec, u: float, rng: np.random.Generator
) -> FourTuple:
    """Streaming form of simulate + first_passage_tuple; no arrays retained."""
    _check_rate(sampler, grid)
    if not u > 0:
        raise DomainError("u must be > 0")
    v = 0.0
    j = 0.0
    for k in range(1, grid.n + 1):
        s = sampler.sample_sup(rng)
        i = sampler.sample_inf(rng)
        cand = v + s
        if cand > u:
            return FourTuple(
                time=(grid.t / grid.n) * k,
                overshoot=(cand + i) - u,
                undershoot=u - v,
                gap_to_max=u - j,
                crossed=True,
            )
        if cand > j:
            j = cand
        v = cand + i
    return FourTuple(
        time=grid.t,
        overshoot=v - u,
        undershoot=u - v,
        gap_to_max=u - j,
        crossed=False,
    )


def simulate_batch(
    sampler: WhFactorSampler,
    grid: GridSpec,
    u: float,
    m: int,
    rng: np.random.Generator,
) -> SimulationBatch:
    """m independent trials, vectorized across trials and streamed over steps."""
    _check_rate(sampler, grid)
    if not u > 0:
        raise DomainError("u must be > 0")
    if m < 1:
        raise ParameterError("m must be >= 1")
    n, t = grid.n, grid.t
    v = np.zeros(m)
    j = np.zeros(m)
    open_ = np.ones(m, dtype=bool)
    kappa = np.zeros(m, dtype=np.int64)
    v_at = np.zeros(m)
    v_prev = np.zeros(m)
    j_prev = np.zeros(m)
    for k in range(1, n + 1):
        s = sampler.sample_sup_batch(m, rng)
        i = sampler.sample_inf_batch(m, rng)
        cand = v + s
        newly = open_ & (cand > u)
        if newly.any():
            kappa[newly] = k
            v_prev[newly] = v[newly]
            j_prev[newly] = j[newly]
            v_at[newly] = cand[newly] + i[newly]
            open_[newly] = False
        np.maximum(j, cand, out=j)
        v = cand + i
    crossed = ~open_
    time = np.where(crossed, kappa * (t / n), t)
    overshoot = np.where(crossed, v_at, v) - u
    undershoot = u - np.where(crossed, v_prev, v)
    gap_to_max = u - np.where(crossed, j_prev, j)
    return SimulationBatch(
        grid=grid,
        u=u,
        time=time,
        overshoot=overshoot,
        undershoot=undershoot,
        gap_to_max=gap_to_max,
        crossed=crossed,
        terminal_v=v,
        terminal_j=j,
    )


def generate_grid_times(grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
    """Grid points g(0..n): g(0) = 0, spacings i.i.d. Exp(n/t).

    Diagnostic only; the estimators never materialize grid times because they
    cancel out of every first-passage formula.
    """
    out = np.empty(grid.n + 1)
    out[0] = 0.0
    out[1:] = np.cumsum(rng.exponential(grid.t / grid.n, grid.n))
    return out
