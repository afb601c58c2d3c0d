"""Law-exact coupling of two refinement levels of the walk.

Fine steps are drawn at rate 2 lambda_c; after each fine step an independent
fair coin decides whether a coarse block closes there.  A block therefore
spans a Geometric(1/2) number of fine steps, and since a geometric sum of
Exp(2 lambda_c) spacings is Exp(lambda_c), aggregating each block

    S* = max over steps j in the block of (position before j + S_j) - start
    I* = (block total increment) - S*

yields a pair distributed exactly as the supremum/infimum factors at rate
lambda_c, independent across blocks.  The coarse walk built from (S*, I*) is
therefore itself an exact n_coarse-step walk, while sharing every fine draw
with the fine walk, which is what makes consecutive-level differences small.

In global coordinates the construction collapses to bookkeeping on a single
candidate sequence C_j = (position before step j) + S_j: both walks' running
maxima are running maxima of C, the fine walk's positions are the prefix sums
P_j, and the coarse walk samples both at block ends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import FourTuple, GridSpec, SimulationBatch
from .errors import DomainError, ParameterError
from .models import LevyModel
from .sampling import WhFactorSampler, build_sampler, default_truncation

# Overdraw beyond n_fine so that n_coarse blocks close inside the buffer in
# all but astronomically rare chunks; short chunks extend the buffer.
def _buffer_columns(n_fine: int) -> int:
    return n_fine + int(8.0 * np.sqrt(n_fine)) + 48


_CHUNK_ELEMS = 2_000_000


@dataclass
class CoupledBatch:
    """Paired fine/coarse first-passage batches sharing their fine draws."""

    fine: SimulationBatch
    coarse: SimulationBatch
    steps: int


def thin_steps(s: np.ndarray, i: np.ndarray, marks: np.ndarray):
    """Aggregate explicit fine steps into coarse steps at marked positions.

    Only completed blocks (up to the last True in ``marks``) are returned.
    Reference implementation shared by the tape-replay tests.
    """
    s = np.asarray(s, dtype=float)
    i = np.asarray(i, dtype=float)
    marks = np.asarray(marks, dtype=bool)
    if not (len(s) == len(i) == len(marks)):
        raise ParameterError("s, i and marks must have equal length")
    s_star = []
    i_star = []
    w = 0.0
    smax = -np.inf
    for k in range(len(s)):
        cand = w + s[k]
        if cand > smax:
            smax = cand
        w = cand + i[k]
        if marks[k]:
            s_star.append(smax)
            i_star.append(w - smax)
            w = 0.0
            smax = -np.inf
    return np.array(s_star), np.array(i_star)


def _draw_columns(sampler, rows, cols, boundary_prob, rng):
    marks = rng.random((rows, cols)) < boundary_prob
    s = np.empty((rows, cols))
    i = np.empty((rows, cols))
    for j in range(cols):
        s[:, j] = sampler.sample_sup_batch(rows, rng)
        i[:, j] = sampler.sample_inf_batch(rows, rng)
    return s, i, marks


def _coupled_chunk(sampler, n_fine, t, u, rows, boundary_prob, rng):
    n_c = n_fine // 2
    nb = _buffer_columns(n_fine)
    s, i, marks = _draw_columns(sampler, rows, nb, boundary_prob, rng)
    while True:
        short = marks.sum(axis=1) < n_c
        if not short.any():
            break
        extra = 16
        s2, i2, m2 = _draw_columns(sampler, rows, extra, boundary_prob, rng)
        s = np.concatenate([s, s2], axis=1)
        i = np.concatenate([i, i2], axis=1)
        marks = np.concatenate([marks, m2], axis=1)
        nb += extra

    ridx = np.arange(rows)
    p = np.cumsum(s + i, axis=1)
    c = p - i  # C_j = position before step j, plus S_j
    jrun = np.maximum.accumulate(c, axis=1)

    # fine tuple on the first n_fine steps
    hit_f = c[:, :n_fine] > u
    crossed_f = hit_f.any(axis=1)
    jstar_f = np.argmax(hit_f, axis=1)
    prev_f = np.maximum(jstar_f - 1, 0)
    first_step = jstar_f == 0
    time_f = np.where(crossed_f, (jstar_f + 1) * (t / n_fine), t)
    over_f = np.where(crossed_f, p[ridx, jstar_f], p[:, n_fine - 1]) - u
    pos_prev_f = np.where(first_step, 0.0, p[ridx, prev_f])
    jmax_prev_f = np.where(first_step, 0.0, jrun[ridx, prev_f])
    under_f = u - np.where(crossed_f, pos_prev_f, p[:, n_fine - 1])
    gap_f = u - np.where(crossed_f, jmax_prev_f, jrun[:, n_fine - 1])
    fine = dict(
        time=time_f,
        overshoot=over_f,
        undershoot=under_f,
        gap_to_max=gap_f,
        crossed=crossed_f,
        terminal_v=p[:, n_fine - 1].copy(),
        terminal_j=jrun[:, n_fine - 1].copy(),
    )

    # coarse tuple on the first n_c blocks
    cumm = np.cumsum(marks, axis=1)
    z_nc = np.argmax(cumm >= n_c, axis=1)  # column of the n_c-th mark
    hit = c > u
    any_hit = hit.any(axis=1)
    jstar = np.where(any_hit, np.argmax(hit, axis=1), 0)
    crossed_c = any_hit & (jstar <= z_nc)
    block = cumm[ridx, jstar] - marks[ridx, jstar] + 1  # 1-based block of jstar

    col = np.arange(nb, dtype=np.int64)
    nxt = np.where(marks, col, nb)[:, ::-1]
    nxt = np.minimum.accumulate(nxt, axis=1)[:, ::-1]  # first marked col >= j
    prv = np.where(marks, col, -1)
    prv = np.maximum.accumulate(prv, axis=1)  # last marked col <= j

    z_k = nxt[ridx, jstar]  # end of the block containing jstar
    z_prev = np.where(jstar > 0, prv[ridx, np.maximum(jstar - 1, 0)], -1)
    no_prev = z_prev < 0

    end = np.where(crossed_c, z_k, z_nc)
    time_c = np.where(crossed_c, block * (t / n_c), t)
    over_c = p[ridx, end] - u
    pos_prev_c = np.where(no_prev, 0.0, p[ridx, np.maximum(z_prev, 0)])
    jmax_prev_c = np.where(no_prev, 0.0, jrun[ridx, np.maximum(z_prev, 0)])
    under_c = u - np.where(crossed_c, pos_prev_c, p[ridx, z_nc])
    gap_c = u - np.where(crossed_c, jmax_prev_c, jrun[ridx, z_nc])
    coarse = dict(
        time=time_c,
        overshoot=over_c,
        undershoot=under_c,
        gap_to_max=gap_c,
        crossed=crossed_c,
        terminal_v=p[ridx, z_nc],
        terminal_j=jrun[ridx, z_nc],
    )
    steps = int(np.maximum(n_fine, z_nc + 1).sum()) + n_c * rows
    return fine, coarse, steps


def simulate_coupled_batch(
    model: LevyModel,
    u: float,
    grid_fine: GridSpec,
    m: int,
    rng: np.random.Generator,
    truncation_n: int | None = None,
    boundary_prob: float = 0.5,
) -> CoupledBatch:
    """m coupled (fine, coarse) first-passage pairs; coarse has n/2 steps."""
    if grid_fine.n % 2 != 0 or grid_fine.n < 2:
        raise ParameterError("the fine level must have an even step count >= 2")
    if not u > 0:
        raise DomainError("u must be > 0")
    if not (0.0 < boundary_prob <= 1.0):
        raise ParameterError("boundary_prob must lie in (0, 1]")
    n_f, t = grid_fine.n, grid_fine.t
    if truncation_n is None:
        truncation_n = default_truncation(n_f)
    sampler = build_sampler(model, grid_fine.rate, truncation_n)

    nb = _buffer_columns(n_f)
    chunk_rows = max(64, min(m, _CHUNK_ELEMS // nb))
    parts_f, parts_c = [], []
    steps = 0
    done = 0
    while done < m:
        rows = min(chunk_rows, m - done)
        fine, coarse, st = _coupled_chunk(sampler, n_f, t, u, rows, boundary_prob, rng)
        parts_f.append(fine)
        parts_c.append(coarse)
        steps += st
        done += rows

    def merge(parts, grid):
        keys = parts[0].keys()
        merged = {k: np.concatenate([p[k] for p in parts]) for k in keys}
        return SimulationBatch(grid=grid, u=u, **merged)

    fine_batch = merge(parts_f, grid_fine)
    coarse_batch = merge(parts_c, GridSpec(n=n_f // 2, t=t))
    return CoupledBatch(fine=fine_batch, coarse=coarse_batch, steps=steps)


def coupled_pair_sample(
    model: LevyModel,
    u: float,
    t: float,
    n_fine: int,
    rng: np.random.Generator,
    truncation_n: int | None = None,
    boundary_prob: float = 0.5,
) -> tuple[FourTuple, FourTuple]:
    """One coupled (fine, coarse) pair of first-passage tuples."""
    batch = simulate_coupled_batch(
        model, u, GridSpec(n=n_fine, t=t), 1, rng, truncation_n=truncation_n, boundary_prob=boundary_prob
    )
    return batch.fine.tuple_at(0), batch.coarse.tuple_at(0)
