"""Exact samplers for the running supremum/infimum at an exponential time.

For Brownian motion with drift mu and volatility s the supremum at an
independent Exp(q) time is exponential with rate (sqrt(mu^2 + 2 q s^2) - mu)
/ s^2 and the negated infimum is exponential with the conjugate rate, so the
draws are exact.

For the tempered jump family the characteristic functions of the two factors
are infinite products over the zeros and poles of F(z) = q + Psi(i z).
Keeping N factors of the product, each factor is the law of an atom at zero
with probability p_n plus a defective exponential:

    infimum factor n:   p_n = zeta+_n / pole+_n,  else -Exp(zeta+_n)
    supremum factor n:  p_n = zeta-_n / pole-_n,  else +Exp(-zeta-_n)

A draw of the N-factor truncation is the sum of the independent factor
variables.  Batches are generated by a Poissonized sweep: cell (trial,
factor) fires iff a Poisson mark with mean -ln p_n lands in it, which
reproduces the Bernoulli(1 - p_n) firing law exactly while letting every
factor of every trial be processed in a handful of array operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericalError, ParameterError
from .models import BetaFamily, BrownianMotion, LevyModel
from .roots import RootTable, find_roots

# Factors kept per unit step of the walk that consumes the draws.  The
# truncation tail shifts each draw's mean by O(1/N), and the shift accumulates
# linearly over the walk's steps; tying N to the step count keeps the
# accumulated drift error of a full walk at the 1/64 scale of a single draw's
# tail and makes it cancel between refinement levels.
FACTORS_PER_STEP = 64
MIN_FACTORS = 100


def default_truncation(n_steps: int) -> int:
    """Default factor count for walks of ``n_steps`` steps."""
    return max(MIN_FACTORS, FACTORS_PER_STEP * int(n_steps))


@dataclass(frozen=True)
class WhFactorSampler:
    """Prepared per-(model, q) sampler for the two exponential-time factors."""

    model: LevyModel
    q: float
    truncation_n: Optional[int]
    roots: Optional[RootTable]
    sup_atom_prob: np.ndarray
    sup_rate: np.ndarray
    inf_atom_prob: np.ndarray
    inf_rate: np.ndarray
    _sup_mark_mean: np.ndarray = field(repr=False, default=None)
    _inf_mark_mean: np.ndarray = field(repr=False, default=None)

    @property
    def is_brownian(self) -> bool:
        return isinstance(self.model, BrownianMotion)

    def sample_sup(self, rng: np.random.Generator) -> float:
        """One draw of the truncated supremum factor (>= 0)."""
        return float(self.sample_sup_batch(1, rng)[0])

    def sample_inf(self, rng: np.random.Generator) -> float:
        """One draw of the truncated infimum factor (<= 0)."""
        return float(self.sample_inf_batch(1, rng)[0])

    def sample_sup_batch(self, m: int, rng: np.random.Generator) -> np.ndarray:
        if self.is_brownian:
            return rng.exponential(1.0 / self.sup_rate[0], m)
        return _poissonized_factor_sum(m, self._sup_mark_mean, self.sup_rate, rng, +1.0)

    def sample_inf_batch(self, m: int, rng: np.random.Generator) -> np.ndarray:
        if self.is_brownian:
            return -rng.exponential(1.0 / self.inf_rate[0], m)
        return _poissonized_factor_sum(m, self._inf_mark_mean, self.inf_rate, rng, -1.0)


def _poissonized_factor_sum(m, mark_mean, rates, rng, sign):
    """Sum over factors of (atom at 0 | exponential), vectorized over trials.

    Factor n drops Poisson(m * mark_mean[n]) marks uniformly over the m
    trials; a (trial, factor) cell hit at least once receives exactly one
    exponential of that factor's rate, which fires the cell with probability
    1 - exp(-mark_mean[n]) = 1 - atom_prob[n], independently across cells.
    """
    n_factors = len(rates)
    counts = rng.poisson(m * mark_mean)
    hits = int(counts.sum())
    if hits == 0:
        return np.zeros(m)
    factor = np.repeat(np.arange(n_factors, dtype=np.int64), counts)
    trial = rng.integers(0, m, hits)
    cell = np.unique(trial.astype(np.int64) * n_factors + factor)
    draws = rng.exponential(1.0, cell.size) / rates[cell % n_factors]
    out = np.bincount((cell // n_factors).astype(np.intp), weights=draws, minlength=m)
    return sign * out


def build_sampler(model: LevyModel, q: float, truncation_n: int = MIN_FACTORS) -> WhFactorSampler:
    """Prepare the factor sampler for ``model`` at killing rate ``q``.

    ``truncation_n`` is the factor count N of the truncated products and is
    ignored for Brownian motion, whose factors are exact.
    """
    if not q > 0:
        raise ParameterError("q must be > 0")
    if isinstance(model, BrownianMotion):
        mu, s2 = model.drift, model.volatility**2
        disc = np.sqrt(mu * mu + 2.0 * q * s2)
        sup_rate = (disc - mu) / s2
        inf_rate = (disc + mu) / s2
        zero = np.zeros(1)
        return WhFactorSampler(
            model=model,
            q=q,
            truncation_n=None,
            roots=None,
            sup_atom_prob=zero,
            sup_rate=np.array([sup_rate]),
            inf_atom_prob=zero,
            inf_rate=np.array([inf_rate]),
        )
    if truncation_n < 1:
        raise ParameterError("truncation_n must be >= 1")
    table = find_roots(model, q, truncation_n)
    sup_p = table.zeta_neg / table.pole_neg
    inf_p = table.zeta_pos / table.pole_pos
    for name, p in (("supremum", sup_p), ("infimum", inf_p)):
        if not ((p > 0.0) & (p < 1.0)).all():
            raise NumericalError(f"{name} atom probabilities left (0, 1); root table inconsistent")
    return WhFactorSampler(
        model=model,
        q=q,
        truncation_n=truncation_n,
        roots=table,
        sup_atom_prob=sup_p,
        sup_rate=-table.zeta_neg,
        inf_atom_prob=inf_p,
        inf_rate=table.zeta_pos,
        _sup_mark_mean=-np.log(sup_p),
        _inf_mark_mean=-np.log(inf_p),
    )


def truncation_error_bound(sampler: WhFactorSampler) -> float:
    """Mean-square truncation bound 3 / (beta (alpha + N))^2, worse side.

    Exactly zero for Brownian motion, whose sampler is not truncated.
    """
    if sampler.is_brownian:
        return 0.0
    p = sampler.model.params
    n = sampler.truncation_n
    inf_bound = 3.0 / (p.beta2 * (p.alpha2 + n)) ** 2
    sup_bound = 3.0 / (p.beta1 * (p.alpha1 + n)) ** 2
    return max(inf_bound, sup_bound)


def factor_product_cf(table: RootTable, z: float, side: str, count: Optional[int] = None) -> complex:
    """Characteristic function of the ``count``-factor truncated product.

    ``side`` selects the supremum ("sup") or infimum ("inf") factor.  This is
    the analytic product over (1 + iz/pole) / (1 + iz/zeta) read directly off
    the root table.
    """
    if side == "inf":
        roots, poles = table.zeta_pos, table.pole_pos
    elif side == "sup":
        roots, poles = table.zeta_neg, table.pole_neg
    else:
        raise ParameterError("side must be 'sup' or 'inf'")
    if count is None:
        count = len(roots)
    iz = 1j * z
    num = 1.0 + iz / poles[:count]
    den = 1.0 + iz / roots[:count]
    return complex(np.prod(num / den))
