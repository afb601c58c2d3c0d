"""Levy process models and the real-argument characteristic exponent.

Two model families are supported: Brownian motion with drift, for which the
exponential-time supremum/infimum laws are exact two-sided exponentials, and
the tempered power-exponential jump family ("beta family") whose jump density
is

    pi(x) = 1{x>0} c1 exp(-a1 b1 x) / (1 - exp(-b1 x))^l1
          + 1{x<0} c2 exp( a2 b2 x) / (1 - exp( b2 x))^l2

with a Gaussian part sigma and linear coefficient a.  For that family the
function F(z) = q + Psi(i z) is real, meromorphic in z with known pole
locations, and its zeros drive the exact factor samplers in
:mod:`whmc.sampling`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import digamma

from .errors import DomainError, ParameterError
from .special import beta_signed, trigamma, y_psi, y_psi1_plus_psi

# Switch to an analytic-limit branch this close to the shape values 1 and 2,
# where the Beta-function form degenerates.
LIMIT_BRANCH_CUT = 1e-8

# Reject evaluation this close to a pole of F (in pole-argument units).
POLE_GUARD = 1e-13


@dataclass(frozen=True)
class BetaFamilyParams:
    """Parameter set of the tempered jump family.

    ``c1, alpha1, beta1, lambda1`` shape the positive-jump density and
    ``c2, alpha2, beta2, lambda2`` the negative-jump density; ``sigma`` is the
    Gaussian coefficient and ``a`` the linear coefficient of the exponent.
    """

    c1: float
    alpha1: float
    beta1: float
    lambda1: float
    c2: float
    alpha2: float
    beta2: float
    lambda2: float
    sigma: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        for name in ("c1", "c2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        for name in ("lambda1", "lambda2"):
            lam = getattr(self, name)
            if not (0.0 < lam < 3.0):
                raise ParameterError(f"{name} must lie in (0, 3)")
        if self.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        if self.sigma == 0.0 and self.c1 == 0.0 and self.c2 == 0.0:
            raise ParameterError("degenerate process: sigma, c1 and c2 all vanish")


@dataclass(frozen=True)
class BrownianMotion:
    """Brownian motion with drift: X_t = drift * t + volatility * W_t."""

    drift: float = 0.0
    volatility: float = 1.0

    def __post_init__(self):
        if not self.volatility > 0:
            raise ParameterError("volatility must be > 0")


@dataclass(frozen=True)
class BetaFamily:
    params: BetaFamilyParams


LevyModel = Union[BrownianMotion, BetaFamily]


def _side_term(alpha: float, x, lam: float):
    """Jump-side contribution to q + Psi(i zeta), normalized by c/beta.

    For generic shape lam this is

        B(alpha, 1-lam) - B(alpha+x, 1-lam) - x * W(alpha, lam)

    with W(alpha, lam) = B(alpha, 1-lam) * (psi(1+alpha-lam) - psi(alpha)),
    i.e. the Beta difference with the linear compensator folded in so the
    combination stays finite as lam -> 1 or lam -> 2.  At those shapes the
    analytic limits are used:

        lam = 1:  psi(alpha+x) - psi(alpha) - x psi'(alpha)
        lam = 2:  u(alpha-1) - u(alpha+x-1) + x v(alpha-1)

    with u(y) = y psi(y) and v(y) = y psi'(y) + psi(y).
    """
    if abs(lam - 1.0) < LIMIT_BRANCH_CUT:
        return digamma(alpha + x) - digamma(alpha) - x * trigamma(alpha)
    if abs(lam - 2.0) < LIMIT_BRANCH_CUT:
        return y_psi(alpha - 1.0) - y_psi(alpha + x - 1.0) + x * y_psi1_plus_psi(alpha - 1.0)
    b0 = beta_signed(alpha, 1.0 - lam)
    bx = beta_signed(alpha + x, 1.0 - lam)
    w = b0 * (digamma(1.0 + alpha - lam) - digamma(alpha))
    return b0 - bx - x * w


def psi_shifted_grid(params: BetaFamilyParams, q: float, zeta):
    """Vectorized F(zeta) = q + Psi(i zeta); no pole guard (caller's duty)."""
    zeta = np.asarray(zeta, dtype=float)
    out = q - 0.5 * params.sigma**2 * zeta**2 + params.a * zeta
    if params.c1 > 0:
        out = out + (params.c1 / params.beta1) * _side_term(params.alpha1, zeta / params.beta1, params.lambda1)
    if params.c2 > 0:
        out = out + (params.c2 / params.beta2) * _side_term(params.alpha2, -zeta / params.beta2, params.lambda2)
    return out


def _pole_distance(params: BetaFamilyParams, zeta: float) -> float:
    """Distance from zeta to the nearest pole of F, in argument units."""
    dist = np.inf
    if params.c1 > 0:
        arg = params.alpha1 + zeta / params.beta1
        nearest = min(round(arg), 0)
        dist = min(dist, abs(arg - nearest))
    if params.c2 > 0:
        arg = params.alpha2 - zeta / params.beta2
        nearest = min(round(arg), 0)
        dist = min(dist, abs(arg - nearest))
    return float(dist)


def eval_psi_shifted(model: LevyModel, q: float, zeta: float) -> float:
    """F(zeta) = q + Psi(i zeta) for a jump-family model, in real arithmetic.

    Raises
    ------
    ParameterError
        If the model is not a ``BetaFamily`` or q <= 0.
    DomainError
        If ``zeta`` falls within the guard band of a pole of F.
    """
    if not isinstance(model, BetaFamily):
        raise ParameterError("eval_psi_shifted is defined for BetaFamily models")
    if not q > 0:
        raise ParameterError("q must be > 0")
    params = model.params
    if _pole_distance(params, zeta) < POLE_GUARD * max(1.0, abs(zeta)):
        raise DomainError(f"zeta={zeta!r} is inside the guard band of a pole")
    return float(psi_shifted_grid(params, q, zeta))


def levy_density(model: LevyModel, x: float) -> float:
    """Jump density pi(x); zero for Brownian motion, domain error at x = 0."""
    if x == 0.0:
        raise DomainError("the jump density is not defined at x = 0")
    if isinstance(model, BrownianMotion):
        return 0.0
    p = model.params
    if x > 0:
        return p.c1 * np.exp(-p.alpha1 * p.beta1 * x) / (1.0 - np.exp(-p.beta1 * x)) ** p.lambda1
    return p.c2 * np.exp(p.alpha2 * p.beta2 * x) / (1.0 - np.exp(p.beta2 * x)) ** p.lambda2


def reflect_model(model: LevyModel) -> LevyModel:
    """The law of -X: jump sides swap and the linear terms change sign."""
    if isinstance(model, BrownianMotion):
        return BrownianMotion(drift=-model.drift, volatility=model.volatility)
    p = model.params
    return BetaFamily(
        BetaFamilyParams(
            c1=p.c2,
            alpha1=p.alpha2,
            beta1=p.beta2,
            lambda1=p.lambda2,
            c2=p.c1,
            alpha2=p.alpha1,
            beta2=p.beta1,
            lambda2=p.lambda1,
            sigma=p.sigma,
            a=-p.a,
        )
    )
