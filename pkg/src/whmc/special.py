"""Special-function helpers for the meromorphic characteristic exponent.

The exponent of the tempered-jump family needs the Beta function at negative
non-integer arguments (sign included), the digamma/trigamma functions on the
whole real line, and two auxiliary combinations that stay finite where the
digamma itself has poles.  Everything here is vectorized over numpy arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.special import digamma, gammaln, gammasgn, polygamma

EULER_GAMMA = 0.5772156649015328606
_ZETA2 = np.pi**2 / 6.0
_ZETA3 = 1.2020569031595942854
_ZETA4 = np.pi**4 / 90.0
_ZETA5 = 1.0369277551433699263

# Switch to the power series this close to a pole of digamma.
_SERIES_CUT = 1e-4


def beta_signed(a, b):
    """B(a, b) for real a, b, valid at negative non-integer arguments.

    Computed as sign * exp(log|Gamma(a)| + log|Gamma(b)| - log|Gamma(a+b)|)
    with the sign tracked through ``gammasgn``.  Where a + b is a nonpositive
    integer while a and b are not, 1/Gamma(a+b) has a genuine zero and B
    vanishes; ``gammasgn`` reports NaN at those points, so they are patched
    explicitly.
    """
    ln_a = gammaln(a)
    ln_b = gammaln(b)
    ln_den = gammaln(np.asarray(a) + b)
    with np.errstate(invalid="ignore"):
        out = gammasgn(a) * gammasgn(b) * gammasgn(np.asarray(a) + b) * np.exp(ln_a + ln_b - ln_den)
    removable = np.isinf(ln_den) & np.isfinite(ln_a) & np.isfinite(ln_b)
    if np.any(removable):
        out = np.where(removable, 0.0, out)
    return out if np.ndim(out) else float(out)


def trigamma(x):
    """psi'(x) on the real line, using the reflection formula for x < 0.5."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    lo = x < 0.5
    out[~lo] = polygamma(1, x[~lo])
    if lo.any():
        xl = x[lo]
        out[lo] = np.pi**2 / np.sin(np.pi * xl) ** 2 - polygamma(1, 1.0 - xl)
    return float(out[0]) if scalar else out


def y_psi(y):
    """y * psi(y), finite at y = 0 (limit -1); series used near the pole."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    near = np.abs(y) < _SERIES_CUT
    out = np.empty_like(y)
    ys = y[near]
    out[near] = -1.0 - EULER_GAMMA * ys + _ZETA2 * ys**2 - _ZETA3 * ys**3 + _ZETA4 * ys**4
    yf = y[~near]
    out[~near] = yf * digamma(yf)
    return float(out[0]) if scalar else out


def y_psi1_plus_psi(y):
    """y * psi'(y) + psi(y), finite at y = 0 (limit -EULER_GAMMA)."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    near = np.abs(y) < _SERIES_CUT
    out = np.empty_like(y)
    ys = y[near]
    out[near] = -EULER_GAMMA + 2 * _ZETA2 * ys - 3 * _ZETA3 * ys**2 + 4 * _ZETA4 * ys**3 - 5 * _ZETA5 * ys**4
    yf = y[~near]
    out[~near] = yf * trigamma(yf) + digamma(yf)
    return float(out[0]) if scalar else out
