"""Localization of the real zeros of F(zeta) = q + Psi(i zeta).

For the tempered jump family every zero is real and simple and strictly
interlaces the poles of F: writing P-_k = beta1 (k - alpha1) for k <= 0 and
P+_k = beta2 (alpha2 + k) for k >= 0,

    zeta-_0 in (P-_0, 0),        zeta-_k in (P-_{-k}, P-_{-k+1})  for k >= 1,
    zeta+_0 in (0, P+_0),        zeta+_k in (P+_{k-1}, P+_k)      for k >= 1.

Each zero is found by bisection on a guard-banded open bracket; bisection is
unconditionally convergent here and the tables are computed once per
(model, q), so speed is immaterial.  All brackets on one side are bisected
simultaneously as vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .models import BetaFamily, LevyModel, psi_shifted_grid

# Fraction of the bracket width shaved off each end before bisecting.
BRACKET_GUARD = 1e-10
_MAX_BISECT = 120


@dataclass(frozen=True)
class RootTable:
    """Zeros and poles of F on both half-lines, ordered outward from zero.

    ``zeta_pos[k]`` lies strictly inside ``(pole_pos[k-1], pole_pos[k])``
    (with 0 as the left end for k = 0) and symmetrically for the negative
    side.  ``root_tolerance`` is the certified bound on |F| at the stored
    zeros.
    """

    q: float
    zeta_neg: np.ndarray
    zeta_pos: np.ndarray
    pole_neg: np.ndarray
    pole_pos: np.ndarray
    root_tolerance: float

    @property
    def count(self) -> int:
        return len(self.zeta_pos)


def _bisect_all(f, lo, hi, side: str):
    guard = BRACKET_GUARD * (hi - lo)
    lo = lo + guard
    hi = hi - guard
    flo = f(lo)
    fhi = f(hi)
    bad = np.sign(flo) == np.sign(fhi)
    if bad.any():
        k = int(np.argmax(bad))
        raise NumericalError(
            f"no sign change in guard-banded bracket {side}[{k}]: "
            f"F({lo[k]!r})={flo[k]!r}, F({hi[k]!r})={fhi[k]!r}"
        )
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        if np.all(width <= 1e-15 + 4.0 * np.finfo(float).eps * np.abs(mid)):
            break
        fm = f(mid)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def find_roots(model: LevyModel, q: float, count: int) -> RootTable:
    """Locate ``count`` zeros of F on each side of the origin.

    Requires a jump-family model with activity on both sides (c1, c2 > 0),
    since the bracket structure above presumes both pole ladders exist.
    """
    if not isinstance(model, BetaFamily):
        raise ParameterError("find_roots is defined for BetaFamily models")
    if not q > 0:
        raise ParameterError("q must be > 0")
    if count < 1:
        raise ParameterError("count must be >= 1")
    p = model.params
    if p.c1 == 0.0 or p.c2 == 0.0:
        raise ParameterError("root brackets require jump activity on both sides (c1, c2 > 0)")

    def f(z):
        return psi_shifted_grid(p, q, z)

    k = np.arange(count, dtype=float)
    pole_pos = p.beta2 * (p.alpha2 + k)
    lo_pos = np.where(k == 0, 0.0, p.beta2 * (p.alpha2 + k - 1.0))
    pole_neg = p.beta1 * (-k - p.alpha1)
    hi_neg = np.where(k == 0, 0.0, p.beta1 * (-k + 1.0 - p.alpha1))

    zeta_pos = _bisect_all(f, lo_pos, pole_pos, "pos")
    zeta_neg = _bisect_all(f, pole_neg, hi_neg, "neg")

    resid = max(float(np.abs(f(zeta_pos)).max()), float(np.abs(f(zeta_neg)).max()))
    return RootTable(
        q=q,
        zeta_neg=zeta_neg,
        zeta_pos=zeta_pos,
        pole_neg=pole_neg,
        pole_pos=pole_pos,
        root_tolerance=resid,
    )
