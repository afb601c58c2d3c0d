import numpy as np
import pytest

from whmc import BetaFamily, BetaFamilyParams, BrownianMotion, NumericalError, ParameterError, find_roots
from whmc.models import psi_shifted_grid


class TestFindRoots:
    def test_count_one_signs(self, asym_model):
        tab = find_roots(asym_model, 1.0, 1)
        assert len(tab.zeta_pos) == len(tab.zeta_neg) == 1
        assert tab.zeta_neg[0] < 0.0 < tab.zeta_pos[0]

    @pytest.mark.parametrize("q", [0.5, 1.0, 4.0])
    def test_residuals_certified(self, asym_model, q):
        tab = find_roots(asym_model, q, 64)
        resid = np.abs(psi_shifted_grid(asym_model.params, q, tab.zeta_pos))
        resid_n = np.abs(psi_shifted_grid(asym_model.params, q, tab.zeta_neg))
        assert resid.max() <= 1e-10
        assert resid_n.max() <= 1e-10
        assert tab.root_tolerance <= 1e-10

    def test_strict_bracket_containment(self, asym_model):
        p = asym_model.params
        tab = find_roots(asym_model, 1.0, 64)
        k = np.arange(64)
        lo = np.where(k == 0, 0.0, p.beta2 * (p.alpha2 + k - 1))
        hi = p.beta2 * (p.alpha2 + k)
        assert ((tab.zeta_pos > lo) & (tab.zeta_pos < hi)).all()
        hi_n = np.where(k == 0, 0.0, p.beta1 * (-k + 1 - p.alpha1))
        lo_n = p.beta1 * (-k - p.alpha1)
        assert ((tab.zeta_neg > lo_n) & (tab.zeta_neg < hi_n)).all()

    def test_arrays_strictly_monotone_and_interlaced(self, asym_model):
        tab = find_roots(asym_model, 2.0, 32)
        assert (np.diff(tab.zeta_pos) > 0).all()
        assert (np.diff(tab.zeta_neg) < 0).all()
        # pole k-1 < root k < pole k on the positive side
        assert (tab.zeta_pos[1:] > tab.pole_pos[:-1]).all()
        assert (tab.zeta_pos < tab.pole_pos).all()
        assert (tab.zeta_neg > tab.pole_neg).all()

    @pytest.mark.parametrize(
        "lam1,lam2,q,count",
        [(0.5, 0.5, 1.0, 12), (1.5, 2.5, 0.7, 10), (2.0, 1.0, 5.0, 16), (1.0, 2.0, 64.0, 20)],
    )
    def test_invariants_across_shapes(self, lam1, lam2, q, count):
        model = BetaFamily(
            BetaFamilyParams(
                c1=0.8, alpha1=1.3, beta1=0.9, lambda1=lam1,
                c2=1.2, alpha2=0.7, beta2=1.4, lambda2=lam2,
            )
        )
        tab = find_roots(model, q, count)
        p = model.params
        k = np.arange(count)
        lo = np.where(k == 0, 0.0, p.beta2 * (p.alpha2 + k - 1))
        hi = p.beta2 * (p.alpha2 + k)
        assert ((tab.zeta_pos > lo) & (tab.zeta_pos < hi)).all()
        resid = np.abs(psi_shifted_grid(p, q, tab.zeta_pos))
        assert resid.max() <= 1e-9

    def test_gaussian_component_accepted(self, asym_model):
        model = BetaFamily(
            BetaFamilyParams(
                c1=1.0, alpha1=1.0, beta1=1.0, lambda1=1.0,
                c2=1.0, alpha2=2.0, beta2=1.0, lambda2=1.0, sigma=0.5,
            )
        )
        tab = find_roots(model, 1.0, 16)
        assert tab.root_tolerance <= 1e-10

    def test_rejects_one_sided_and_brownian(self, asym_model):
        with pytest.raises(ParameterError):
            find_roots(BrownianMotion(), 1.0, 4)
        one_sided = BetaFamily(
            BetaFamilyParams(
                c1=1.0, alpha1=1.0, beta1=1.0, lambda1=1.0,
                c2=0.0, alpha2=2.0, beta2=1.0, lambda2=1.0,
            )
        )
        with pytest.raises(ParameterError):
            find_roots(one_sided, 1.0, 4)
        with pytest.raises(ParameterError):
            find_roots(asym_model, -1.0, 4)
        with pytest.raises(ParameterError):
            find_roots(asym_model, 1.0, 0)
