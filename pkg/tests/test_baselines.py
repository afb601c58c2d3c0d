import numpy as np
import pytest
from scipy.integrate import quad

from whmc import (
    CdfTable,
    DomainError,
    ParameterError,
    analytic_fptime_table,
    bm_fptime_cdf,
    bm_plain_mc_fptime_cdf,
    sup_norm_error,
    whmc_bm_fptime_cdf,
)
from whmc.baselines import default_time_grid

# Independent oracle for P(tau_1 <= 1): Gaussian walks at steps 2^-10 and
# 2^-12 (400k paths each, seed 20260808), sqrt(h) bias removed by Richardson
# extrapolation 2 F(h/4) - F(h).  Regenerate with
# tests/tools/fine_walk_oracle.py.
FINE_WALK_ORACLE_P_TAU1_LE_1 = 0.315985


class TestAnalyticCdf:
    def test_tends_to_one(self):
        assert bm_fptime_cdf(1.0, 1e8) == pytest.approx(1.0, abs=1e-3)

    def test_monotone_in_horizon_decreasing_in_barrier(self):
        s = np.linspace(0.5, 40.0, 80)
        vals = bm_fptime_cdf(2.0, s)
        assert (np.diff(vals) > 0).all()
        u = np.linspace(0.5, 4.0, 8)
        vals_u = np.array([bm_fptime_cdf(x, 10.0) for x in u])
        assert (np.diff(vals_u) < 0).all()

    @pytest.mark.parametrize("q", [0.5, 1.0, 2.0])
    def test_laplace_transform_pin(self, q):
        # q Int exp(-q s) P(tau_u <= s) ds must equal exp(-u sqrt(2 q))
        u = 1.3
        val, err = quad(lambda s: q * np.exp(-q * s) * bm_fptime_cdf(u, s), 0.0, np.inf, limit=200)
        assert val == pytest.approx(np.exp(-u * np.sqrt(2.0 * q)), abs=1e-6)

    def test_frozen_fine_walk_oracle(self):
        assert bm_fptime_cdf(1.0, 1.0) == pytest.approx(FINE_WALK_ORACLE_P_TAU1_LE_1, abs=0.005)

    def test_domain(self):
        with pytest.raises(DomainError):
            bm_fptime_cdf(-1.0, 1.0)
        with pytest.raises(DomainError):
            bm_fptime_cdf(1.0, 0.0)


class TestPlainWalk:
    def test_unreachable_barrier(self, rng):
        table = bm_plain_mc_fptime_cdf(500.0, 1.0, 0.01, 200, rng)
        assert (table.values == 0.0).all()

    def test_single_sample_still_monotone(self, rng):
        table = bm_plain_mc_fptime_cdf(0.05, 1.0, 0.01, 1, rng)
        assert (np.diff(table.values) >= 0).all()
        assert set(np.unique(table.values)) <= {0.0, 1.0}

    def test_halving_step_reduces_bias(self):
        u, t, m = 1.0, 1.0, 40_000
        ref = analytic_fptime_table(u, t)
        e = {}
        for h in (0.02, 0.01):
            tab = bm_plain_mc_fptime_cdf(u, t, h, m, np.random.default_rng(4))
            e[h] = sup_norm_error(tab, ref)
        assert 0.0 < e[0.01] < e[0.02]


class TestWhmcCdf:
    def test_single_step_walk_has_no_mass_below_horizon(self, rng):
        table = whmc_bm_fptime_cdf(2.0, 50.0, 1, 500, rng, grid=np.array([10.0, 49.9]))
        assert (table.values == 0.0).all()

    def test_error_decreases_with_step_count(self):
        u, t, m = 2.0, 50.0, 40_000
        ref = analytic_fptime_table(u, t)
        errs = [
            sup_norm_error(whmc_bm_fptime_cdf(u, t, n, m, np.random.default_rng(8)), ref)
            for n in (16, 256)
        ]
        assert errs[1] < errs[0]

    def test_beats_plain_at_matched_budget(self):
        u, t, n, m = 2.0, 50.0, 128, 30_000
        ref = analytic_fptime_table(u, t)
        whmc_err = sup_norm_error(whmc_bm_fptime_cdf(u, t, n, m, np.random.default_rng(2)), ref)
        plain_err = sup_norm_error(
            bm_plain_mc_fptime_cdf(u, t, t / (2 * n), m, np.random.default_rng(3)), ref
        )
        assert whmc_err < plain_err


class TestCdfTable:
    def test_validation(self):
        with pytest.raises(ParameterError):
            CdfTable(grid=np.array([1.0, 1.0]), values=np.array([0.1, 0.2]))
        with pytest.raises(ParameterError):
            CdfTable(grid=np.array([1.0]), values=np.array([0.1, 0.2]))

    def test_sup_norm_requires_shared_grid(self):
        a = CdfTable(grid=np.array([1.0, 2.0]), values=np.array([0.1, 0.2]))
        b = CdfTable(grid=np.array([1.0, 3.0]), values=np.array([0.1, 0.2]))
        with pytest.raises(ParameterError):
            sup_norm_error(a, b)

    def test_default_grid(self):
        g = default_time_grid(50.0, 200)
        assert len(g) == 200
        assert g[0] > 0 and g[-1] == 50.0
