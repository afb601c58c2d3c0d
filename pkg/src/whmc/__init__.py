"""Monte Carlo simulation of path functionals of Levy processes.

The walk construction samples the running supremum and infimum of the
process at independent exponential times, which makes first passage times,
overshoots, undershoots and the pre-passage maximum directly observable
without the grid-skipping bias of increment-based random walks.
"""

from .baselines import (
    CdfTable,
    analytic_fptime_table,
    bm_fptime_cdf,
    bm_plain_mc_fptime_cdf,
    bm_plain_mc_passage_times,
    sup_norm_error,
    whmc_bm_fptime_cdf,
)
from .coupling import CoupledBatch, coupled_pair_sample, simulate_coupled_batch, thin_steps
from .engine import (
    FourTuple,
    GridSpec,
    SimulationBatch,
    WhPath,
    first_passage_tuple,
    generate_grid_times,
    simulate_batch,
    simulate_first_passage,
    simulate_wh_path,
    terminal_pair,
    walk_from_steps,
)
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    DomainError,
    NumericalError,
    ParameterError,
    WhmcError,
)
from .estimators import (
    DiscountedOvershootIndicator,
    EstimateReport,
    FirstPassageTime,
    IndicatorCdf,
    LevelSchedule,
    LevelStats,
    TerminalPayoff,
    TupleMap,
    fit_log2_slope,
    gerber_shiu_value,
    level_mse_study,
    mc_estimate,
    mlmc_estimate,
    mlmc_pilot,
    mlmc_plan,
    substream,
)
from .models import (
    BetaFamily,
    BetaFamilyParams,
    BrownianMotion,
    LevyModel,
    eval_psi_shifted,
    levy_density,
    reflect_model,
)
from .roots import RootTable, find_roots
from .sampling import (
    WhFactorSampler,
    build_sampler,
    default_truncation,
    factor_product_cf,
    truncation_error_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
