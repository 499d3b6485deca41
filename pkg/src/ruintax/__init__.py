"""Ruin probabilities and ruin times for a Brownian surplus with interest and tax.

The package has three legs that cross-validate each other:

* exact-law Monte Carlo simulation of ruin events and ruin times
  (:mod:`ruintax.simulate`),
* closed-form large-capital approximations (:mod:`ruintax.asymptotics`),
* Monte Carlo estimation of the Brownian-functional constants those
  approximations need (:mod:`ruintax.constants`),

plus numeric verification of the deterministic surfaces behind the
approximations (:mod:`ruintax.fields`) and a command line front end
(:mod:`ruintax.cli`).
"""

from .asymptotics import (
    DEFAULT_EXPONENT_FACTOR,
    EquivalencePair,
    FiniteHorizonQuantities,
    InfiniteHorizonQuantities,
    UnsupportedRegimeError,
    albrecher_hipp_exact,
    finite_horizon_ruin_asymptotic,
    finite_horizon_ruin_time_tail,
    infinite_horizon_form_equivalence,
    infinite_horizon_ruin_asymptotic,
    infinite_horizon_ruin_time_cdf,
    log_finite_horizon_ruin_asymptotic,
    log_infinite_horizon_ruin_asymptotic,
    t_u,
)
from .constants import (
    ConstantSpec,
    EstimatorConfig,
    GridRefinementWarning,
    GridTooCoarseError,
    TruncationError,
    estimate_constant,
    estimate_constant_curve,
    estimate_pair_phat_ptilde,
    pickands_rate_check,
)
from .mc import MCEstimate
from .model import (
    DELTA_ZERO_TOL,
    INFINITE,
    GridSpec,
    ModelParams,
    PathSample,
    apply_tax,
    is_ruined,
    log_normal_survival,
    normal_survival,
    sample_paths,
    y_increment_law,
)
from .simulate import (
    ConditionalRuinTimeLaw,
    InsufficientRuinEventsError,
    RuinSweep,
    RuinTimeResult,
    SimConfig,
    conditional_ruin_time_empirical,
    extrapolate_from_sweep,
    ruin_probability_extrapolated,
    ruin_probability_mc,
    ruin_probability_refined,
    ruin_sweep,
    ruin_time_samples,
)

__version__ = "0.1.0"
