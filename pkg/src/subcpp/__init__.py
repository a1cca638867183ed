"""Subordinated compound Poisson risk processes and their ruin analysis."""

from .distributions import ClaimDistribution, Deterministic, Exponential, Gamma, Pareto
from .errors import (
    ConfigError,
    HeavyTailError,
    InfiniteActivityError,
    IntegratedTailUnavailable,
    NetProfitViolated,
    NoRootError,
    NotNormalizableError,
    NotNormalizedError,
    PreconditionError,
    SubCPPError,
)
from .ruin import (
    AdjustmentResult,
    RegularVariationSpec,
    RiskModel,
    adjustment_function,
    cl_asymptotic_ruin,
    karamata_ruin_asymptotic,
    regular_variation_of,
    rv_tail_of_z,
    solve_adjustment,
    subexp_tail_equivalence,
)
from .simulation import (
    RuinEstimate,
    mc_ruin,
    pk_closed_form,
    pk_exact_ruin,
    sample_y_direct,
    sample_y_warped,
    simulate_surplus_path,
    tail_horizon_sweep,
)
from .subordinated import BaseCPP, SubordinatedCPP
from .subordinator import CompoundPoissonJumps, GammaJumps, Subordinator

__version__ = "0.1.0"
