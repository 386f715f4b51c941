"""Survival analysis of killed random walks in random i.i.d. environments.

A walker on the integer line steps right, holds, or steps left with
site-specific probabilities drawn i.i.d. from a discrete site law; every
holding step kills it with probability r.  This package computes

- exact quenched survival curves and interval exit-time tails by dynamic
  programming (`quenched_survival_dp`, `hitting_time_tail`), validated by
  Monte Carlo walkers and an exhaustive path oracle;
- the potential landscape of an environment, its barrier heights, and
  holding-safe valley detection (`potential`, `barrier_heights`,
  `detect_valley`);
- the large-deviation machinery that prices deep valleys — conditional
  log-MGFs, one-sided Legendre transforms, valley cost exponents and
  their width-optimized closed form (`log_mgf`, `legendre`,
  `valley_cost`, `optimal_valley_cost`);
- tail statistics of the site law, regime classification (polynomial /
  intermediate / stretched-exponential), and the corresponding decay
  predictions (`tail_quantities`, `limit_quantities`, `predicted_decay`);
- annealed survival curves averaged over environments, regime-coordinate
  exponent fits, and prediction-vs-fit verdicts (`annealed_survival`,
  `fit_exponent`, `compare_prediction`).

All randomness flows through counter-based streams: every sampled value
is a pure function of (seed, coordinates), so results are reproducible
bit for bit regardless of worker count or evaluation order.
"""

from .annealed import (
    FitResult,
    SurvivalCurve,
    annealed_survival,
    annealed_survival_exact,
    compare_prediction,
    fit_exponent,
    read_curve_csv,
    srw_exit_check,
    write_curve_csv,
)
from .environment import (
    Environment,
    enumerate_environments,
    format_environment,
    parse_environment,
    sample_window,
    valley_environment,
)
from .errors import (
    DegenerateCurve,
    EllipticityViolation,
    EmptyConditioning,
    HorizonTooLarge,
    InsufficientData,
    InvalidSequence,
    MalformedLaw,
    NontrivialityViolation,
    NumericalError,
    OutOfWindow,
    RwreError,
    UnclassifiedRegime,
    ValidationError,
    WindowTooSmall,
)
from .law import (
    Atom,
    LimitQuantities,
    Regime,
    SiteLaw,
    TailQuantities,
    construct_law,
    ellipticity_floor,
    format_law,
    limit_quantities,
    parse_construct_line,
    parse_law,
    tail_explog,
    tail_exppow,
    tail_family,
    tail_geo,
    tail_pow,
    tail_quantities,
    validate_ue,
)
from .potential import (
    BarrierHeights,
    ValleyDescriptor,
    barrier_heights,
    barrier_heights_brute,
    detect_valley,
    potential,
    potential_values,
    scan_valleys,
)
from .rates import (
    DecayPrediction,
    GridMinimum,
    IntermediateExponents,
    TiltRoot,
    intermediate_exponents,
    legendre,
    log_mgf,
    optimal_valley_cost,
    predicted_decay,
    rate_report,
    tilt_root,
    valley_cost,
    valley_cost_minimum,
)
from .streams import derive_seed, derive_seeds, stream_key, uniform_at, uniform_for_seeds
from .walk import (
    SURVIVED,
    KillingWalkSpec,
    MCEstimate,
    SurvivalBracket,
    collapse_holding,
    enumerate_paths,
    hitting_time_tail,
    mc_survival,
    mc_walk,
    median_exit_time,
    quenched_survival_dp,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "RwreError", "ValidationError", "NumericalError",
    "MalformedLaw", "EllipticityViolation", "InvalidSequence",
    "EmptyConditioning", "NontrivialityViolation", "OutOfWindow",
    "WindowTooSmall", "HorizonTooLarge", "InsufficientData",
    "DegenerateCurve", "UnclassifiedRegime",
    # streams
    "stream_key", "uniform_at", "derive_seed", "derive_seeds",
    "uniform_for_seeds",
    # law
    "Atom", "SiteLaw", "TailQuantities", "Regime", "LimitQuantities",
    "validate_ue", "ellipticity_floor", "tail_quantities",
    "limit_quantities", "construct_law", "tail_pow", "tail_geo",
    "tail_explog", "tail_exppow", "tail_family", "parse_law",
    "format_law", "parse_construct_line",
    # environment
    "Environment", "sample_window", "enumerate_environments",
    "valley_environment", "parse_environment", "format_environment",
    # potential
    "potential", "potential_values", "BarrierHeights", "barrier_heights",
    "barrier_heights_brute", "ValleyDescriptor", "detect_valley",
    "scan_valleys",
    # rates
    "log_mgf", "legendre", "valley_cost", "TiltRoot", "tilt_root",
    "optimal_valley_cost", "GridMinimum", "valley_cost_minimum",
    "IntermediateExponents", "intermediate_exponents", "DecayPrediction",
    "predicted_decay", "rate_report",
    # walk
    "KillingWalkSpec", "SurvivalBracket", "quenched_survival_dp",
    "hitting_time_tail", "median_exit_time", "collapse_holding",
    "SURVIVED", "MCEstimate", "mc_walk", "mc_survival", "enumerate_paths",
    # annealed
    "SurvivalCurve", "annealed_survival", "annealed_survival_exact",
    "FitResult", "fit_exponent", "compare_prediction", "srw_exit_check",
    "write_curve_csv", "read_curve_csv",
]
