"""Serial-dependence- and persistence-robust significance tests for
predictive regressions, built on randomized split-sample Wald statistics,
plus the benchmark data-generating processes and a reproducible Monte Carlo
harness."""

from ._version import __version__
from .dgp import DgpSpec, SimulatedSample, cholesky_lower, preset, simulate
from .distributions import (
    ChiSquareParams,
    chisq_cdf,
    chisq_quantile,
    chisq_sf,
    normal_cdf,
    normal_sf,
)
from .errors import (
    ColumnMissing,
    DegenerateVariance,
    EmptyReport,
    InvalidDelta,
    InvalidGrid,
    InvalidKurtosis,
    InvalidLength,
    InvalidP0,
    InvalidProbability,
    LengthMismatch,
    NonConvergence,
    NonFiniteInput,
    NotPositiveDefinite,
    NumericOverflow,
    PlanParseError,
    SingularDesign,
    SingularRestriction,
    SplitwaldError,
    TooFewRows,
    UnknownPreset,
)
from .experiments import (
    CellResult,
    ExperimentPlan,
    ExperimentReport,
    PresetRef,
    export_report,
    load_plan,
    plan_from_dict,
    run_plan,
)
from .randomization import (
    SeedSpec,
    WeightSequence,
    check_p0,
    draw_bernoulli_weights,
    population_weights,
)
from .regression import (
    RegressionData,
    RegressionFit,
    Restriction,
    fit_restricted,
    fit_unrestricted,
)
from .teststats import (
    DrawStat,
    StatisticConfig,
    TestMode,
    TestOutcome,
    compute_d_sequence,
    power_curve_empirical,
    run_test,
    single_shot,
)
from .theory import (
    LocalAlternative,
    asymptotic_power,
    elasticity,
    f_p0,
    g_p0,
    mn_rule,
    ncp_ar1,
    ncp_general,
    weight_variance,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
