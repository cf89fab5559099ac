"""Ancillary-statistic test modifications: exact finite-model certification
of most-powerful tests, modified mean/median/symmetry statistics, a seeded
Monte Carlo power engine, and a regression residual analysis pipeline."""

__version__ = "0.1.0"

from .characterization import (
    DiscreteModel,
    FiniteStatistic,
    best_level_power,
    check_prop_1_1,
    check_prop_2_1,
    check_prop_2_2,
    check_prop_2_3,
    check_prop_2_4,
    check_prop_2_5,
    check_prop_3_1,
    likelihood_ratio,
    verify_propositions,
)
from .designs import (
    DesignId,
    DesignParams,
    RandomStream,
    UnknownDesignError,
    design_params,
    list_designs,
    sample_design,
    sample_design_matrix,
)
from .empirical import (
    SampleMoments,
    bandwidth_nrd0,
    kde_at,
    quantile_type7,
    sample_median,
    sample_moments,
)
from .power import (
    PowerEstimate,
    StudyPlan,
    TableReport,
    TableRow,
    estimate_power,
    null_quantile,
    pow_indicators,
    render_table,
    reproduce_table,
    statistic_sample,
    toy_power_curve,
    toy_three_obs_powers,
)
from .regression import (
    MedianAnalysis,
    RegressionFit,
    load_xy_csv,
    make_fixture,
    ols_fit,
    resample_power_study,
    residual_median_analysis,
    residuals,
)
from .stattests import (
    DegenerateStatistic,
    TestOutcome,
    bootstrap_t_test,
    median_test_TN,
    median_test_To,
    modified_mean_test,
    symmetry_test,
    t_test_known_sigma,
    thomas_transform,
    two_sided,
    wilcoxon_signed_rank,
)

__all__ = [
    "DegenerateStatistic",
    "DesignId",
    "DesignParams",
    "DiscreteModel",
    "FiniteStatistic",
    "MedianAnalysis",
    "PowerEstimate",
    "RandomStream",
    "RegressionFit",
    "SampleMoments",
    "StudyPlan",
    "TableReport",
    "TableRow",
    "TestOutcome",
    "UnknownDesignError",
    "bandwidth_nrd0",
    "best_level_power",
    "bootstrap_t_test",
    "check_prop_1_1",
    "check_prop_2_1",
    "check_prop_2_2",
    "check_prop_2_3",
    "check_prop_2_4",
    "check_prop_2_5",
    "check_prop_3_1",
    "design_params",
    "estimate_power",
    "kde_at",
    "likelihood_ratio",
    "list_designs",
    "load_xy_csv",
    "make_fixture",
    "median_test_TN",
    "median_test_To",
    "modified_mean_test",
    "null_quantile",
    "ols_fit",
    "pow_indicators",
    "quantile_type7",
    "render_table",
    "reproduce_table",
    "resample_power_study",
    "residual_median_analysis",
    "residuals",
    "sample_design",
    "sample_design_matrix",
    "sample_median",
    "sample_moments",
    "statistic_sample",
    "symmetry_test",
    "t_test_known_sigma",
    "thomas_transform",
    "toy_power_curve",
    "toy_three_obs_powers",
    "two_sided",
    "verify_propositions",
    "wilcoxon_signed_rank",
]
