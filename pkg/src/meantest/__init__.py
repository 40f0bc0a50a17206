"""Split-sample mean testing for high-dimensional data.

Given i.i.d. samples on R^d, decide whether the underlying law is the
standard normal or has mean norm at least epsilon. The test statistic is
the inner product of two independent half-sample means; it needs a single
pass over the data and max(1, ceil(25 c^2 sqrt(d)/eps^2)) samples per
half for a 2/3-2/3 guarantee against arbitrary covariances.
"""

__version__ = "0.1.0"

from .baselines import BaselineKind, BaselineStatistic, sign_map, sign_mean_norm, unsplit_plugin
from .core import (
    Decision,
    StatisticAccumulator,
    TesterConfig,
    TestStatistic,
    Verdict,
    compute_statistic,
    cw_soundness_bound,
    decide,
    required_sample_size,
    run_tester,
    threshold,
)
from .distributions import (
    DistributionSpec,
    Family,
    Seed,
    covariance_frobenius,
    covariance_of,
    mean_of,
    sample,
)
from .estimator import GaussianMeanTester
from .experiments import (
    CellResult,
    ExperimentPlan,
    ExperimentResult,
    MomentAudit,
    NotAchievableError,
    calibrate_cstar,
    empirical_sample_complexity,
    moment_audit,
    run_experiment,
    small_ball_ratio,
    statistic_runtime_ns_per_sample_coord,
    wilson_interval,
)
from .validation import InsufficientDataError, check_samples

__all__ = [
    "__version__",
    "BaselineKind",
    "BaselineStatistic",
    "CellResult",
    "Decision",
    "DistributionSpec",
    "ExperimentPlan",
    "ExperimentResult",
    "Family",
    "GaussianMeanTester",
    "InsufficientDataError",
    "MomentAudit",
    "NotAchievableError",
    "Seed",
    "StatisticAccumulator",
    "TestStatistic",
    "TesterConfig",
    "Verdict",
    "calibrate_cstar",
    "check_samples",
    "compute_statistic",
    "covariance_frobenius",
    "covariance_of",
    "cw_soundness_bound",
    "decide",
    "empirical_sample_complexity",
    "mean_of",
    "moment_audit",
    "required_sample_size",
    "run_experiment",
    "run_tester",
    "sample",
    "sign_map",
    "sign_mean_norm",
    "small_ball_ratio",
    "statistic_runtime_ns_per_sample_coord",
    "threshold",
    "unsplit_plugin",
    "wilson_interval",
]
