"""Serial-dependence diagnostics for daily trade/no-trade sequences.

The package measures how strongly the event "this stock traded today"
depends on its own past, both under a constant trade probability and,
via a heteroskedasticity-consistent correction, under a trade probability
that drifts over the sample.
"""

from .adaptive import (
    CusumTrajectory,
    OracleProbabilities,
    cusum_trajectory,
    gamma_tilde,
    omega_hat,
    portmanteau_feasible,
    portmanteau_oracle,
    profile_feasible,
    profile_oracle,
)
from .distributions import chi2_cdf, chi2_quantile, gaussian_cdf, gaussian_quantile
from .errors import (
    BandwidthTooSmall,
    DegenerateSeries,
    IlliqdepError,
    InvalidInput,
    InvalidLag,
    InvalidSpec,
    SampleTooSmall,
)
from .kernel import (
    CLIP_EPS,
    DEFAULT_BANDWIDTH_SCALE,
    BandwidthRule,
    KernelFamily,
    KernelSpec,
    ProbabilityEstimate,
    default_bandwidth,
    estimate_probability,
    kernel_weights,
)
from .montecarlo import (
    Dgp,
    DgpKind,
    PathKind,
    ProbabilityPath,
    SimulationResult,
    SimulationSpec,
    TestKind,
    case2_path,
    format_results_table,
    replication_rng,
    run_experiment,
    simulate_series,
)
from .report import AnalysisReport, build_analysis, build_analysis_from_series
from .series import BinarySeries, ReturnSeries, binarize, read_returns_csv, sample_mean
from .stationary import (
    DependenceProfile,
    TestReport,
    Variant,
    dependence_profile_stationary,
    gamma_hat,
    portmanteau_stationary,
)

__version__ = "0.1.0"
