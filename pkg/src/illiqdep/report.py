"""Assembly of the full analysis report for one return series.

The report always contains both the stationary and the feasible-adaptive
profile/test pair, so a drifting trade probability can be recognized by
contrasting the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .adaptive import CusumTrajectory, cusum_trajectory, portmanteau_feasible, profile_feasible
from .errors import InvalidInput
from .kernel import KernelSpec, ProbabilityEstimate, estimate_probability
from .series import BinarySeries, ReturnSeries, binarize, sample_mean
from .stationary import (
    DependenceProfile,
    TestReport,
    dependence_profile_stationary,
    portmanteau_stationary,
)

SCHEMA_VERSION = 1


@dataclass
class AnalysisReport:
    """Everything the analyze command knows about one series."""

    source_id: str
    n: int
    a_bar: float
    threshold: float
    alpha: float
    probability: ProbabilityEstimate
    stationary_profile: DependenceProfile
    stationary_test: TestReport
    feasible_profile: DependenceProfile
    feasible_test: TestReport
    cusum: list[CusumTrajectory] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "source_id": self.source_id,
            "n": self.n,
            "a_bar": self.a_bar,
            "threshold": self.threshold,
            "alpha": self.alpha,
            "probability": self.probability.summary_dict(),
            "stationary": {
                "profile": self.stationary_profile.to_dict(self.alpha),
                "test": self.stationary_test.to_dict(),
            },
            "feasible_adaptive": {
                "profile": self.feasible_profile.to_dict(self.alpha),
                "test": self.feasible_test.to_dict(),
            },
            "cusum": [c.to_dict() for c in self.cusum],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def build_analysis(returns: ReturnSeries, threshold: float = 0.0, max_lag: int = 60,
                   test_lag: int = 5, alpha: float = 0.05,
                   kernel_spec: KernelSpec | None = None,
                   cusum_lags: tuple[int, ...] = (),
                   cusum_grid: int = 200) -> AnalysisReport:
    """Run the full pipeline: binarize, smooth, profile and test both ways.

    ``max_lag`` sets the profile depth used for the dependence plots;
    ``test_lag`` the (small) lag count of the portmanteau decisions.
    """
    series = binarize(returns, threshold)
    return build_analysis_from_series(series, max_lag=max_lag, test_lag=test_lag,
                                      alpha=alpha, kernel_spec=kernel_spec,
                                      cusum_lags=cusum_lags, cusum_grid=cusum_grid)


def build_analysis_from_series(series: BinarySeries, max_lag: int = 60, test_lag: int = 5,
                               alpha: float = 0.05, kernel_spec: KernelSpec | None = None,
                               cusum_lags: tuple[int, ...] = (),
                               cusum_grid: int = 200) -> AnalysisReport:
    n = series.n
    if max_lag >= n:
        raise InvalidInput(f"max lag {max_lag} must be smaller than the sample size {n}")
    if test_lag > max_lag:
        raise InvalidInput(f"test lag {test_lag} cannot exceed the profile depth {max_lag}")
    if kernel_spec is None:
        kernel_spec = KernelSpec.rate_default(n)
    estimate = estimate_probability(series, kernel_spec)

    stationary_profile = dependence_profile_stationary(series, max_lag)
    stationary_test = portmanteau_stationary(series, test_lag, alpha)
    feasible_profile = profile_feasible(series, estimate, max_lag)
    feasible_test = portmanteau_feasible(series, estimate, test_lag, alpha)

    cusum = [cusum_trajectory(series, estimate, h, cusum_grid) for h in cusum_lags]

    return AnalysisReport(
        source_id=series.source_id,
        n=n,
        a_bar=sample_mean(series),
        threshold=series.threshold,
        alpha=alpha,
        probability=estimate,
        stationary_profile=stationary_profile,
        stationary_test=stationary_test,
        feasible_profile=feasible_profile,
        feasible_test=feasible_test,
        cusum=cusum,
    )
