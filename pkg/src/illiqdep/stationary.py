"""Dependence profile and portmanteau test for a constant trade probability.

The per-lag components are normalized autocovariances of the trade
indicator, centered at the sample mean.  Under independence with a constant
trade probability the scaled components are asymptotically standard normal
and the portmanteau statistic is chi-square.
"""

from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .distributions import chi2_cdf, chi2_quantile, gaussian_quantile
from .errors import DegenerateSeries, InvalidInput, InvalidLag
from .series import BinarySeries


class Variant(str, enum.Enum):
    """Which probability model backs a profile or test."""

    STATIONARY = "stationary"
    ORACLE_ADAPTIVE = "oracle_adaptive"
    FEASIBLE_ADAPTIVE = "feasible_adaptive"


@dataclass
class DependenceProfile:
    """Per-lag normalized dependence components with their plot bounds.

    ``scale`` is the multiplier that maps a component onto an asymptotically
    standard normal scale: sqrt(n / omega).  The variance correction
    ``omega`` is 1 for the stationary variant.
    """

    lags: np.ndarray
    components: np.ndarray
    scale: float
    variant: Variant
    n: int
    omega: float = 1.0

    def __post_init__(self):
        self.lags = np.asarray(self.lags, dtype=int)
        self.components = np.asarray(self.components, dtype=float)
        if self.lags.shape != self.components.shape:
            raise InvalidInput("lags and components must have matching lengths")
        if not (self.omega > 0 and self.scale > 0):
            raise InvalidInput("omega and scale must be positive")

    @property
    def m(self) -> int:
        return int(self.lags.size)

    def half_width(self, alpha: float = 0.05) -> float:
        """Symmetric confidence half-width for the components at level alpha."""
        return gaussian_quantile(1.0 - alpha / 2.0) / self.scale

    def exceedances(self, alpha: float = 0.05) -> np.ndarray:
        """Boolean mask of components outside the +-half_width band."""
        return np.abs(self.components) > self.half_width(alpha)

    def to_dict(self, alpha: float = 0.05) -> dict:
        hw = self.half_width(alpha)
        return {
            "variant": self.variant.value,
            "n": self.n,
            "omega": self.omega,
            "scale": self.scale,
            "bounds_alpha": alpha,
            "lower_bound": -hw,
            "upper_bound": hw,
            "lags": [int(h) for h in self.lags],
            "components": [float(c) for c in self.components],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DependenceProfile":
        return cls(
            lags=np.asarray(data["lags"], dtype=int),
            components=np.asarray(data["components"], dtype=float),
            scale=float(data["scale"]),
            variant=Variant(data["variant"]),
            n=int(data["n"]),
            omega=float(data["omega"]),
        )

    def to_csv_text(self, alpha: float = 0.05) -> str:
        hw = self.half_width(alpha)
        out = io.StringIO()
        out.write("lag,component,lower_bound,upper_bound\n")
        for h, c in zip(self.lags, self.components):
            out.write(f"{int(h)},{float(c):.12g},{-hw:.12g},{hw:.12g}\n")
        return out.getvalue()


@dataclass
class TestReport:
    """Outcome of a portmanteau decision at level alpha."""

    statistic: float
    df: int
    alpha: float
    critical_value: float
    p_value: float
    reject: bool
    variant: Variant
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "statistic": self.statistic,
            "df": self.df,
            "alpha": self.alpha,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "warnings": list(self.warnings),
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def build_chi2_report(statistic: float, m: int, alpha: float, variant: Variant,
                      warnings: list[str] | None = None) -> TestReport:
    """Assemble a TestReport for a chi-square(m) reference distribution."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")
    critical = chi2_quantile(m, 1.0 - alpha)
    p_value = 1.0 - chi2_cdf(statistic, m)
    return TestReport(
        statistic=float(statistic),
        df=int(m),
        alpha=float(alpha),
        critical_value=float(critical),
        p_value=float(p_value),
        reject=bool(statistic > critical),
        variant=variant,
        warnings=list(warnings or []),
    )


def _check_max_lag(m: int, n: int) -> None:
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise InvalidLag(f"max lag must be a positive integer, got {m!r}")
    if m >= n:
        raise InvalidLag(f"max lag {m} must be smaller than the sample size {n}")


def gamma_hat(series: BinarySeries, h: int) -> float:
    """Sample autocovariance of the indicator at lag h, centered, 1/n scaled."""
    n = series.n
    if not isinstance(h, (int, np.integer)) or isinstance(h, bool) or h < 0 or h >= n:
        raise InvalidLag(f"lag must satisfy 0 <= h < {n}, got {h!r}")
    c = series.as_float()
    c -= c.mean()
    return float(np.dot(c[h:], c[: n - h]) / n)


def dependence_profile_stationary(series: BinarySeries, m: int) -> DependenceProfile:
    """Components gamma(h)/gamma(0) for h = 1..m, with sqrt(n) bound scale."""
    n = series.n
    _check_max_lag(m, n)
    c = series.as_float()
    c -= c.mean()
    g0 = np.dot(c, c) / n
    if g0 <= 0:
        raise DegenerateSeries("constant series has no dependence structure")
    comps = np.array([np.dot(c[h:], c[: n - h]) / n for h in range(1, m + 1)]) / g0
    return DependenceProfile(
        lags=np.arange(1, m + 1),
        components=comps,
        scale=float(np.sqrt(n)),
        variant=Variant.STATIONARY,
        n=n,
        omega=1.0,
    )


def portmanteau_stationary(series: BinarySeries, m: int, alpha: float = 0.05) -> TestReport:
    """Portmanteau independence test: n * sum of squared components vs chi2(m)."""
    profile = dependence_profile_stationary(series, m)
    statistic = series.n * float(np.sum(profile.components ** 2))
    return build_chi2_report(statistic, m, alpha, Variant.STATIONARY)
