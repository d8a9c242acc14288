"""Dependence statistics that adapt to a time-varying trade probability.

Two flavors share the same arithmetic: the oracle one centers the indicator
at known per-day probabilities (simulation ground truth), the feasible one
at the leave-one-out kernel estimate.  Both divide the portmanteau statistic
by a heteroskedasticity-consistent variance ratio so the chi-square
reference stays valid when the probability drifts.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, InvalidInput, InvalidLag
from .kernel import CLIP_EPS, ProbabilityEstimate
from .series import BinarySeries
from .stationary import (
    DependenceProfile,
    TestReport,
    Variant,
    _check_max_lag,
    build_chi2_report,
)


@dataclass
class OracleProbabilities:
    """Known per-day trade probabilities, strictly inside (0, 1)."""

    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 1 or self.p.size == 0:
            raise InvalidInput("probabilities must form a non-empty 1-d sequence")
        if np.any(self.p <= 0.0) or np.any(self.p >= 1.0):
            raise InvalidInput("probabilities must lie strictly inside (0, 1)")


@dataclass
class CusumTrajectory:
    """Partial-sum path of centered lag-h products over the sample fraction u.

    Diagnostic only: the running statistic localizes where dependence builds
    up, but its supremum has a non-standard limit law, so no test decision is
    attached.
    """

    h: int
    u_grid: np.ndarray
    values: np.ndarray
    sup_abs: float

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write("u,value\n")
        for u, v in zip(self.u_grid, self.values):
            out.write(f"{u:.12g},{v:.12g}\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "h": int(self.h),
            "sup_abs": float(self.sup_abs),
            "u_grid": [float(u) for u in self.u_grid],
            "values": [float(v) for v in self.values],
        }


def _prob_vector(p, n: int) -> np.ndarray:
    if isinstance(p, OracleProbabilities):
        values = p.p
    elif isinstance(p, ProbabilityEstimate):
        values = p.p_hat
    else:
        values = np.asarray(p, dtype=float)
    if values.shape != (n,):
        raise InvalidInput(
            f"probability vector of length {values.shape} does not match series length {n}"
        )
    return values


def _check_lag(h: int, n: int) -> None:
    if not isinstance(h, (int, np.integer)) or isinstance(h, bool) or h < 0 or h >= n:
        raise InvalidLag(f"lag must satisfy 0 <= h < {n}, got {h!r}")


def gamma_tilde(series: BinarySeries, p, h: int, u: float = 1.0) -> float:
    """Centered lag-h cross-product sum up to the sample fraction u.

    Averaging uses 1/(n - h) for h >= 1 and 1/n for h = 0, so the lag-0
    value is exactly the mean squared residual.
    """
    n = series.n
    _check_lag(h, n)
    if not 0.0 < u <= 1.0:
        raise InvalidInput(f"sample fraction u must lie in (0, 1], got {u}")
    z = series.as_float() - _prob_vector(p, n)
    end = int(np.floor(n * u))  # 1-based index of the last included day
    if end < 1 + h:
        return 0.0
    denom = n if h == 0 else n - h
    return float(np.dot(z[h:end], z[: end - h]) / denom)


def omega_hat(series: BinarySeries, p) -> float:
    """Variance-ratio correction: mean of squared adjacent residual products
    over the squared mean residual variance."""
    n = series.n
    z = series.as_float() - _prob_vector(p, n)
    z2 = z ** 2
    denominator = (float(np.dot(z, z)) / n) ** 2
    if denominator <= 0:
        raise DegenerateSeries("zero residual variance; variance ratio undefined")
    numerator = float(np.dot(z2[1:], z2[:-1])) / n
    return numerator / denominator


def _adaptive_profile(series: BinarySeries, pvals: np.ndarray, m: int,
                      variant: Variant) -> DependenceProfile:
    n = series.n
    _check_max_lag(m, n)
    z = series.as_float() - pvals
    g0 = float(np.dot(z, z)) / n
    if g0 <= 0:
        raise DegenerateSeries("zero residual variance; profile undefined")
    comps = np.array([np.dot(z[h:], z[:-h]) / (n - h) for h in range(1, m + 1)]) / g0
    z2 = z ** 2
    omega = (float(np.dot(z2[1:], z2[:-1])) / n) / g0 ** 2
    return DependenceProfile(
        lags=np.arange(1, m + 1),
        components=comps,
        scale=float(np.sqrt(n / omega)),
        variant=variant,
        n=n,
        omega=float(omega),
    )


def profile_oracle(series: BinarySeries, p: OracleProbabilities, m: int) -> DependenceProfile:
    """Adaptive dependence profile with known probabilities."""
    pvals = _prob_vector(p, series.n)
    return _adaptive_profile(series, pvals, m, Variant.ORACLE_ADAPTIVE)


def profile_feasible(series: BinarySeries, estimate: ProbabilityEstimate,
                     m: int) -> DependenceProfile:
    """Adaptive dependence profile with the kernel-estimated probabilities."""
    if not isinstance(estimate, ProbabilityEstimate):
        raise InvalidInput("profile_feasible expects a ProbabilityEstimate")
    bits = series.bits
    if np.all(bits == bits[0]):
        # A constant series leaves only clipping artifacts in the residuals.
        raise DegenerateSeries("constant series has no dependence structure")
    pvals = _prob_vector(estimate, series.n)
    return _adaptive_profile(series, pvals, m, Variant.FEASIBLE_ADAPTIVE)


def _portmanteau(profile: DependenceProfile, alpha: float,
                 warnings: list[str] | None = None) -> TestReport:
    statistic = profile.n / profile.omega * float(np.sum(profile.components ** 2))
    return build_chi2_report(statistic, profile.m, alpha, profile.variant, warnings)


def portmanteau_oracle(series: BinarySeries, p: OracleProbabilities, m: int,
                       alpha: float = 0.05) -> TestReport:
    """Variance-corrected portmanteau test with known probabilities."""
    return _portmanteau(profile_oracle(series, p, m), alpha)


def portmanteau_feasible(series: BinarySeries, estimate: ProbabilityEstimate, m: int,
                         alpha: float = 0.05) -> TestReport:
    """Variance-corrected portmanteau test with estimated probabilities."""
    profile = profile_feasible(series, estimate, m)
    warnings = []
    if estimate.clip_count:
        warnings.append(
            f"{estimate.clip_count} smoothed probabilities clipped to "
            f"[{CLIP_EPS}, {1 - CLIP_EPS}]"
        )
    return _portmanteau(profile, alpha, warnings)


def cusum_trajectory(series: BinarySeries, p, h: int, grid_size: int) -> CusumTrajectory:
    """Evaluate the lag-h partial-sum path on an even u-grid.

    The reported supremum is exact: it scans every cut point of the step
    function, not just the grid.
    """
    n = series.n
    _check_lag(h, n)
    if not isinstance(grid_size, (int, np.integer)) or isinstance(grid_size, bool) or grid_size < 2:
        raise InvalidInput(f"grid_size must be an integer >= 2, got {grid_size!r}")
    z = series.as_float() - _prob_vector(p, n)
    denom = n if h == 0 else n - h
    products = z[h:] * z[: n - h] if h > 0 else z * z
    partial = np.concatenate(([0.0], np.cumsum(products))) / denom
    u_grid = np.arange(1, grid_size + 1, dtype=float) / grid_size
    cut = np.clip(np.floor(n * u_grid).astype(int) - h, 0, partial.size - 1)
    values = partial[cut]
    return CusumTrajectory(
        h=int(h),
        u_grid=u_grid,
        values=values,
        sup_abs=float(np.max(np.abs(partial))),
    )
