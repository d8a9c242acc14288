"""Simulation DGPs and the experiment runner for size/power studies.

Replication r of a run draws its variates from a counter-based generator
keyed by (seed, r), so serial and parallel executions produce identical
tallies and a spec re-run is reproducible bit for bit.
"""

from __future__ import annotations

import enum
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adaptive import OracleProbabilities, profile_feasible, profile_oracle
from .distributions import chi2_quantile
from .errors import InvalidInput, InvalidSpec
from .kernel import DEFAULT_BANDWIDTH_SCALE, KernelFamily, KernelSpec, estimate_probability
from .series import BinarySeries
from .stationary import Variant, dependence_profile_stationary


class PathKind(str, enum.Enum):
    CONSTANT = "constant"
    PIECEWISE_LINEAR = "piecewise_linear"
    CUSTOM = "custom"


@dataclass
class ProbabilityPath:
    """Deterministic trade-probability path on (0, 1], valued in (0, 1).

    Piecewise-linear and tabulated paths interpolate linearly between their
    nodes and extend the edge values as constants, which keeps every path
    piecewise Lipschitz by construction.
    """

    kind: PathKind
    level: float | None = None
    knots: list[tuple[float, float]] | None = None
    grid_u: list[float] | None = None
    grid_values: list[float] | None = None

    def __post_init__(self):
        self.kind = PathKind(self.kind)
        if self.kind == PathKind.CONSTANT:
            if self.level is None or not 0.0 < self.level < 1.0:
                raise InvalidInput(f"constant level must lie in (0, 1), got {self.level}")
        elif self.kind == PathKind.PIECEWISE_LINEAR:
            if not self.knots or len(self.knots) < 2:
                raise InvalidInput("piecewise-linear path needs at least 2 knots")
            us = [u for u, _ in self.knots]
            vs = [v for _, v in self.knots]
            if any(b <= a for a, b in zip(us, us[1:])):
                raise InvalidInput("knot positions must be strictly increasing")
            if any(not 0.0 < v < 1.0 for v in vs):
                raise InvalidInput("knot values must lie strictly inside (0, 1)")
            self.knots = [(float(u), float(v)) for u, v in self.knots]
        elif self.kind == PathKind.CUSTOM:
            if not self.grid_u or not self.grid_values or len(self.grid_u) != len(self.grid_values):
                raise InvalidInput("custom path needs matching u and value grids")
            if len(self.grid_u) < 2:
                raise InvalidInput("custom path needs at least 2 grid points")
            if any(b <= a for a, b in zip(self.grid_u, self.grid_u[1:])):
                raise InvalidInput("grid positions must be strictly increasing")
            if any(not 0.0 < v < 1.0 for v in self.grid_values):
                raise InvalidInput("grid values must lie strictly inside (0, 1)")
            self.grid_u = [float(u) for u in self.grid_u]
            self.grid_values = [float(v) for v in self.grid_values]

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == PathKind.CONSTANT:
            return np.full(u.shape, self.level)
        if self.kind == PathKind.PIECEWISE_LINEAR:
            us = [k[0] for k in self.knots]
            vs = [k[1] for k in self.knots]
            return np.interp(u, us, vs)
        return np.interp(u, self.grid_u, self.grid_values)

    @classmethod
    def constant(cls, level: float) -> "ProbabilityPath":
        return cls(kind=PathKind.CONSTANT, level=float(level))

    @classmethod
    def piecewise_linear(cls, knots) -> "ProbabilityPath":
        return cls(kind=PathKind.PIECEWISE_LINEAR, knots=[(float(u), float(v)) for u, v in knots])

    @classmethod
    def custom(cls, grid_u, grid_values) -> "ProbabilityPath":
        return cls(kind=PathKind.CUSTOM, grid_u=list(grid_u), grid_values=list(grid_values))

    def to_dict(self) -> dict:
        if self.kind == PathKind.CONSTANT:
            return {"kind": self.kind.value, "level": self.level}
        if self.kind == PathKind.PIECEWISE_LINEAR:
            return {"kind": self.kind.value, "knots": [list(k) for k in self.knots]}
        return {"kind": self.kind.value, "u": self.grid_u, "values": self.grid_values}

    @classmethod
    def from_dict(cls, data: dict) -> "ProbabilityPath":
        kind = data.get("kind")
        if kind == "case2":
            return case2_path()
        if kind == PathKind.CONSTANT.value:
            return cls.constant(data["level"])
        if kind == PathKind.PIECEWISE_LINEAR.value:
            return cls.piecewise_linear(data["knots"])
        if kind == PathKind.CUSTOM.value:
            return cls.custom(data["u"], data["values"])
        raise InvalidInput(f"unknown path kind {kind!r}")


def case2_path() -> ProbabilityPath:
    """Continuous ramp path: 0.4 up to u=0.4, linear to 0.8 at u=0.6, then flat."""
    return ProbabilityPath.piecewise_linear([(0.0, 0.4), (0.4, 0.4), (0.6, 0.8), (1.0, 0.8)])


class DgpKind(str, enum.Enum):
    INDEP_CONSTANT = "indep_constant"
    INDEP_PATH = "indep_path"
    PRODUCT_ONE_DEPENDENT = "product_one_dependent"


@dataclass
class Dgp:
    """Data-generating process for the indicator sequence."""

    kind: DgpKind
    p: float | None = None
    path: ProbabilityPath | None = None
    p_dot: float | None = None

    def __post_init__(self):
        self.kind = DgpKind(self.kind)
        if self.kind == DgpKind.INDEP_CONSTANT:
            if self.p is None or not 0.0 < self.p < 1.0:
                raise InvalidInput(f"constant probability must lie in (0, 1), got {self.p}")
        elif self.kind == DgpKind.INDEP_PATH:
            if self.path is None:
                raise InvalidInput("path DGP needs a probability path")
        elif self.kind == DgpKind.PRODUCT_ONE_DEPENDENT:
            if self.p_dot is None or not 0.0 < self.p_dot < 1.0:
                raise InvalidInput(f"factor probability must lie in (0, 1), got {self.p_dot}")

    @classmethod
    def indep_constant(cls, p: float) -> "Dgp":
        return cls(kind=DgpKind.INDEP_CONSTANT, p=float(p))

    @classmethod
    def indep_path(cls, path: ProbabilityPath) -> "Dgp":
        return cls(kind=DgpKind.INDEP_PATH, path=path)

    @classmethod
    def product_one_dependent(cls, p_dot: float) -> "Dgp":
        return cls(kind=DgpKind.PRODUCT_ONE_DEPENDENT, p_dot=float(p_dot))

    def true_probabilities(self, n: int) -> np.ndarray:
        """Marginal P(trade) per day; the product DGP is constant at p_dot^2."""
        if self.kind == DgpKind.INDEP_CONSTANT:
            return np.full(n, self.p)
        if self.kind == DgpKind.INDEP_PATH:
            return self.path(np.arange(1, n + 1) / n)
        return np.full(n, self.p_dot ** 2)

    def draw_bits(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == DgpKind.INDEP_CONSTANT:
            return (rng.random(n) < self.p).astype(np.int8)
        if self.kind == DgpKind.INDEP_PATH:
            g = self.path(np.arange(1, n + 1) / n)
            return (rng.random(n) < g).astype(np.int8)
        factors = rng.random(n + 1) < self.p_dot
        return (factors[1:] & factors[:-1]).astype(np.int8)

    def to_dict(self) -> dict:
        if self.kind == DgpKind.INDEP_CONSTANT:
            return {"kind": self.kind.value, "p": self.p}
        if self.kind == DgpKind.INDEP_PATH:
            return {"kind": self.kind.value, "path": self.path.to_dict()}
        return {"kind": self.kind.value, "p_dot": self.p_dot}

    @classmethod
    def from_dict(cls, data: dict) -> "Dgp":
        kind = data.get("kind")
        if kind == DgpKind.INDEP_CONSTANT.value:
            return cls.indep_constant(data["p"])
        if kind == DgpKind.INDEP_PATH.value:
            return cls.indep_path(ProbabilityPath.from_dict(data["path"]))
        if kind == DgpKind.PRODUCT_ONE_DEPENDENT.value:
            return cls.product_one_dependent(data["p_dot"])
        raise InvalidInput(f"unknown DGP kind {kind!r}")


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Counter-based substream for one replication, derived from (seed, r)."""
    key = np.array([seed, replication], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def simulate_series(dgp: Dgp, n: int, rng: np.random.Generator) -> BinarySeries:
    """Draw one indicator series of length n from the DGP."""
    if n < 2:
        raise InvalidInput(f"series length must be at least 2, got {n}")
    return BinarySeries(bits=dgp.draw_bits(n, rng), threshold=0.0,
                        source_id=dgp.kind.value)


class TestKind(str, enum.Enum):
    Q = "Q"
    Q_ORACLE = "QOracle"
    Q_FEASIBLE = "QFeasible"


_TEST_VARIANT = {
    TestKind.Q: Variant.STATIONARY,
    TestKind.Q_ORACLE: Variant.ORACLE_ADAPTIVE,
    TestKind.Q_FEASIBLE: Variant.FEASIBLE_ADAPTIVE,
}

_VARIANT_LABEL = {
    Variant.STATIONARY: "stationary",
    Variant.ORACLE_ADAPTIVE: "oracle-adaptive",
    Variant.FEASIBLE_ADAPTIVE: "feasible-adaptive",
}


@dataclass
class SimulationSpec:
    """Declarative description of one simulation run."""

    dgp: Dgp
    n: int
    replications: int
    m: int = 5
    alpha: float = 0.05
    seed: int = 0
    tests: tuple[TestKind, ...] = (TestKind.Q, TestKind.Q_FEASIBLE)
    lag_report: tuple[int, ...] = ()
    kernel: KernelFamily = KernelFamily.EPANECHNIKOV
    bandwidth_c: float = DEFAULT_BANDWIDTH_SCALE

    def __post_init__(self):
        self.tests = tuple(TestKind(t) for t in self.tests)
        self.lag_report = tuple(int(h) for h in self.lag_report)
        self.kernel = KernelFamily(self.kernel)

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidSpec("n", f"sample size must be an integer >= 2, got {self.n!r}")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise InvalidSpec("replications", f"must be a positive integer, got {self.replications!r}")
        if not isinstance(self.m, int) or not 1 <= self.m < self.n:
            raise InvalidSpec("m", f"max test lag must satisfy 1 <= m < n, got {self.m!r}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpec("alpha", f"must lie in (0, 1), got {self.alpha!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InvalidSpec("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.tests:
            raise InvalidSpec("tests", "at least one test must be requested")
        if len(set(self.tests)) != len(self.tests):
            raise InvalidSpec("tests", "duplicate test requested")
        for h in self.lag_report:
            if not 1 <= h < self.n:
                raise InvalidSpec("lag_report", f"lag {h} must satisfy 1 <= h < n")
        if len(set(self.lag_report)) != len(self.lag_report):
            raise InvalidSpec("lag_report", "duplicate lag requested")
        if self.bandwidth_c <= 0:
            raise InvalidSpec("bandwidth_c", f"must be positive, got {self.bandwidth_c!r}")
        if TestKind.Q_FEASIBLE in self.tests and self.n < 10:
            raise InvalidSpec("n", "the feasible test needs n >= 10 for the bandwidth rule")

    def to_dict(self) -> dict:
        return {
            "dgp": self.dgp.to_dict(),
            "n": self.n,
            "replications": self.replications,
            "m": self.m,
            "alpha": self.alpha,
            "seed": self.seed,
            "tests": [t.value for t in self.tests],
            "lag_report": list(self.lag_report),
            "kernel": self.kernel.value,
            "bandwidth_c": self.bandwidth_c,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationSpec":
        known = {"dgp", "n", "replications", "m", "alpha", "seed", "tests",
                 "lag_report", "kernel", "bandwidth_c"}
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(sorted(unknown)[0], "unknown field")
        if "dgp" not in data:
            raise InvalidSpec("dgp", "missing required field")
        for req in ("n", "replications", "seed"):
            if req not in data:
                raise InvalidSpec(req, "missing required field")
        try:
            dgp = Dgp.from_dict(data["dgp"])
        except InvalidInput as exc:
            raise InvalidSpec("dgp", str(exc)) from None
        try:
            tests = tuple(TestKind(t) for t in data.get("tests", ["Q", "QFeasible"]))
        except ValueError:
            raise InvalidSpec("tests", f"unknown test in {data.get('tests')!r}") from None
        try:
            kernel = KernelFamily(data.get("kernel", KernelFamily.EPANECHNIKOV))
        except ValueError:
            raise InvalidSpec("kernel", f"unknown kernel {data.get('kernel')!r}") from None
        return cls(
            dgp=dgp,
            n=data["n"],
            replications=data["replications"],
            m=data.get("m", 5),
            alpha=data.get("alpha", 0.05),
            seed=data["seed"],
            tests=tests,
            lag_report=tuple(data.get("lag_report", ())),
            kernel=kernel,
            bandwidth_c=data.get("bandwidth_c", DEFAULT_BANDWIDTH_SCALE),
        )


@dataclass
class SimulationResult:
    """Aggregated tallies of one simulation run."""

    spec: SimulationSpec
    rejection_pct: dict[str, float]
    exceedance_pct: dict[str, dict[int, float]]
    replications: int
    seed: int
    runtime_seconds: float = 0.0

    def to_dict(self) -> dict:
        # runtime_seconds is intentionally left out: the serialized result
        # must be byte-identical across reruns of the same spec.
        return {
            "schema_version": 1,
            "spec": self.spec.to_dict(),
            "replications": self.replications,
            "seed": self.seed,
            "rejection_pct": dict(sorted(self.rejection_pct.items())),
            "exceedance_pct": {
                variant: {str(lag): pct for lag, pct in sorted(lags.items())}
                for variant, lags in sorted(self.exceedance_pct.items())
            },
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _run_chunk(spec: SimulationSpec, lo: int, hi: int):
    """Tally rejections and bound exceedances for replications lo..hi-1.

    The profile is computed once per variant at the depth the lag report
    needs; the test statistic uses its first m components, which matches the
    corresponding portmanteau operation exactly (asserted by the test suite).
    """
    n = spec.n
    profile_depth = max((spec.m, *spec.lag_report)) if spec.lag_report else spec.m
    need_feasible = TestKind.Q_FEASIBLE in spec.tests
    need_oracle = TestKind.Q_ORACLE in spec.tests
    critical = chi2_quantile(spec.m, 1.0 - spec.alpha)
    rejections = {t: 0 for t in spec.tests}
    exceedances = {t: np.zeros(len(spec.lag_report), dtype=np.int64) for t in spec.tests}
    lag_idx = np.asarray(spec.lag_report, dtype=int) - 1
    truth = OracleProbabilities(spec.dgp.true_probabilities(n)) if need_oracle else None
    kspec = (KernelSpec.rate_default(n, c=spec.bandwidth_c, family=spec.kernel)
             if need_feasible else None)
    for r in range(lo, hi):
        rng = replication_rng(spec.seed, r)
        series = simulate_series(spec.dgp, n, rng)
        estimate = estimate_probability(series, kspec) if need_feasible else None
        for t in spec.tests:
            if t == TestKind.Q:
                profile = dependence_profile_stationary(series, profile_depth)
                statistic = n * float(np.sum(profile.components[: spec.m] ** 2))
            elif t == TestKind.Q_ORACLE:
                profile = profile_oracle(series, truth, profile_depth)
                statistic = n / profile.omega * float(np.sum(profile.components[: spec.m] ** 2))
            else:
                profile = profile_feasible(series, estimate, profile_depth)
                statistic = n / profile.omega * float(np.sum(profile.components[: spec.m] ** 2))
            rejections[t] += statistic > critical
            if spec.lag_report:
                exceedances[t] += profile.exceedances()[lag_idx]
    return rejections, exceedances


def run_experiment(spec: SimulationSpec, workers: int = 1) -> SimulationResult:
    """Run all replications of a spec and aggregate rejection/exceedance rates.

    Any replication failure aborts the run: partial tallies are never
    reported.  ``workers`` > 1 distributes replications over processes; the
    tallies are order-independent counts, so the result is identical at any
    worker count.
    """
    spec.validate()
    start = time.perf_counter()
    N = spec.replications
    workers = max(1, int(workers))
    if workers == 1 or N < 2 * workers:
        rejections, exceedances = _run_chunk(spec, 0, N)
    else:
        bounds = np.linspace(0, N, workers + 1, dtype=int)
        chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
        rejections = {t: 0 for t in spec.tests}
        exceedances = {t: np.zeros(len(spec.lag_report), dtype=np.int64) for t in spec.tests}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rej, exc in pool.map(_run_chunk, [spec] * len(chunks),
                                     [c[0] for c in chunks], [c[1] for c in chunks]):
                for t in spec.tests:
                    rejections[t] += rej[t]
                    exceedances[t] += exc[t]
    runtime = time.perf_counter() - start
    rejection_pct = {t.value: 100.0 * rejections[t] / N for t in spec.tests}
    exceedance_pct = {
        _TEST_VARIANT[t].value: {
            int(h): 100.0 * int(count) / N
            for h, count in zip(spec.lag_report, exceedances[t])
        }
        for t in spec.tests
        if spec.lag_report
    }
    return SimulationResult(
        spec=spec,
        rejection_pct=rejection_pct,
        exceedance_pct=exceedance_pct,
        replications=N,
        seed=spec.seed,
        runtime_seconds=runtime,
    )


_TEST_LABEL = {
    TestKind.Q.value: "stationary",
    TestKind.Q_ORACLE.value: "oracle-adaptive",
    TestKind.Q_FEASIBLE.value: "feasible-adaptive",
}


def format_results_table(results: list[SimulationResult]) -> str:
    """Render one or more runs (e.g. several sample sizes) as a text table."""
    if not results:
        return "(no results)\n"
    first = results[0].spec
    ns = [r.spec.n for r in results]
    lines = []
    lines.append(
        f"rejection frequency (%)  [alpha={first.alpha:g}, m={first.m}, "
        f"N={first.replications}]"
    )
    header = f"{'test':<22}" + "".join(f"{'n=' + str(n):>10}" for n in ns)
    lines.append(header)
    for t in first.tests:
        row = f"{_TEST_LABEL[t.value]:<22}"
        for r in results:
            row += f"{r.rejection_pct[t.value]:>10.2f}"
        lines.append(row)
    if first.lag_report:
        lines.append("")
        lines.append("components outside the 95% band (%)")
        lines.append(f"{'variant':<22}{'lag':>5}" + "".join(f"{'n=' + str(n):>10}" for n in ns))
        for t in first.tests:
            variant = _TEST_VARIANT[t].value
            for h in first.lag_report:
                row = f"{_VARIANT_LABEL[_TEST_VARIANT[t]]:<22}{h:>5}"
                for r in results:
                    row += f"{r.exceedance_pct[variant][h]:>10.2f}"
                lines.append(row)
    return "\n".join(lines) + "\n"
