"""Command-line front end.

Three commands: ``analyze`` runs the full pipeline on a returns CSV and
emits a JSON report, delimited data files and SVG figures; ``simulate``
drives the Monte Carlo engine from a declarative JSON spec; ``plot``
re-renders figures from a saved report.

Exit codes: 0 on success (test decisions never change it), 2 for input or
spec errors, which are also reported as machine-readable JSON on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from .errors import IlliqdepError, InvalidInput, InvalidSpec
from .kernel import BandwidthRule, KernelFamily, KernelSpec
from .montecarlo import SimulationSpec, format_results_table, run_experiment
from .report import AnalysisReport, build_analysis
from .series import read_returns_csv
from .stationary import DependenceProfile

THREADS_ENV = "ILLIQDEP_THREADS"


def _safe_stem(source_id: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9._-]+", "_", source_id).strip("_")
    return stem or "series"


def _parse_emit(raw: str) -> set[str]:
    emit = {part.strip().lower() for part in raw.split(",") if part.strip()}
    unknown = emit - {"json", "csv", "svg"}
    if unknown:
        raise InvalidInput(f"unknown emit format(s): {', '.join(sorted(unknown))}")
    if not emit:
        raise InvalidInput("emit list is empty")
    return emit


def _parse_lags(raw: str) -> tuple[int, ...]:
    if not raw.strip():
        return ()
    try:
        return tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise InvalidInput(f"unparseable lag list {raw!r}") from None


def _resolve_workers(requested: int) -> int:
    workers = max(1, requested)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise InvalidInput(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return workers


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _emit_figures(outdir: Path, stem: str, report: AnalysisReport) -> list[Path]:
    from . import plots

    written = []
    for tag, profile in (("stationary", report.stationary_profile),
                         ("feasible", report.feasible_profile)):
        fig = plots.dependence_figure(profile, report.alpha,
                                      title=f"{report.source_id} ({tag})")
        path = outdir / f"{stem}_dependence_{tag}.svg"
        plots.save_figure(fig, path)
        plots.close_figure(fig)
        written.append(path)
    fig = plots.probability_figure(report.probability, report.source_id)
    path = outdir / f"{stem}_probability.svg"
    plots.save_figure(fig, path)
    plots.close_figure(fig)
    written.append(path)
    return written


def cmd_analyze(args: argparse.Namespace) -> int:
    emit = _parse_emit(args.emit)
    cusum_lags = _parse_lags(args.cusum_lags)
    returns = read_returns_csv(args.input)
    if args.bandwidth is not None:
        kernel_spec = KernelSpec(family=KernelFamily(args.kernel),
                                 bandwidth=args.bandwidth,
                                 bandwidth_rule=BandwidthRule.EXPLICIT)
    else:
        kernel_spec = KernelSpec.rate_default(returns.n, family=KernelFamily(args.kernel))
    report = build_analysis(
        returns,
        threshold=args.threshold,
        max_lag=args.max_lag,
        test_lag=args.test_lag,
        alpha=args.alpha,
        kernel_spec=kernel_spec,
        cusum_lags=cusum_lags,
    )
    outdir = Path(args.out)
    stem = _safe_stem(report.source_id)
    written: list[Path] = []
    if "json" in emit:
        path = outdir / f"{stem}_report.json"
        _write_text(path, report.to_json_text())
        written.append(path)
    if "csv" in emit:
        path = outdir / f"{stem}_probability.csv"
        _write_text(path, report.probability.to_csv_text())
        written.append(path)
        for tag, profile in (("stationary", report.stationary_profile),
                             ("feasible", report.feasible_profile)):
            path = outdir / f"{stem}_profile_{tag}.csv"
            _write_text(path, profile.to_csv_text(report.alpha))
            written.append(path)
        for trajectory in report.cusum:
            path = outdir / f"{stem}_cusum_h{trajectory.h}.csv"
            _write_text(path, trajectory.to_csv_text())
            written.append(path)
    if "svg" in emit:
        outdir.mkdir(parents=True, exist_ok=True)
        written.extend(_emit_figures(outdir, stem, report))

    print(f"source: {report.source_id}")
    print(f"n: {report.n}")
    print(f"share of traded days: {report.a_bar:.2f}")
    print(f"smoothed probability: kernel={report.probability.spec.family.value} "
          f"bandwidth={report.probability.spec.bandwidth:.4f} "
          f"clipped={report.probability.clip_count}")
    for label, test in (("stationary", report.stationary_test),
                        ("feasible-adaptive", report.feasible_test)):
        verdict = "reject independence" if test.reject else "no rejection"
        print(f"{label} test (m={test.df}): statistic={test.statistic:.3f} "
              f"p={test.p_value:.4f} -> {verdict}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    try:
        config = json.loads(config_path.read_text())
    except FileNotFoundError:
        raise InvalidInput(f"config file not found: {config_path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{config_path.name}: invalid JSON ({exc})") from None
    if not isinstance(config, dict):
        raise InvalidSpec("config", "top-level JSON value must be an object")
    if args.seed is not None:
        config = {**config, "seed": args.seed}
    raw_n = config.get("n")
    n_values = raw_n if isinstance(raw_n, list) else [raw_n]
    specs = []
    for n in n_values:
        spec = SimulationSpec.from_dict({**config, "n": n})
        spec.validate()
        specs.append(spec)
    workers = _resolve_workers(args.workers)

    results = [run_experiment(spec, workers=workers) for spec in specs]

    if isinstance(raw_n, list):
        payload = {"schema_version": 1, "results": [r.to_dict() for r in results]}
    else:
        payload = results[0].to_dict()
    out_path = Path(args.out)
    _write_text(out_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(format_results_table(results), end="")
    total = sum(r.runtime_seconds for r in results)
    print(f"total runtime: {total:.2f}s over {len(results)} run(s), workers={workers}")
    print(f"wrote {out_path}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    from . import plots

    report_path = Path(args.report)
    try:
        data = json.loads(report_path.read_text())
    except FileNotFoundError:
        raise InvalidInput(f"report file not found: {report_path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{report_path.name}: invalid JSON ({exc})") from None
    if data.get("schema_version") != 1:
        raise InvalidInput(f"unsupported report schema_version {data.get('schema_version')!r}")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = _safe_stem(data.get("source_id", report_path.stem))
    alpha = float(data.get("alpha", 0.05))
    for tag, key in (("stationary", "stationary"), ("feasible", "feasible_adaptive")):
        profile = DependenceProfile.from_dict(data[key]["profile"])
        fig = plots.dependence_figure(profile, alpha,
                                      title=f"{data.get('source_id', '')} ({tag})")
        path = outdir / f"{stem}_dependence_{tag}.svg"
        plots.save_figure(fig, path)
        plots.close_figure(fig)
        print(f"wrote {path}")
    if args.probability_csv:
        p_hat = _read_probability_csv(Path(args.probability_csv))
        fig = plots.probability_figure(p_hat, data.get("source_id", ""))
        path = outdir / f"{stem}_probability.svg"
        plots.save_figure(fig, path)
        plots.close_figure(fig)
        print(f"wrote {path}")
    return 0


def _read_probability_csv(path: Path):
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError:
        raise InvalidInput(f"probability CSV not found: {path}") from None
    if not lines or lines[0].strip() != "t,p_hat,clipped":
        raise InvalidInput(f"{path.name}: expected header 't,p_hat,clipped'")
    values = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise InvalidInput(f"{path.name}: row {i}: expected 3 columns")
        try:
            values.append(float(parts[1]))
        except ValueError:
            raise InvalidInput(f"{path.name}: row {i}: unparseable value {parts[1]!r}") from None
    if not values:
        raise InvalidInput(f"{path.name}: no data rows")
    return np.asarray(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="illiqdep",
        description="Serial-dependence diagnostics for daily trade/no-trade sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="analyze a returns CSV")
    p_an.add_argument("--input", required=True, help="CSV: 'date,return' header or a single return column")
    p_an.add_argument("--out", default=".", help="output directory")
    p_an.add_argument("--max-lag", type=int, default=60, help="profile depth for the dependence plots")
    p_an.add_argument("--test-lag", type=int, default=5, help="lag count of the portmanteau tests")
    p_an.add_argument("--alpha", type=float, default=0.05)
    p_an.add_argument("--bandwidth", type=float, default=None,
                      help="explicit kernel bandwidth in (0,1); default is the n^(-1/3) rule")
    p_an.add_argument("--kernel", default="epanechnikov",
                      choices=[k.value for k in KernelFamily])
    p_an.add_argument("--threshold", type=float, default=0.0,
                      help="zero-detection tolerance on |return|")
    p_an.add_argument("--emit", default="json,csv,svg",
                      help="comma-separated subset of json,csv,svg")
    p_an.add_argument("--cusum-lags", default="",
                      help="comma-separated lags for partial-sum trajectories")
    p_an.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON spec")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default="simulation_result.json")
    p_sim.add_argument("--workers", type=int, default=1,
                       help=f"process count; capped by ${THREADS_ENV}")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.set_defaults(func=cmd_simulate)

    p_plot = sub.add_parser("plot", help="re-render figures from a saved report")
    p_plot.add_argument("--report", required=True)
    p_plot.add_argument("--out", default=".")
    p_plot.add_argument("--probability-csv", default=None,
                        help="smoothed-probability CSV to re-render alongside")
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IlliqdepError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, InvalidSpec):
            payload["error"]["field"] = exc.field
        print(json.dumps(payload, sort_keys=True))
        return 2


if __name__ == "__main__":
    sys.exit(main())
