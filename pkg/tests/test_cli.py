"""End-to-end CLI behavior: files, determinism, exit codes."""

import datetime as dt
import json
import re

import numpy as np
import pytest

from illiqdep.cli import main


@pytest.fixture
def returns_csv(tmp_path):
    rng = np.random.Generator(np.random.Philox(key=[41, 0]))
    factors = (rng.random(901) < 0.7).astype(int)
    bits = factors[1:] * factors[:-1]
    values = np.where(bits == 1, rng.normal(0.0, 0.02, 900), 0.0)
    path = tmp_path / "acme.csv"
    day0 = dt.date(2018, 1, 1)
    lines = ["date,return"]
    lines += [f"{day0 + dt.timedelta(days=i)},{r:.6f}" for i, r in enumerate(values)]
    path.write_text("\n".join(lines) + "\n")
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestAnalyze:
    def test_full_emission(self, tmp_path, returns_csv, capsys):
        out = tmp_path / "out"
        code = run_cli("analyze", "--input", returns_csv, "--out", out,
                       "--max-lag", "30", "--cusum-lags", "1,2")
        assert code == 0
        stdout = capsys.readouterr().out
        assert re.search(r"share of traded days: 0\.\d{2}\n", stdout)
        report = json.loads((out / "acme_report.json").read_text())
        assert report["schema_version"] == 1
        assert report["n"] == 900
        assert report["stationary"]["test"]["variant"] == "stationary"
        assert report["feasible_adaptive"]["profile"]["variant"] == "feasible_adaptive"
        assert len(report["cusum"]) == 2
        prob_lines = (out / "acme_probability.csv").read_text().strip().splitlines()
        assert prob_lines[0] == "t,p_hat,clipped"
        assert len(prob_lines) == 901
        for name in ("acme_profile_stationary.csv", "acme_profile_feasible.csv",
                     "acme_dependence_stationary.svg", "acme_dependence_feasible.svg",
                     "acme_probability.svg", "acme_cusum_h1.csv", "acme_cusum_h2.csv"):
            assert (out / name).exists()

    def test_reject_decision_keeps_exit_zero(self, tmp_path, returns_csv):
        # The synthetic series is 1-dependent, so the tests reject; the exit
        # code must stay 0 regardless of the decision.
        out = tmp_path / "out"
        code = run_cli("analyze", "--input", returns_csv, "--out", out, "--emit", "json")
        assert code == 0
        report = json.loads((out / "acme_report.json").read_text())
        assert report["stationary"]["test"]["reject"] is True

    def test_svg_deterministic(self, tmp_path, returns_csv):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for out in (out1, out2):
            assert run_cli("analyze", "--input", returns_csv, "--out", out,
                           "--max-lag", "20") == 0
        for name in ("acme_dependence_stationary.svg", "acme_dependence_feasible.svg",
                     "acme_probability.svg"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_emit_json_only(self, tmp_path, returns_csv):
        out = tmp_path / "out"
        assert run_cli("analyze", "--input", returns_csv, "--out", out,
                       "--emit", "json") == 0
        assert (out / "acme_report.json").exists()
        assert not (out / "acme_probability.csv").exists()
        assert not (out / "acme_dependence_stationary.svg").exists()

    def test_headerless_input(self, tmp_path):
        path = tmp_path / "plain.csv"
        rng = np.random.default_rng(4)
        values = np.where(rng.random(200) < 0.6, rng.normal(0, 0.01, 200), 0.0)
        path.write_text("\n".join(f"{v:.6f}" for v in values) + "\n")
        assert run_cli("analyze", "--input", path, "--out", tmp_path / "o",
                       "--max-lag", "20", "--emit", "json") == 0

    def test_bad_row_exits_2_with_error_json(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("date,return\n2020-01-02,0.01\n2020-01-03,oops\n")
        code = run_cli("analyze", "--input", path, "--out", tmp_path)
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "InvalidInput"
        assert "row 3" in err["error"]["message"]

    def test_bad_emit_value(self, tmp_path, returns_csv, capsys):
        code = run_cli("analyze", "--input", returns_csv, "--out", tmp_path,
                       "--emit", "json,bmp")
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert "bmp" in err["error"]["message"]

    def test_max_lag_too_large(self, tmp_path, capsys):
        path = tmp_path / "short.csv"
        path.write_text("\n".join(["0.01", "0.0"] * 20) + "\n")
        code = run_cli("analyze", "--input", path, "--out", tmp_path, "--max-lag", "40")
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "InvalidInput"

    def test_degenerate_series_exits_2(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text("\n".join(["0.0"] * 80) + "\n")
        code = run_cli("analyze", "--input", path, "--out", tmp_path, "--max-lag", "10")
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "DegenerateSeries"


class TestSimulate:
    @pytest.fixture
    def config(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({
            "dgp": {"kind": "indep_constant", "p": 0.6},
            "n": [100, 200],
            "replications": 40,
            "m": 5,
            "alpha": 0.05,
            "seed": 42,
            "tests": ["Q", "QFeasible"],
            "lag_report": [1, 5],
        }))
        return path

    def test_runs_and_prints_table(self, tmp_path, config, capsys):
        out = tmp_path / "res.json"
        assert run_cli("simulate", "--config", config, "--out", out) == 0
        stdout = capsys.readouterr().out
        assert "n=100" in stdout and "n=200" in stdout
        assert "stationary" in stdout and "feasible-adaptive" in stdout
        payload = json.loads(out.read_text())
        assert len(payload["results"]) == 2
        assert payload["results"][0]["spec"]["n"] == 100

    def test_byte_identical_reruns_and_workers(self, tmp_path, config, monkeypatch):
        outs = [tmp_path / f"r{i}.json" for i in range(3)]
        assert run_cli("simulate", "--config", config, "--out", outs[0]) == 0
        assert run_cli("simulate", "--config", config, "--out", outs[1]) == 0
        assert run_cli("simulate", "--config", config, "--out", outs[2], "--workers", "2") == 0
        blobs = [p.read_bytes() for p in outs]
        assert blobs[0] == blobs[1] == blobs[2]

    def test_threads_env_caps_workers(self, tmp_path, config, monkeypatch):
        monkeypatch.setenv("ILLIQDEP_THREADS", "1")
        out = tmp_path / "res.json"
        assert run_cli("simulate", "--config", config, "--out", out, "--workers", "8") == 0

    def test_seed_override_changes_output(self, tmp_path, config):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("simulate", "--config", config, "--out", a) == 0
        assert run_cli("simulate", "--config", config, "--out", b, "--seed", "43") == 0
        assert a.read_bytes() != b.read_bytes()
        assert json.loads(b.read_text())["results"][0]["seed"] == 43

    def test_zero_replications_field_error(self, tmp_path, capsys):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({
            "dgp": {"kind": "indep_constant", "p": 0.6},
            "n": 100, "replications": 0, "seed": 1,
        }))
        code = run_cli("simulate", "--config", path, "--out", tmp_path / "r.json")
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "InvalidSpec"
        assert err["error"]["field"] == "replications"

    def test_invalid_json_config(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run_cli("simulate", "--config", path, "--out", tmp_path / "r.json") == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "InvalidInput"


class TestPlot:
    def test_rerender_matches_analyze(self, tmp_path, returns_csv):
        out = tmp_path / "out"
        assert run_cli("analyze", "--input", returns_csv, "--out", out,
                       "--max-lag", "25") == 0
        replot = tmp_path / "replot"
        assert run_cli("plot", "--report", out / "acme_report.json", "--out", replot,
                       "--probability-csv", out / "acme_probability.csv") == 0
        for name in ("acme_dependence_stationary.svg", "acme_dependence_feasible.svg",
                     "acme_probability.svg"):
            assert (out / name).read_bytes() == (replot / name).read_bytes()

    def test_missing_report(self, tmp_path, capsys):
        assert run_cli("plot", "--report", tmp_path / "nope.json") == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "InvalidInput"

    def test_wrong_schema_version(self, tmp_path, capsys):
        path = tmp_path / "rep.json"
        path.write_text(json.dumps({"schema_version": 99}))
        assert run_cli("plot", "--report", path) == 2
        err = json.loads(capsys.readouterr().out)
        assert "schema_version" in err["error"]["message"]
