"""Command line client: subcommands, exit codes, file outputs."""

import json

import pytest
from click.testing import CliRunner

from soldyn.cli import main

CAT_JSON = "[[2,1],[1,1]]"
GOLDEN_JSON = '{"rows": [[1,1],[1,0]]}'


@pytest.fixture()
def runner():
    return CliRunner()


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "soldyn" in result.output


def test_help_lists_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for name in ("verify-identities", "shadow", "conjugacy", "entropy",
                 "weights", "length", "classify", "report", "serve"):
        assert name in result.output


class TestVerifyIdentities:
    def test_pass(self, runner):
        result = runner.invoke(
            main, ["verify-identities", "--matrix", CAT_JSON, "--samples", "5"]
        )
        assert result.exit_code == 0
        assert "all passed" in result.output

    def test_singular_matrix_exits_2(self, runner):
        result = runner.invoke(
            main, ["verify-identities", "--matrix", "[[1,1],[1,1]]"]
        )
        assert result.exit_code == 2
        assert "error (invalid_spec)" in result.stderr


class TestShadow:
    def test_sampled_orbit(self, runner):
        result = runner.invoke(main, ["shadow", "--window", "20"])
        assert result.exit_code == 0
        assert "within bound     True" in result.output

    def test_orbit_file(self, runner, tmp_path):
        orbit = {"points": [{"base": [0.1 * 2.0**j], "fiber": []}
                            for j in range(-2, 3)]}
        path = tmp_path / "orbit.json"
        path.write_text(json.dumps(orbit))
        result = runner.invoke(main, ["shadow", "--orbit-file", str(path)])
        assert result.exit_code == 0
        assert "gap              0.000000e+00" in result.output

    def test_non_hyperbolic_matrix_exits_2(self, runner):
        result = runner.invoke(main, ["shadow", "--matrix", "[[0,1],[-1,0]]"])
        assert result.exit_code == 2


class TestConjugacy:
    def test_solid_torus(self, runner):
        result = runner.invoke(
            main, ["conjugacy", "solid-torus", "--samples", "20"]
        )
        assert result.exit_code == 0
        assert "within tolerance True" in result.output

    def test_divergent_perturbation_exits_3(self, runner):
        result = runner.invoke(
            main, ["conjugacy", "linear-model", "--eps", "5.0", "--samples", "5"]
        )
        assert result.exit_code == 3
        assert "error (estimator_quality)" in result.stderr


class TestEntropy:
    def test_toral(self, runner):
        result = runner.invoke(main, ["entropy", "--matrix", CAT_JSON])
        assert result.exit_code == 0
        assert "entropy  0.962423650119207" in result.output

    def test_sft(self, runner):
        result = runner.invoke(main, ["entropy", "--transition", GOLDEN_JSON])
        assert result.exit_code == 0
        assert "entropy  0.4812118250596" in result.output

    def test_both_inputs_exit_2(self, runner):
        result = runner.invoke(
            main,
            ["entropy", "--matrix", CAT_JSON, "--transition", GOLDEN_JSON],
        )
        assert result.exit_code == 2

    def test_reducible_transition_exits_2(self, runner):
        result = runner.invoke(
            main, ["entropy", "--transition", '{"rows": [[1,1],[0,1]]}']
        )
        assert result.exit_code == 2
        assert "no path" in result.stderr


class TestWeights:
    def test_csv_to_stdout(self, runner):
        result = runner.invoke(
            main, ["weights", "--transition", GOLDEN_JSON, "--max-len", "2"]
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "word,weight"
        assert lines[1].startswith("0,1.618033988749")
        assert len(lines) == 6

    def test_csv_to_file(self, runner, tmp_path):
        out = tmp_path / "weights.csv"
        result = runner.invoke(
            main,
            ["weights", "--transition", GOLDEN_JSON, "--max-len", "3",
             "--csv-out", str(out)],
        )
        assert result.exit_code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "word,weight"
        assert len(lines) == 11


class TestLength:
    def test_single_path(self, runner):
        result = runner.invoke(
            main, ["length", "--matrix", CAT_JSON, "--vertices", "[[0,0],[1,0]]"]
        )
        assert result.exit_code == 0
        assert "length                0.723606797749" in result.output

    def test_laws(self, runner):
        result = runner.invoke(
            main, ["length", "--matrix", CAT_JSON, "--samples", "20"]
        )
        assert result.exit_code == 0
        assert "max linearity defect" in result.output


class TestClassify:
    def test_valid(self, runner):
        result = runner.invoke(main, ["classify", "--dim-lambda", "2", "--dim-eu", "1"])
        assert result.exit_code == 0
        assert result.output.strip() == "torus-T2-automorphism"

    def test_impossible_exits_2(self, runner):
        result = runner.invoke(main, ["classify", "--dim-lambda", "0", "--dim-eu", "2"])
        assert result.exit_code == 2
        assert "error (invalid_spec)" in result.stderr


class TestReport:
    def test_builtin_shortcut(self, runner):
        result = runner.invoke(
            main,
            ["report", "--builtin", "fixed_point_sink",
             "--count", "3000", "--steps", "300"],
        )
        assert result.exit_code == 0
        assert "attracting-fixed-point" in result.output

    def test_requires_exactly_one_source(self, runner):
        result = runner.invoke(main, ["report"])
        assert result.exit_code == 2
        result = runner.invoke(
            main,
            ["report", "--builtin", "fixed_point_sink",
             "--spec", '{"builtin": "toral_auto"}'],
        )
        assert result.exit_code == 2

    def test_cloud_csv_export(self, runner, tmp_path):
        out = tmp_path / "cloud.csv"
        result = runner.invoke(
            main,
            ["report", "--builtin", "fixed_point_sink",
             "--count", "2000", "--steps", "300", "--cloud-csv", str(out)],
        )
        assert result.exit_code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x0,x1,x2"
        assert len(lines) == 2001

    def test_config_file_merges_and_quality_gate_exits_3(self, runner, tmp_path):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"report": {"config": {"r2_min": 0.99999}}}))
        result = runner.invoke(
            main,
            ["--config", str(cfg), "report", "--builtin", "smale_solenoid",
             "--count", "20000", "--steps", "300"],
        )
        assert result.exit_code == 3
        assert "error (estimator_quality): box-count:" in result.stderr

    def test_json_out_writes_response(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["--json-out", str(out), "report", "--builtin", "fixed_point_sink",
             "--count", "2000", "--steps", "300"],
        )
        assert result.exit_code == 0
        data = json.loads(out.read_text())
        assert data["class_label"] == "attracting-fixed-point"
        assert data["schema_version"] == "1"


def test_seed_flag_changes_sampled_orbit(runner):
    outs = []
    for seed in ("1", "2"):
        result = runner.invoke(main, ["--seed", seed, "shadow", "--window", "10"])
        assert result.exit_code == 0
        outs.append(result.output)
    assert outs[0] != outs[1]
