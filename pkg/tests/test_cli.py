import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from evans_pipeline.cli import cli
from evans_pipeline.csvio import read_table, write_table
from evans_pipeline.errors import PropagationOverflow
from evans_pipeline.model import make_nagumo


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)


def run(runner, *args):
    return runner.invoke(cli, [str(arg) for arg in args])


def evaluate_value(runner, tmp_path, *args):
    path = tmp_path / "evaluate.csv"
    result = run(runner, "evaluate", *args, "-o", path)
    assert result.exit_code == 0, result.output
    df, _ = read_table(path)
    return complex(df["D_re"][0], df["D_im"][0])


def test_evaluate_constant_model(runner, tmp_path):
    path = tmp_path / "out.csv"
    result = run(runner, "evaluate", "--model", "constant", "--lambda", "4", "--L", "10", "--N", "50", "-o", path)
    assert result.exit_code == 0, result.output
    text = path.read_text()
    assert text.splitlines()[0] == "lambda_re,lambda_im,D_re,D_im,method,h,L,N"
    assert text.endswith("\n")
    df, trailers = read_table(path)
    assert trailers == []
    assert df["D_re"][0] == pytest.approx(-4.0, abs=1e-10)
    assert df["D_im"][0] == pytest.approx(0.0, abs=1e-10)
    assert df["method"][0] == "magnus4"
    assert df["N"][0] == 50


def test_evaluate_translation_zero(runner, tmp_path):
    value = evaluate_value(runner, tmp_path, "--a", "0.3", "--lambda", "0", "--L", "25", "--h", "0.01")
    assert abs(value) <= 1e-5


def test_evaluate_is_deterministic(runner, tmp_path):
    args = ["evaluate", "--lambda", "1", "--lambda", "2+1i", "--lambda", "10", "--L", "20", "--N", "200"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(runner, *args, "--jobs", "3", "-o", first).exit_code == 0
    assert run(runner, *args, "--jobs", "1", "-o", second).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    df, _ = read_table(first)
    assert list(df["lambda_im"]) == [0.0, 1.0, 0.0]


def test_evaluate_method_alias(runner, tmp_path):
    path = tmp_path / "out.csv"
    result = run(runner, "evaluate", "--model", "constant", "--lambda", "4", "--N", "20", "--method", "gl4", "-o", path)
    assert result.exit_code == 0, result.output
    df, _ = read_table(path)
    assert df["method"][0] == "gauss_legendre4"


def test_fixture_round_trip(runner, tmp_path):
    path = tmp_path / "nagumo.json"
    result = run(runner, "fixture", "--a", "0.3", "--lambda", "1", "--L", "25", "-o", path)
    assert result.exit_code == 0, result.output
    data = json.loads(path.read_text())
    assert data["model"] == "nagumo" and data["parameters"] == {"a": 0.3}
    assert data["L"] == 25.0 and data["N"] >= 512

    assert run(runner, "fixture", "--check", path).exit_code == 0

    recorded = complex(*data["D"])
    value = evaluate_value(runner, tmp_path, "--a", "0.3", "--lambda", "1", "--L", "25", "--h", "0.005")
    assert abs(value - recorded) <= 1e-10

    data["D"][0] += 1e-6
    path.write_text(json.dumps(data))
    result = run(runner, "fixture", "--check", path)
    assert result.exit_code == 3
    assert "fixture mismatch" in result.output


FIXTURES = Path(__file__).parent / "fixtures"


@pytest.mark.parametrize("name", ["nagumo_a0.3_lambda0.json", "constant_q1_c2_lambda3.json"])
def test_committed_fixtures_still_match(runner, name):
    result = run(runner, "fixture", "--check", FIXTURES / name)
    assert result.exit_code == 0, result.output


def test_committed_fixture_detects_drift(runner, tmp_path):
    data = json.loads((FIXTURES / "constant_q1_c2_lambda3.json").read_text())
    data["D"][0] += 2e-10
    drifted = tmp_path / "drifted.json"
    drifted.write_text(json.dumps(data))
    result = run(runner, "fixture", "--check", drifted)
    assert result.exit_code == 3
    assert "fixture mismatch" in result.output


def test_fixture_needs_output(runner):
    result = run(runner, "fixture", "--lambda", "1")
    assert result.exit_code == 2


def test_converge_constant_model_is_exact(runner, tmp_path):
    path = tmp_path / "converge.csv"
    result = run(
        runner, "converge", "--model", "constant", "--lambda", "4", "--L", "10",
        "--h", "0.5", "--h", "0.25", "--h", "0.1", "-o", path,
    )
    assert result.exit_code == 0, result.output
    df, trailers = read_table(path)
    assert list(df.columns) == ["h", "N", "abs_E_D", "E_D_re", "E_D_im"]
    assert trailers == ["exact"]


def test_converge_magnus4_order(runner, tmp_path):
    path = tmp_path / "converge.csv"
    result = run(
        runner, "converge", "--a", "0.3", "--lambda", "1", "--L", "20",
        "--h", "0.2", "--h", "0.1", "--h", "0.05", "-o", path,
    )
    assert result.exit_code == 0, result.output
    _, trailers = read_table(path)
    name, slope = trailers[0].split("=")
    assert name == "fitted_order"
    assert 3.5 <= float(slope) <= 4.5


def test_converge_needs_three_steps(runner):
    result = run(runner, "converge", "--model", "constant", "--lambda", "4", "--h", "0.5", "--h", "0.25")
    assert result.exit_code == 2
    assert "at least 3" in result.output


def test_sweep_lambda_midpoint(runner, tmp_path):
    path = tmp_path / "sweep.csv"
    result = run(
        runner, "sweep-lambda", "--a", "0.3", "--method", "midpoint", "--L", "20", "--h", "0.1",
        "--lambda-start", "100", "--lambda-factor", "10", "--lambda-count", "3", "-o", path,
    )
    assert result.exit_code == 0, result.output
    df, trailers = read_table(path)
    np.testing.assert_allclose(df["abs_lambda"], [1e2, 1e3, 1e4])
    np.testing.assert_allclose(df["abs_E_D"][:2], [3.645e-7, 2.81e-8], rtol=0.05)
    fitted = dict(line.split("=") for line in trailers)
    assert float(fitted["fitted_order_E_D"]) < -1.0
    assert "fitted_order_asymptotic" in fitted


def test_predict_rejects_gauss_legendre(runner):
    result = run(runner, "predict", "--model", "bump", "--method", "gl4", "--lambda", "1e4", "--h", "0.2")
    assert result.exit_code == 2
    assert "no closed-form prediction" in result.output


def test_predict_constant_model(runner, tmp_path):
    path = tmp_path / "predict.csv"
    result = run(runner, "predict", "--model", "constant", "--lambda", "4", "--N", "20", "-o", path)
    assert result.exit_code == 0, result.output
    df, _ = read_table(path)
    assert df["predicted_re"][0] == 0.0
    assert np.isnan(df["ratio"][0])


def test_predict_bump_magnus4(runner, tmp_path):
    path = tmp_path / "predict.csv"
    result = run(
        runner, "predict", "--model", "bump", "--lambda", "1e4", "--L", "12",
        "--h", "0.2", "--h", "0.3", "--h", "0.4", "-o", path,
    )
    assert result.exit_code == 0, result.output
    df, _ = read_table(path)
    assert list(df["h"]) == pytest.approx([0.2, 0.3, 0.4])
    assert df["ratio"].between(0.75, 1.25).all()


def test_inadmissible_lambdas_exit_2(runner):
    result = run(runner, "evaluate", "--model", "constant", "--q", "1", "--lambda", "0.5", "--lambda", "-1", "--N", "10")
    assert result.exit_code == 2
    assert "(0.5+0j)" in result.output and "(-1+0j)" in result.output


def test_bad_lambda_exit_2(runner):
    result = run(runner, "evaluate", "--lambda", "abc", "--N", "10")
    assert result.exit_code == 2


def test_numerical_failure_exit_3(runner, monkeypatch):
    def overflow(*args, **kwargs):
        raise PropagationOverflow("lambda = (4+0j): minus-side solution overflowed")

    monkeypatch.setattr("evans_pipeline.tasks.evaluate.evans_sweep", overflow)
    result = run(runner, "evaluate", "--model", "constant", "--lambda", "4", "--N", "10")
    assert result.exit_code == 3
    assert "overflowed" in result.output


def test_profile_model_matches_closed_form(runner, tmp_path):
    model = make_nagumo(0.3)
    xi = np.linspace(-25.0, 25.0, 1001)
    profile = tmp_path / "profile.txt"
    profile.write_text(
        "# sampled Nagumo front\n"
        + "".join(f"{x:.17g} {v:.17g}\n" for x, v in zip(xi, model.fprime_along_wave(xi)))
    )
    common = ["--lambda", "1", "--L", "25", "--h", "0.01"]
    tabulated = evaluate_value(runner, tmp_path, "--model", "profile", "--profile", profile, "--c", repr(model.speed_c), *common)
    closed = evaluate_value(runner, tmp_path, "--a", "0.3", *common)
    assert abs(tabulated - closed) <= 1e-5


def test_missing_profile_exit_2(runner, tmp_path):
    result = run(runner, "evaluate", "--model", "profile", "--profile", tmp_path / "nope.txt", "--lambda", "1", "--N", "10")
    assert result.exit_code == 2
    assert "cannot read profile" in result.output


def test_plotscript(runner, tmp_path):
    converge_csv = tmp_path / "converge.csv"
    df = pd.DataFrame({"h": [0.2, 0.1], "N": [100, 200], "abs_E_D": [1e-6, 6e-8], "E_D_re": [-1e-6, -6e-8], "E_D_im": [0.0, 0.0]})
    write_table(df, converge_csv, ["fitted_order=4.06"])
    result = run(runner, "plotscript", converge_csv, "--render")
    assert result.exit_code == 0, result.output
    script = (tmp_path / "converge.gp").read_text()
    assert "set logscale xy" in script
    assert "'converge.csv'" in script
    assert (tmp_path / "converge.png").exists()

    evaluate_csv = tmp_path / "evaluate.csv"
    assert run(runner, "evaluate", "--model", "constant", "--lambda", "4", "--N", "10", "-o", evaluate_csv).exit_code == 0
    script_path = tmp_path / "plots" / "evaluate.gp"
    script_path.parent.mkdir()
    assert run(runner, "plotscript", evaluate_csv, "-o", script_path).exit_code == 0
    script = script_path.read_text()
    assert "logscale" not in script
    assert "'../evaluate.csv'" in script


def test_plotscript_rejects_unknown_and_missing(runner, tmp_path):
    unknown = tmp_path / "unknown.csv"
    unknown.write_text("x,y\n1,2\n")
    result = run(runner, "plotscript", unknown)
    assert result.exit_code == 2
    assert "unrecognised CSV header" in result.output
    assert run(runner, "plotscript", tmp_path / "missing.csv").exit_code == 2


def test_version(runner):
    result = run(runner, "--version")
    assert result.exit_code == 0
    assert "1.0.0" in result.output
