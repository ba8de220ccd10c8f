from builtins import int, len, str
from fractions import Fraction
import json

import pytest

from app import __version__
from app.main import cli


@pytest.mark.parametrize("args, expected", [
    (["--family", "quadratic-normal", "--n", "3", "--param", "7/4"], "3"),
    (["--family", "quadratic-normal", "--n", "3", "--param", "3/2"], "0"),
    (["--family", "quadratic-normal", "--n", "3", "--param", "0"], "0"),
    (["--family", "quadratic-normal", "--n", "3", "--param", "2"], "6"),
    (["--family", "S-fixed-a", "--a", "2", "--n", "3", "--param", "7/8"], "3"),
    (["--family-spec", "family=T-fixed-a;a=2.658", "--n", "3", "--param", "1.3"], "6"),
])
def test_period_count(runner, args, expected):
    result = runner.invoke(cli, ["period-count", *args])
    assert result.exit_code == 0, result.stderr
    assert result.output.splitlines()[0] == expected


def test_period_count_json(runner):
    result = runner.invoke(cli, ["period-count", "--family", "quadratic-normal", "--n", "2", "--param", "3/4", "--format", "json"])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.output)
    assert document["count"] == 1
    assert document["lower_period_flag"] is True
    assert document["shared_periods"] == [1]


def test_period_count_reports_lower_period_roots(runner):
    result = runner.invoke(cli, ["period-count", "--family", "quadratic-normal", "--n", "2", "--param", "3/4"])
    assert result.exit_code == 0
    assert result.output.splitlines()[1] == "lower-period roots shared with periods 1"


def test_tangent_json(runner):
    result = runner.invoke(cli, ["tangent", "--family", "quadratic-normal", "--n", "2", "--format", "json"])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.output)
    assert [p["exact"] for p in document["params"]] == ["3/4"]
    assert document["family"] == "family=quadratic-normal"


def test_scan_csv(runner):
    result = runner.invoke(cli, ["scan", "--family", "quadratic-normal", "--n", "3", "--range", "1/4..2", "--grid", "8"])
    assert result.exit_code == 0, result.stderr
    lines = result.output.splitlines()
    assert lines[0] == "param,value,count,lower_period_flag"
    assert [int(line.split(",")[2]) for line in lines[1:]] == [0, 0, 0, 0, 0, 0, 3, 6]
    assert lines[7].split(",")[0] == "7/4"


def test_detect_closed_form_json(runner):
    """
    Tests that the T family at a = 2.658 reports the period-3 bubble without a range.
    """
    result = runner.invoke(cli, ["detect", "--family", "T-fixed-a", "--a", "2.658", "--n", "3"])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.output)
    assert document["kind"] == "bubble"
    assert document["method"] == "closed-form"
    assert document["interval_lo"] == pytest.approx(1.20156, abs=1e-5)
    assert document["interval_hi"] == pytest.approx(1.45644, abs=1e-5)
    assert document["tool_version"] == __version__


def test_detect_text(runner):
    result = runner.invoke(cli, ["detect", "--family", "T-fixed-a", "--a", "2", "--n", "3", "--format", "text"])
    assert result.exit_code == 0, result.stderr
    assert result.output.splitlines()[0].endswith("period 3: none (closed-form)")


def test_detect_writes_output_file(runner, tmp_path):
    target = tmp_path / "bubble.json"
    result = runner.invoke(cli, ["detect", "--family", "T-fixed-a", "--a", "2.35", "--n", "2", "--output", str(target)])
    assert result.exit_code == 0, result.stderr
    assert result.output == ""
    assert json.loads(target.read_text())["kind"] == "bubble"
    assert [p.name for p in tmp_path.iterdir()] == ["bubble.json"]


def test_continue_csv(runner):
    result = runner.invoke(cli, [
        "continue", "--family", "quadratic-normal", "--n", "3", "--param", "2", "--range", "2..2.01",
    ])
    assert result.exit_code == 0, result.stderr
    lines = result.output.splitlines()
    assert lines[0] == "param,x0,x1,x2,multiplier,residual,stability"
    assert len(lines) > 1


def test_continue_index_out_of_range(runner):
    result = runner.invoke(cli, [
        "continue", "--family", "quadratic-normal", "--n", "3", "--param", "2", "--range", "2..3", "--index", "2",
    ])
    assert result.exit_code == 2
    assert "2 period-3 cycle(s)" in result.stderr


def test_diagram_csv(runner):
    result = runner.invoke(cli, [
        "diagram", "--family", "quadratic-normal", "--range", "1..2", "--n-params", "5",
        "--transient", "0", "--keep", "1", "--format", "csv",
    ])
    assert result.exit_code == 0, result.stderr
    lines = result.output.splitlines()
    assert lines[0] == "param,x"
    assert len(lines) == 6


def test_diagram_svg_to_file(runner, tmp_path):
    target = tmp_path / "diagram.svg"
    result = runner.invoke(cli, [
        "diagram", "--family", "quadratic-normal", "--range", "0.5..2", "--n-params", "20",
        "--transient", "50", "--keep", "5", "--output", str(target),
    ])
    assert result.exit_code == 0, result.stderr
    assert "<svg" in target.read_text()


def test_verify_paper_quick_json(runner):
    result = runner.invoke(cli, ["verify-paper", "--quick", "--format", "json"])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.output)
    assert document["passed"] is True
    assert document["quick"] is True


@pytest.mark.parametrize("args", [
    ["period-count", "--family", "henon", "--n", "3", "--param", "2"],
    ["period-count", "--family", "S-fixed-a", "--n", "3", "--param", "1"],
    ["period-count", "--family-spec", "family=T-fixed-a;q=2", "--n", "3", "--param", "1"],
    ["period-count", "--family", "quadratic-normal", "--n", "0", "--param", "2"],
    ["period-count", "--family", "quadratic-normal", "--n", "3", "--param", "1e-3"],
    ["period-count", "--n", "3", "--param", "2"],
    ["detect", "--family", "quadratic-normal", "--n", "3"],
    ["detect", "--family", "T-fixed-a", "--a", "2.658", "--n", "3", "--range", "2..1"],
    ["diagram", "--family", "quadratic-normal", "--range", "1..2", "--x0", "middle"],
])
def test_usage_errors_exit_two(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


@pytest.mark.parametrize("args", [
    ["period-count", "--family", "logistic", "--n", "1", "--param", "0", "--strict"],
    ["period-count", "--family", "quadratic-normal", "--n", "8", "--param", "2"],
    ["diagram", "--family", "logistic", "--range", "4.5..5", "--n-params", "3", "--keep", "5"],
])
def test_failed_computations_exit_one(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 1
    assert "error: " in result.stderr


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_detect_point_at_sqrt7(runner):
    result = runner.invoke(cli, ["detect", "--family", "T-fixed-a", "--a", "sqrt7", "--n", "3"])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.output)
    assert document["kind"] == "point"
    assert document["interval_lo"] == pytest.approx(7 ** 0.5 / 2, abs=1e-9)


def test_verify_paper_fails_on_wrong_fold_value(runner, mocker):
    """
    Tests that a wrong fold value makes verify-paper report a failure and exit 1.
    """
    mocker.patch.dict("app.services.detection_service.BIRTH_PARAMETERS", {3: Fraction(8, 5)})
    result = runner.invoke(cli, ["verify-paper", "--quick"])
    assert result.exit_code == 1
    assert "FAIL period3-born-at-seven-quarters" in result.output
