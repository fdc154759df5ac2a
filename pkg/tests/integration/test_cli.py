"""
Command line tests

Most cases call ``main`` in-process; a few run ``python -m twistedtorus`` to cover the
entry point, exit codes and byte-identical output.
"""

import json
import os
import subprocess
import sys
from pathlib import Path
from typing import Any

import pytest

from twistedtorus import cli
from twistedtorus.exceptions import SearchBudgetExceeded
from twistedtorus.verify import SuiteResult

PROJECT_ROOT = Path(__file__).parent.parent.parent


class CLIRunner:
    """Runs the CLI as a subprocess from the project root"""

    def __init__(self):
        self.env = dict(os.environ)
        self.env["PYTHONPATH"] = os.pathsep.join(
            filter(None, [str(PROJECT_ROOT / "src"), self.env.get("PYTHONPATH")])
        )

    def run(self, *args: str, timeout: int = 120) -> subprocess.CompletedProcess:
        return subprocess.run(
            [sys.executable, "-m", "twistedtorus", *args],
            text=True,
            capture_output=True,
            timeout=timeout,
            cwd=PROJECT_ROOT,
            env=self.env,
        )


@pytest.fixture(scope="module")
def runner() -> CLIRunner:
    return CLIRunner()


def run_main(capsys, *args: str) -> tuple[int, str]:
    code = cli.main(list(args))
    return code, capsys.readouterr().out


def run_json(capsys, *args: str) -> Any:
    code, out = run_main(capsys, *args)
    assert code == 0
    return json.loads(out)


class TestWordCommand:
    @pytest.mark.parametrize(
        "side, expected",
        [("inside", "x y x y^3 x y^3"), ("outside", "x^2 y x y"), ("pattern", "AABBABB")],
    )
    def test_sides(self, capsys, side, expected):
        assert run_main(capsys, "word", "7", "2", "3", "1", "1", "--side", side) == (
            0,
            expected + "\n",
        )

    def test_json_format(self, capsys):
        payload = run_json(capsys, "word", "7", "2", "3", "1", "1", "--format", "json")
        assert payload["word"] == "x y x y^3 x y^3"
        assert payload["params"]["p"] == 7

    def test_invalid_params(self, capsys):
        code, out = run_main(capsys, "word", "6", "4", "1", "1", "1")
        assert code == cli.EXIT_VALIDATION
        assert out == ""


class TestSurgeryCommand:
    def test_running_example(self, capsys):
        payload = run_json(capsys, "surgery", "7", "2", "3", "1", "1")
        assert payload["slope"] == 23
        assert payload["multiplicities"] == [2, 3, 5]
        assert payload["certificate"]["certified"] is True
        assert payload["flags"]["is_primitive_sf"] is True

    def test_degenerate(self, capsys):
        payload = run_json(capsys, "surgery", "5", "2", "1", "1", "1")
        assert payload["flags"]["is_torus_degenerate"] is True
        assert payload["multiplicities"] is None

    def test_slope_75(self, capsys):
        payload = run_json(capsys, "surgery", "25", "2", "5", "1", "1")
        assert payload["slope"] == 75
        assert payload["multiplicities"] == [10, 5, 7]

    def test_text_format(self, capsys):
        code, out = run_main(capsys, "surgery", "7", "2", "3", "1", "1", "--format", "text")
        assert code == 0
        assert out.splitlines()[0] == "K(7,2,3,1,1)  slope 23"
        assert "mu       [2, 3, 5]" in out

    def test_middle_sf_outside_uses_dual_form(self, capsys):
        payload = run_json(capsys, "surgery", "2", "7", "3", "1", "1")
        assert payload["flags"]["is_primitive_sf"] is True
        assert payload["slope"] == 23
        assert payload["multiplicities"] == [2, 3, 5]
        assert payload["computed_on"] == "K(7,2,3,1,1)"
        assert payload["certificate"]["certified"] is True
        assert payload["reason"] is None

    def test_dual_form_in_text(self, capsys):
        code, out = run_main(capsys, "surgery", "2", "7", "3", "1", "1", "--format", "text")
        assert code == 0
        assert "mu       [2, 3, 5]" in out
        assert "via K(7,2,3,1,1)" in out

    def test_negative_twist_without_dual_gives_reason(self, capsys):
        payload = run_json(capsys, "surgery", "2", "7", "3", "1", "-1")
        assert payload["flags"]["is_primitive_sf"] is True
        assert payload["multiplicities"] is None
        assert "dual" in payload["reason"]

    @pytest.mark.parametrize("params", [("7", "2", "3", "1", "1"), ("11", "7", "2", "1", "1")])
    def test_unmatched_sides_carry_search(self, capsys, params):
        payload = run_json(capsys, "surgery", *params, "--max-fiber", "5")
        for side in ("inside", "outside"):
            assert ("sf_search" in payload[side]) == (not payload[side]["matches"])

    def test_search_reported_in_text(self, capsys, monkeypatch):
        real = cli.psf_report

        def without_inside_matches(params):
            report = real(params)
            inside = report.inside.model_copy(update={"matches": []})
            return report.model_copy(update={"inside": inside})

        monkeypatch.setattr(cli, "psf_report", without_inside_matches)
        code, out = run_main(
            capsys, "surgery", "7", "2", "3", "1", "1", "--format", "text", "--max-fiber", "3"
        )
        assert code == 0
        assert "inside   not detected (fibers up to 3: (2,3))" in out

    def test_budget_exhaustion_exit_code(self, capsys, monkeypatch):
        def exhausted(params):
            raise SearchBudgetExceeded(10_000, "minimizing")

        monkeypatch.setattr(cli, "psf_report", exhausted)
        assert cli.main(["surgery", "7", "2", "3", "1", "1"]) == cli.EXIT_BUDGET

    def test_budget_below_floor(self, capsys):
        code, _ = run_main(capsys, "surgery", "7", "2", "3", "1", "1", "--budget", "5")
        assert code == cli.EXIT_VALIDATION


class TestRealizeCommand:
    def test_negative(self, capsys):
        [row] = run_json(capsys, "realize", "2", "3", "4", "--negative")
        assert (row["p"], row["q"], row["r"], row["m"], row["n"]) == (23, 5, 3, 1, -1)
        assert row["slope"] == 106
        assert sorted(row["mu"]) == [2, 3, 4]

    def test_positive(self, capsys):
        [row] = run_json(capsys, "realize", "5", "3", "2", "--positive")
        assert (row["p"], row["q"], row["r"], row["n"]) == (7, 2, 3, 1)

    def test_not_realizable(self, capsys):
        code, _ = run_main(capsys, "realize", "2", "4", "3")
        assert code == cli.EXIT_VALIDATION


class TestEnumerateCommand:
    def test_contains_family_examples(self, capsys):
        rows = run_json(capsys, "enumerate", "--max-p", "7")
        found = {(row["family"], row["p"], row["q"], row["r"]) for row in rows}
        assert (2, 7, 2, 3) in found
        assert (3, 7, 5, 4) in found

    def test_eps_and_family_filters(self, capsys):
        rows = run_json(capsys, "enumerate", "--max-p", "9", "--family", "2", "--eps", "-1")
        assert rows
        assert all(row["family"] == 2 and row["n"] == -1 for row in rows)

    def test_tsv(self, capsys):
        code, out = run_main(capsys, "enumerate", "--max-p", "7", "--format", "tsv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split("\t") == list(cli.TSV_COLUMNS)
        assert len(lines) > 1


class TestVerifyCommand:
    def test_single_suite(self, capsys):
        code, out = run_main(capsys, "verify", "--suite", "reference_numbers")
        assert code == 0
        assert "reference_numbers" in out
        assert "PASS" in out

    def test_quick_level_passes(self, capsys):
        code, out = run_main(capsys, "verify", "--level", "quick")
        assert code == 0
        assert "FAIL" not in out

    def test_word_properties_covers_q_hat_inverse_one(self, capsys):
        code, _ = run_main(capsys, "verify", "--suite", "word_properties")
        assert code == 0

    def test_failure_exit_code(self, capsys, monkeypatch):
        failing = SuiteResult(
            name="demo", passed=False, cases=1, failures=1, first_counterexample="K(1,1,0,1,1)"
        )
        monkeypatch.setattr(cli, "run_suites", lambda level, names: [failing])
        code, out = run_main(capsys, "verify")
        assert code == cli.EXIT_VERIFICATION
        assert "first counterexample: K(1,1,0,1,1)" in out


class TestEntryPoint:
    def test_module_invocation(self, runner):
        result = runner.run("word", "7", "2", "3", "1", "1", "--side", "pattern")
        assert result.returncode == 0
        assert result.stdout == "AABBABB\n"

    def test_validation_exit_code(self, runner):
        result = runner.run("surgery", "6", "4", "1", "1", "1")
        assert result.returncode == 2
        assert "error:" in result.stderr

    def test_usage_error(self, runner):
        assert runner.run("word", "7", "2").returncode == 2

    def test_deterministic_output(self, runner):
        first = runner.run("enumerate", "--max-p", "9")
        second = runner.run("enumerate", "--max-p", "9")
        assert first.returncode == 0
        assert first.stdout == second.stdout

    def test_budget_from_environment(self, runner):
        runner.env["TTK_WHITEHEAD_BUDGET"] = "20000"
        try:
            result = runner.run("verify", "--suite", "free_group", "--format", "json")
        finally:
            del runner.env["TTK_WHITEHEAD_BUDGET"]
        assert result.returncode == 0
        assert json.loads(result.stdout)[0]["passed"] is True
