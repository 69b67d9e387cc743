import json
import subprocess
import sys

from ineqprover import cli

MOTIVATING = """\
assume: 0 < x
assume: x < y
prove: (1+x^2)/(2+y)^17 < (1+y^2)/(2+x)^10
"""

SQUARE = "prove: x^2 - 2*x + 1 >= 0\n"

REFUTABLE = """\
assume: 0 <= x
assume: x <= 1/2
assume: u = x^2
refute: u < 2*x - 1
"""


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_prove_exits_zero_and_reports_rounds(tmp_path, capsys):
    path = tmp_path / "m1.prob"
    path.write_text(MOTIVATING)
    code, out, _ = run_cli(capsys, "prove", str(path))
    assert code == 0
    assert out.startswith("PROVED (rounds: ")


def test_unprovable_goal_exits_one(tmp_path, capsys):
    path = tmp_path / "square.prob"
    path.write_text(SQUARE)
    code, out, _ = run_cli(capsys, "prove", str(path))
    assert code == 1
    assert out.startswith("UNKNOWN:")


def test_refute_subcommand(tmp_path, capsys):
    path = tmp_path / "r.prob"
    path.write_text(REFUTABLE)
    code, out, _ = run_cli(capsys, "refute", str(path))
    assert code == 0
    assert out.startswith("REFUTED")


def test_refute_rejects_files_with_goals(tmp_path, capsys):
    path = tmp_path / "m1.prob"
    path.write_text(MOTIVATING)
    code, _, err = run_cli(capsys, "refute", str(path))
    assert code == 2
    assert "without a prove" in err


def test_prove_requires_a_goal(tmp_path, capsys):
    path = tmp_path / "r.prob"
    path.write_text(REFUTABLE)
    code, _, err = run_cli(capsys, "prove", str(path))
    assert code == 2


def test_normalize_prints_canonical_form(capsys):
    code, out, _ = run_cli(capsys, "normalize", "x + x")
    assert code == 0 and out.strip() == "2 * x"


def test_equal_subcommand(capsys):
    code, out, _ = run_cli(capsys, "equal", "x + x", "2*x")
    assert code == 0 and out.strip() == "EQUAL"
    code, out, _ = run_cli(capsys, "equal", "x*(1+y)", "x + x*y")
    assert code == 1 and out.strip() == "NOT EQUAL"


def test_parse_errors_exit_two(capsys, tmp_path):
    code, _, err = run_cli(capsys, "normalize", "1.5*x")
    assert code == 2 and "decimal" in err
    path = tmp_path / "bad.prob"
    path.write_text("assume: exp(x) < 1\n")
    code, _, err = run_cli(capsys, "prove", str(path))
    assert code == 2 and "undeclared" in err


def test_missing_file_exits_two(capsys):
    code, _, err = run_cli(capsys, "prove", "/nonexistent/x.prob")
    assert code == 2


def test_json_report_schema(tmp_path, capsys):
    path = tmp_path / "m1.prob"
    path.write_text(MOTIVATING)
    code, out, _ = run_cli(capsys, "prove", str(path), "--json")
    assert code == 0
    data = json.loads(out)
    assert list(data) == ["verdict", "rounds", "atoms_derived", "trace",
                          "name_table"]
    assert data["verdict"] == "refuted"
    assert data["atoms_derived"] > 0
    for step in data["trace"]:
        assert list(step) == ["round", "module", "premises", "derived", "note"]
    assert data["name_table"]


def test_json_output_is_byte_deterministic(tmp_path, capsys):
    path = tmp_path / "m1.prob"
    path.write_text(MOTIVATING)
    _, first, _ = run_cli(capsys, "prove", str(path), "--json")
    _, second, _ = run_cli(capsys, "prove", str(path), "--json")
    assert first == second


def test_trace_flag_prints_derivations(tmp_path, capsys):
    path = tmp_path / "r.prob"
    path.write_text(REFUTABLE)
    code, out, _ = run_cli(capsys, "refute", str(path), "--trace")
    assert code == 0
    assert "[round" in out and "false" in out


def test_max_rounds_flag_and_option(tmp_path, capsys):
    path = tmp_path / "square.prob"
    path.write_text(SQUARE)
    code, out, _ = run_cli(capsys, "prove", str(path), "--max-rounds", "4",
                           "--json")
    assert json.loads(out)["rounds"] == 4
    path2 = tmp_path / "square2.prob"
    path2.write_text("option: max-rounds 3\n" + SQUARE)
    code, out, _ = run_cli(capsys, "prove", str(path2), "--json")
    assert json.loads(out)["rounds"] == 3
    # explicit flag beats the file option
    code, out, _ = run_cli(capsys, "prove", str(path2), "--max-rounds", "5",
                           "--json")
    assert json.loads(out)["rounds"] == 5


def test_environment_overrides_defaults(tmp_path, capsys, monkeypatch):
    path = tmp_path / "square.prob"
    path.write_text(SQUARE)
    monkeypatch.setenv("INEQ_MAX_ROUNDS", "2")
    code, out, _ = run_cli(capsys, "prove", str(path), "--json")
    assert json.loads(out)["rounds"] == 2


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "ineqprover.cli", "normalize", "x + x"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2 * x"
