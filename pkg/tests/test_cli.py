import csv
import io

import pytest

from fracfem.cli import main, parse_levels


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_converge_reproduces_a_known_row(capsys):
    code, out, _ = run(capsys, "--quiet", "converge", "--alpha", "1.55", "--mu", "4", "--degree", "1",
                       "--m", "3..5")
    assert code == 0
    row = next(line for line in out.splitlines() if line.startswith("| 1.55"))
    cells = [c.strip() for c in row.strip("|").split("|")]
    assert cells[:3] == ["1.55", "4", "P1"]
    assert cells[-1].endswith("(1.05)")


def test_csv_output_to_file_writes_full_precision_sibling(tmp_path, capsys):
    target = tmp_path / "cond.csv"
    code, out, _ = run(capsys, "--quiet", "cond", "--alpha", "1.95", "--mu", "alpha-1", "--m", "3,4",
                       "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert rows[0] == ["alpha", "mu", "kind", "m=3", "m=4"]
    full = list(csv.reader(io.StringIO((tmp_path / "cond.full.csv").read_text())))
    assert len(full) == len(rows)
    assert float(full[1][3]) == pytest.approx(float(rows[1][3]), rel=5e-3)
    assert target.read_bytes().count(b"\r\n") == len(rows)


def test_solve_output_is_deterministic(capsys):
    argv = ["--quiet", "solve", "--alpha", "1.75", "--mu", "4", "--f", "x*(1-x)", "--m", "3", "--format", "csv"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]
    rows = list(csv.reader(io.StringIO(first[1])))
    assert rows[0] == ["x", "w_h", "u_h"] and len(rows) == 10
    assert float(rows[1][2]) == 0.0


def test_eigen_command_runs(capsys):
    code, out, _ = run(capsys, "--quiet", "eigen", "--alpha", "1.75", "--mu", "alpha-1", "--degree", "1",
                       "--m", "1,2", "--count", "2", "--funcs", "1", "--ref-n", "80")
    assert code == 0
    assert "lambda1" in out and "u1" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["converge", "--alpha", "2.5"],
        ["converge", "--alpha", "1.5", "--m", "5..3"],
        ["solve", "--alpha", "1.5", "--f", "x^(-1)"],
        ["solve", "--alpha", "1.5", "--mu", "1.0"],
        ["solve", "--alpha", "1.5", "--q", "x^0.5"],
        ["cond", "--alpha", "1.5", "--mu", "banana"],
        [],
        ["--seed-tables", "solve", "--alpha", "1.5"],
    ],
)
def test_usage_errors_exit_with_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_malformed_expression_reports_position(capsys):
    code, _, err = run(capsys, "solve", "--alpha", "1.5", "--f", "x +* 2")
    assert code == 2 and "position 3" in err


def test_unwritable_output_exits_with_3(tmp_path, capsys):
    code, _, err = run(capsys, "--quiet", "cond", "--alpha", "1.95", "--mu", "3", "--m", "3",
                       "--output", str(tmp_path / "missing" / "out.md"))
    assert code == 3 and "cannot write" in err


def test_help_exits_cleanly(capsys):
    assert run(capsys, "--help")[0] == 0


def test_parse_levels():
    assert parse_levels("3..6") == [3, 4, 5, 6]
    assert parse_levels("3,5,7") == [3, 5, 7]
    assert parse_levels("4") == [4]
