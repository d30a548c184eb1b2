"""Test the command line front end and its exit codes."""

import json

import pytest

from src.factoriza import cli
from src.factoriza.config import config
from src.factoriza.models.report import Verdict, VerificationReport
from src.factoriza.services import runner


@pytest.fixture(autouse=True)
def restore_config(monkeypatch):
    """main() writes seeds and caps into the shared config; put them back afterwards."""
    for name in ("SEED", "DOMAIN_CAP", "COSET_CAP", "FIELD_CAP"):
        monkeypatch.setattr(config, name, getattr(config, name))


def test_int_list():
    """Test comma lists and ranges"""
    assert cli._int_list("2,3,5") == [2, 3, 5]
    assert cli._int_list("2-5") == [2, 3, 4, 5]
    assert cli._int_list("3") == [3]


def test_verify_pass(capsys):
    """Test exit 0 when every verification passes"""
    code = cli.main(["verify", "--table", "T2", "--case", "1", "--n", "3", "--q", "2,3", "--workers", "1"])
    assert code == cli.EXIT_PASS
    out = capsys.readouterr().out
    assert "PASS  T2/case1/n=3,q=2" in out
    assert "PASS  T2/case1/n=3,q=3" in out


def test_verify_mismatch(mocker):
    """Test exit 1 when a verification fails"""
    failing = VerificationReport(
        label="T2/case1/n=3,q=2", H_order=7, domain_size=7, transitive=True, exact=False,
        stabilizer_order=1, verdict=Verdict.FAIL,
    )
    mocker.patch.object(runner, "verify_exact", return_value=failing)
    code = cli.main(["verify", "--table", "T2", "--case", "1", "--n", "3", "--q", "2", "--workers", "1"])
    assert code == cli.EXIT_MISMATCH


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--table", "T9", "--case", "1"],
        ["verify", "--table", "T2", "--case", "99"],
        ["verify"],
        ["verify", "--table", "T2", "--case", "3", "--m", "3", "--q", "3", "--workers", "1"],
        ["verify", "--table", "T4", "--case", "12", "--outer", "x"],
        ["search-regular", "--group", "m13"],
        ["bogus"],
    ],
)
def test_usage_errors(argv):
    """Test exit 2 on bad selectors and arguments"""
    assert cli.main(argv) == cli.EXIT_USAGE


def test_cap_exceeded():
    """Test exit 3 when a domain exceeds its cap"""
    argv = ["verify", "--table", "T2", "--case", "1", "--n", "2", "--q", "13", "--domain-cap", "10", "--workers", "1"]
    assert cli.main(argv) == cli.EXIT_CAP


def test_structured_output_is_reproducible(tmp_path):
    """Test that two identical runs write identical bytes"""
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        code = cli.main(
            ["verify", "--table", "T2", "--case", "3", "--m", "2", "--q", "2", "--format", "structured",
             "--seed", "5", "--workers", "1", "--output", str(path)]
        )
        assert code == cli.EXIT_PASS
    assert paths[0].read_bytes() == paths[1].read_bytes()
    document = json.loads(paths[0].read_text(encoding="utf-8"))
    assert document["schema"] == "factoriza-report/1"
    assert document["seed"] == 5
    assert document["passed"]
    (record,) = document["instances"]
    assert record["params"] == {"m": 2, "q": 2}
    assert "elapsed" not in record["report"]


def test_negative_control(capsys):
    """Test that a negative control passes with its own expectations"""
    code = cli.main(["verify", "--table", "T2", "--case", "2", "--q", "2", "--negative-control", "--workers", "1"])
    assert code == cli.EXIT_PASS
    assert "/control" in capsys.readouterr().out


def test_intractable_rows_are_skipped(capsys):
    """Test that a row beyond the caps is reported, not failed"""
    assert cli.main(["verify", "--table", "T6", "--case", "24", "--workers", "1"]) == cli.EXIT_PASS
    assert "SKIP  T6/24" in capsys.readouterr().out


def test_report(capsys):
    """Test the coverage summary"""
    assert cli.main(["report"]) == cli.EXIT_PASS
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("table")
    assert "T4" in out


def test_report_arithmetic(capsys):
    """Test that inconsistent rows give exit 1"""
    assert cli.main(["report", "--arithmetic"]) == cli.EXIT_MISMATCH
    assert "inconsistent: T6/15" in capsys.readouterr().out


def test_report_structured(tmp_path):
    """Test the structured coverage document"""
    path = tmp_path / "report.json"
    assert cli.main(["report", "--format", "structured", "--output", str(path)]) == cli.EXIT_PASS
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["command"] == "report"
    assert len(document["coverage"]) == 7
    assert document["arithmetic"] == []


@pytest.mark.slow
def test_search_regular(capsys):
    """Test the regular subgroups of PSL3(3) on 13 points"""
    assert cli.main(["search-regular", "--group", "psl3-3", "--format", "structured"]) == cli.EXIT_PASS
    result = json.loads(capsys.readouterr().out)
    assert result["degree"] == 13
    assert [c["shape"] for c in result["classes"]] == ["C13"]


def test_families_table_case_alias(capsys):
    """Test that a numeric case of T5 reads the exact-factorization row"""
    assert cli.main(["verify", "--table", "T5", "--case", "36", "--workers", "1"]) == cli.EXIT_PASS
    assert "T4/case36" in capsys.readouterr().out


def test_orthogonal_negative_control(capsys):
    """Test the even-order torus control of the orthogonal case"""
    argv = ["verify", "--table", "T2", "--case", "7", "--m", "3", "--q", "3", "--negative-control", "--workers", "1"]
    assert cli.main(argv) == cli.EXIT_PASS
    out = capsys.readouterr().out
    assert "/control" in out
    assert "orbits [" in out


@pytest.mark.slow
def test_search_regular_m12_nilpotent(tmp_path):
    """Test the nilpotent regular subgroups of M12"""
    path = tmp_path / "m12.json"
    argv = ["search-regular", "--group", "m12", "--nilpotent-only", "--format", "structured", "--output", str(path)]
    assert cli.main(argv) == cli.EXIT_PASS
    result = json.loads(path.read_text(encoding="utf-8"))
    assert [c["shape"] for c in result["classes"]] == ["C6xC2"]
    assert result["nilpotent_only"]
