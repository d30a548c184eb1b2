"""Test the table data: lookup, instantiation, order arithmetic and coverage."""

import pytest

from src.factoriza.models.table import TableId, Tractability
from src.factoriza.services.factorization import FactorizationInstance
from src.factoriza.services.tables_data import (
    OPTIONAL_ROWS,
    Intractable,
    all_rows,
    arithmetic_report,
    check_ell_row,
    coverage_report,
    ell_expr,
    ell_of,
    expand,
    export_rows,
    instantiate,
    lookup,
    order_arithmetic,
)
from src.factoriza.utils.exceptions import SelectorError, ValidationError


@pytest.mark.parametrize(
    "table, rows",
    [("T1", 9), ("T2", 9), ("T3", 25), ("T4", 47), ("T5", 4), ("T6", 28), ("T7", 12)],
)
def test_row_counts(table, rows):
    """Test that every table carries all of its rows"""
    assert len(all_rows(table)) == rows


def test_lookup():
    """Test row lookup by number and family name"""
    assert lookup("T2", 3).key == "T2/3"
    assert lookup("t3", "M11").ell_at() == 11
    assert lookup("T5", "iv").G == "Sp_2m(q)"


def test_lookup_numeric_case_in_families_table():
    """Test that T5 with a case number reads the exact-factorization table"""
    row = lookup("T5", 36)
    assert row.key == "T4/36"
    assert row.G == "M11"


def test_lookup_errors():
    """Test unknown tables and rows"""
    with pytest.raises(SelectorError, match="unknown table"):
        lookup("T9", 1)
    with pytest.raises(SelectorError, match="no row 10 in T2") as exc:
        lookup("T2", 10)
    assert "1" in exc.value.details["known"]


def test_ell_values():
    """Test ℓ formulas at the table's conditions"""
    assert ell_of("T2", 3, m=3, q=2) == 56
    assert ell_of("T2", 2, q=3) == 351
    assert ell_of("T2", 6, m=2, q=2) == 80
    assert ell_of("T2", 7, m=3, q=3) == 9477
    assert ell_of("T2", 7, m=2, q=3) == 216
    assert ell_of("T2", 8, m=4, q=3) == 3240
    assert ell_of("T7", 8) == 513
    assert str(ell_expr("T2", 1)) == "(q^n-1)/(q-1)"


def test_ell_formula_dumped():
    """Test that rows serialize the formula as text"""
    record = lookup("T2", 3).model_dump(mode="json")
    assert record["ell_formula"] == "q^m*(q^m-1)"
    assert "ell" not in record


def test_instantiate_type1():
    """Test wiring of a Type I row to its builder"""
    inst = instantiate(lookup("T2", 3), {"m": 3, "q": 2})
    assert isinstance(inst, FactorizationInstance)
    assert inst.expect["H_order"] == 56
    assert inst.label == "T2/case3/m=3,q=2"


def test_instantiate_condition_violation():
    """Test that parameters violating the row conditions are refused"""
    with pytest.raises(ValidationError, match="violate the row conditions"):
        instantiate(lookup("T2", 3), {"m": 3, "q": 3})
    with pytest.raises(ValidationError, match="violate"):
        instantiate(lookup("T3", "A_n"), {"n": 4})


def test_enum_table_selectors():
    """Test that table members and their names select the same rows"""
    assert lookup(TableId.T3, "M11") is lookup("t3", "M11")
    assert len(all_rows(TableId.T6)) == len(all_rows(" T6 ")) == 28
    assert [line.table for line in coverage_report()] == list(TableId)


def test_instantiate_intractable():
    """Test that rows beyond the caps come back as markers"""
    row = lookup("T6", 24)
    assert row.tractability is Tractability.INTRACTABLE
    marker = instantiate(row)
    assert isinstance(marker, Intractable)
    assert "domain cap" in marker.reason


def test_intractable_by_solvable_factor_size():
    """Test that a small index does not make a row tractable when H is too large to enumerate"""
    big = lookup("T6", 24)
    assert big.reason.startswith("ℓ = 9447840")
    assert lookup("T6", 27).tractability is Tractability.ORDER_ONLY


def test_order_only_rows():
    """Test rows without a construction"""
    row = lookup("T4", 25)
    assert row.tractability is not Tractability.VERIFIED
    assert isinstance(instantiate(row), Intractable)


def test_expand_variants():
    """Test parameter sets covering the witnessed variants"""
    assert list(expand(lookup("T4", 12))) == [{}, {"outer": 2}]
    assert [p["variant"] for p in expand(lookup("T4", 39))] == ["C6xC2", "A4", "D12"]
    assert len(list(expand(lookup("T4", 31)))) == 4
    assert list(expand(lookup("T2", 1))) == [{"n": 3, "q": 2}]


def test_order_arithmetic_consistent_rows():
    """Test rows whose orders multiply out"""
    for key in ((TableId.T4, 36), (TableId.T4, 44), (TableId.T7, 8), (TableId.T6, 18)):
        findings = order_arithmetic(lookup(*key))
        assert findings and all(f.consistent for f in findings)


def test_order_arithmetic_exact_outer_splits():
    """Test that exact rows with an outer part are checked for each split"""
    findings = order_arithmetic(lookup("T4", 13))
    assert len(findings) == 3
    assert all(f.consistent for f in findings)
    assert all(f.meet == "1" for f in findings)


def test_order_arithmetic_flags_inconsistencies():
    """Test that shapes disagreeing with ℓ are reported"""
    bad = {f.key.split()[0] for f in arithmetic_report() if not f.consistent}
    assert {"T6/15", "T6/22"} <= bad


def test_parametrized_rows_skipped():
    """Test that rows in free parameters are not multiplied out"""
    (finding,) = order_arithmetic(lookup("T2", 3))
    assert finding.consistent
    assert "parametrized" in finding.detail


def test_coverage_report():
    """Test the per-table coverage counts"""
    lines = {line.table: line for line in coverage_report()}
    assert lines[TableId.T2].verified == 9
    assert lines[TableId.T4].verified == 31
    assert lines[TableId.T6].verified == 9
    assert lines[TableId.T7].verified == 11
    t6 = lines[TableId.T6]
    assert t6.verified + t6.order_only + t6.intractable == t6.rows == 28
    assert "domain cap" in t6.reasons["24"]


def test_optional_rows_are_tractable_but_flagged():
    """Test that J2 and HS rows are verified rows with an asset note"""
    for key in OPTIONAL_ROWS:
        table, row = key.split("/")
        assert lookup(table, row).tractability is Tractability.VERIFIED
    assert "optional" in lookup("T3", "J2").reason


def test_export_rows():
    """Test the audit export"""
    records = export_rows()
    assert len(records) == 9 + 9 + 25 + 47 + 4 + 28 + 12
    first = next(r for r in records if r["table"] == "T7" and r["row"] == "8")
    assert first["ell_default"] == 513
    assert first["citation"].startswith("T7")


def test_check_ell_row_alternating():
    """Test an ℓ witness with the formula value attached"""
    report = check_ell_row("A_n", n=6)
    assert report.H_order == 6
    assert report.verdict.value == "pass"
    assert any(e.key == "ell" and e.matched for e in report.expectations)
