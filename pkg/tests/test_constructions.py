"""Test the Type I builders end to end through verify()."""

import pytest

from src.factoriza.models.report import Verdict
from src.factoriza.services.constructions import (
    build_case,
    build_case1,
    build_case2,
    build_case3,
    build_case4,
    build_case6,
    build_case7,
    build_case8,
    case7_e,
)
from src.factoriza.services.factorization import verify, verify_exact
from src.factoriza.utils.exceptions import ValidationError


def _fix(report, descriptor):
    return next(o for o in report.fix_profile if o.descriptor == descriptor)


@pytest.mark.parametrize(
    "n, q, ell",
    [(2, 5, 6), (3, 2, 7), (3, 3, 13), (3, 4, 21), (4, 2, 15), (5, 2, 31)],
)
def test_case1_singer_regular(n, q, ell):
    """Test the Singer cycle regular on projective points"""
    report = verify_exact(build_case1(n, q))
    assert report.verdict is Verdict.PASS
    assert report.H_order == report.domain_size == ell
    assert report.exact
    assert report.stabilizer_order == 1
    assert report.divisibility.divides


def test_case1_rejects_small_n():
    """Test the n >= 2 condition"""
    with pytest.raises(ValidationError, match="n >= 2"):
        build_case1(1, 2)


def test_case2_q2():
    """Test PSL4(2) with H of order 56"""
    report = verify(build_case2(2))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 56
    assert report.domain_size == 28
    assert report.transitive and not report.exact


@pytest.mark.slow
def test_case2_q3():
    """Test PSL4(3): |H| = 351 on 117 cosets, |H ∩ K| = 3, exactness ruled out"""
    report = verify(build_case2(3))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 351
    assert report.domain_size == 117
    assert report.stabilizer_order == 3
    assert not report.divisibility.divides


def test_case2_negative_control():
    """Test that a partial radical is intransitive"""
    report = verify(build_case2(2, negative_control=True))
    assert report.verdict is Verdict.PASS
    assert not report.transitive
    assert report.label.endswith("/control")


def test_case3_exact():
    """Test Sp6(2): H = 2^3:7 regular on 56 labelled forms"""
    report = verify_exact(build_case3(3, 2))
    assert report.verdict is Verdict.PASS
    assert report.H_order == report.domain_size == 56
    assert report.exact
    rank3 = _fix(report, "rank 3")
    assert rank3.fixed == [4]
    assert rank3.count == 7
    assert report.orbit_count == "1"


@pytest.mark.parametrize("m, q, ell, size", [(2, 2, 12, 6), (2, 4, 240, 120)])
def test_case3_not_exact_for_even_m(m, q, ell, size):
    """Test that m = 2 gives a transitive but not exact factor"""
    report = verify(build_case3(m, q))
    assert report.verdict is Verdict.PASS
    assert report.H_order == ell
    assert report.domain_size == size
    assert report.transitive and not report.exact
    assert report.stabilizer_order == 2
    assert _fix(report, f"rank {m}").fixed == [q**m // 2]


def test_case3_negative_control():
    """Test that dropping the torus leaves W intransitive"""
    report = verify(build_case3(3, 2, negative_control=True))
    assert report.verdict is Verdict.PASS
    assert not report.transitive
    assert len(report.orbit_sizes) == 7


def test_case3_conditions():
    """Test the q even, m >= 2 conditions"""
    with pytest.raises(ValidationError, match="q even"):
        build_case3(3, 3)
    with pytest.raises(ValidationError, match="summand index"):
        build_case3(3, 2, summand_index=9)


@pytest.mark.parametrize("q", [2, 4])
def test_case4_is_case3_at_m2(q):
    """Test Case 4 labels and values"""
    inst = build_case4(q)
    assert inst.label == f"T2/case4/q={q}"
    assert inst.params["case"] == 4
    report = verify(inst)
    assert report.verdict is Verdict.PASS
    assert report.H_order == q * q * (q * q - 1)


def test_case6_unitary():
    """Test GU4(2): ℓ = 80 on 40 nondegenerate points, 5 rank-1 elements fixing 8"""
    report = verify(build_case6(2, 2))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 80
    assert report.domain_size == 40
    assert report.transitive
    rank1 = _fix(report, "rank 1")
    assert rank1.count == 5
    assert rank1.fixed == [8]
    assert _fix(report, "rank 2").count == 10
    assert report.kernel_order == 3
    assert report.stabilizer_order == 2
    assert "stabilizer_order" in {e.key for e in report.expectations}


@pytest.mark.slow
def test_case6_q3():
    """Test GU4(3) on 540 nondegenerate points"""
    report = verify(build_case6(2, 3))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 1620
    assert report.domain_size == 540
    assert _fix(report, "rank 1").fixed == [54]
    assert report.stabilizer_order == 3


@pytest.mark.parametrize("m, q, e", [(2, 3, 1), (2, 5, 1), (3, 3, 2), (2, 7, 1), (3, 5, 1)])
def test_case7_e(m, q, e):
    """Test e = 2 exactly when q^m ≡ 3 mod 4"""
    assert case7_e(m, q) == e


@pytest.mark.parametrize(
    "m, q, ell, size, label",
    [
        (2, 3, 216, 36, "T2/case5/m=2,q=3"),
        (2, 5, 3000, 300, "T2/case5/m=2,q=5"),
        (3, 3, 9477, 351, "T2/case7/m=3,q=3"),
    ],
)
def test_case7_orthogonal(m, q, ell, size, label):
    """Test SO_2m+1(q) with the full radical and D of index e"""
    report = verify(build_case7(m, q))
    assert report.label == label
    assert report.verdict is Verdict.PASS
    assert report.H_order == ell
    assert report.domain_size == size
    assert report.transitive


def test_case7_negative_control():
    """Test that D of even order is intransitive at (3, 3)"""
    report = verify(build_case7(3, 3, negative_control=True))
    assert report.verdict is Verdict.PASS
    assert not report.transitive


def test_case8_even_q():
    """Test Ω8+(2): ℓ = 240 on 120 points, rank census 5 and 10, fix 24"""
    report = verify(build_case8(4, 2))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 240
    assert report.domain_size == 120
    assert report.stabilizer_order == 2
    rank2 = _fix(report, "rank 2")
    assert (rank2.count, rank2.fixed) == (5, [24])
    rank4 = _fix(report, "rank 4")
    assert (rank4.count, rank4.fixed) == (10, [0])
    assert report.orbit_count == "1"


def test_case8_odd_m():
    """Test Ω10+(2): ℓ = 992 on 496 points, every nontrivial element of W of rank 4 fixing 16"""
    report = verify(build_case8(5, 2))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 992
    assert report.domain_size == 496
    rank4 = _fix(report, "rank 4")
    assert (rank4.count, rank4.fixed, rank4.predicted) == (31, [16], 16)
    assert report.orbit_count == "1"


@pytest.mark.slow
def test_case8_odd_q():
    """Test PΩ8+(3): ℓ = 3240 on 1080 points"""
    report = verify(build_case8(4, 3))
    assert report.verdict is Verdict.PASS
    assert report.H_order == 3240
    assert report.domain_size == 1080


def test_build_case_dispatch():
    """Test dispatch, folding of cases 5 and 9, and missing parameters"""
    assert build_case(1, n=3, q=2).label == "T2/case1/n=3,q=2"
    assert build_case(5, q=3).label == "T2/case5/m=2,q=3"
    row9 = build_case(9, q=2)
    assert row9.params["case"] == 9
    assert row9.label == "T2/case9/m=4,q=2"
    assert build_case(8, m=4, q=2).label == "T2/case8/m=4,q=2"
    with pytest.raises(ValidationError, match="needs parameter q"):
        build_case(2)
    with pytest.raises(ValidationError, match="unknown Type I case"):
        build_case(10, q=2)
