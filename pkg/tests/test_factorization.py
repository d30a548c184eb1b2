"""Test the verification core on small hand-built instances."""

from fractions import Fraction

import pytest

from src.factoriza.config import config
from src.factoriza.models.report import Verdict
from src.factoriza.services import factorization
from src.factoriza.services.factorization import (
    FactorizationInstance,
    Summand,
    classify_by,
    divisibility_check,
    fixpoint_profile,
    orbit_count_check,
    verify,
    verify_exact,
)
from src.factoriza.services.perm_engine import (
    PermGroup,
    cyclic_group,
    from_cycles,
    identity,
    symmetric_group,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError


def test_orbit_count_trivial_group():
    """Test that the trivial group has one orbit per point"""
    assert orbit_count_check(PermGroup(4)) == Fraction(4)


def test_orbit_count_matches_orbits():
    """Test the orbit-counting lemma on an intransitive group"""
    H = PermGroup(6, [from_cycles(6, [[0, 1, 2]]), from_cycles(6, [[3, 4]])])
    assert orbit_count_check(H) == len(H.orbits()) == 3


def test_orbit_count_reduction(monkeypatch):
    """Test the fallback to a reduction subgroup when H is too large"""
    H = cyclic_group(7)
    monkeypatch.setattr(config, "ELEMENT_ENUMERATION_CAP", 3)
    with pytest.raises(CapExceededError):
        orbit_count_check(H)
    # only the identity has fixed points, so the trivial group carries them all
    assert orbit_count_check(H, reduction=PermGroup(7)) == 1


def test_divisibility_check():
    """Test the divisibility condition for exact factorizations"""
    ok = divisibility_check(7, 7)
    assert ok.divides and ok.exact_possible
    bad = divisibility_check(351, 117)
    assert not bad.divides
    with pytest.raises(ValidationError, match="positive"):
        divisibility_check(0, 5)


def test_classify_and_profile():
    """Test grouping by descriptor and the fixed-point profile"""
    t = from_cycles(4, [[0, 1]])
    dt = from_cycles(4, [[0, 1], [2, 3]])
    classes = classify_by([("b", dt), ("a", t), ("b", from_cycles(4, [[0, 2], [1, 3]]))], {"a": 2, "b": 1})
    assert [c.descriptor for c in classes] == ["a", "b"]
    profile = fixpoint_profile(classes)
    assert profile[0].fixed == [2]
    assert profile[0].matched
    assert profile[1].count == 2
    assert profile[1].fixed == [0]
    assert not profile[1].matched


def test_verify_regular_instance():
    """Test a regular factor: transitive, exact, stabilizer 1"""
    inst = FactorizationInstance(
        label="C5 on 5",
        H=cyclic_group(5),
        expect={"transitive": True, "exact": True, "H_order": 5},
        socle_orders=(5, 5),
    )
    report = verify_exact(inst)
    assert report.verdict is Verdict.PASS
    assert report.exact
    assert report.stabilizer_order == 1
    assert report.orbit_count == "1"
    assert report.divisibility.divides


def test_verify_itemizes_mismatches():
    """Test that wrong expectations are all reported without aborting"""
    inst = FactorizationInstance(
        label="S4 on 4",
        H=symmetric_group(4),
        expect={"H_order": 12, "exact": True, "transitive": True},
        citations={"H_order": "made up"},
    )
    report = verify(inst)
    assert report.verdict is Verdict.FAIL
    keys = sorted(e.key for e in report.mismatches)
    assert keys == ["H_order", "exact"]
    wrong = next(e for e in report.mismatches if e.key == "H_order")
    assert wrong.computed == 24
    assert wrong.citation == "made up"


def test_verify_fix_predictions():
    """Test that predicted fixed-point counts are checked"""
    H = symmetric_group(3)
    classes = classify_by([("transposition", g) for g in H.generators if g[2] == 2], {"transposition": 1})
    report = verify(FactorizationInstance(label="S3", H=H, fix_classes=classes))
    assert report.verdict is Verdict.PASS
    assert any(e.key == "fix:transposition" and e.matched for e in report.expectations)

    classes = classify_by([("transposition", g) for g in H.generators if g[2] == 2], {"transposition": 0})
    report = verify(FactorizationInstance(label="S3", H=H, fix_classes=classes))
    assert report.verdict is Verdict.FAIL


def test_verify_partial_without_orbit_count(monkeypatch):
    """Test the partial verdict when the orbit count cannot be formed"""
    monkeypatch.setattr(config, "ELEMENT_ENUMERATION_CAP", 10)
    report = verify(FactorizationInstance(label="S4", H=symmetric_group(4)))
    assert report.verdict is Verdict.PARTIAL
    assert report.orbit_count is None
    assert any("orbit count skipped" in n for n in report.notes)


def test_verify_exact_divisibility_failure():
    """Test that a violated divisibility condition fails an exact claim"""
    inst = FactorizationInstance(label="C5", H=cyclic_group(5), socle_orders=(2, 5))
    report = verify_exact(inst)
    assert report.verdict is Verdict.FAIL
    assert "divisibility" in report.notes[-1]


def test_verify_summands():
    """Test per-summand outcomes"""
    alt = PermGroup(4, [from_cycles(4, [[0, 1]])])
    inst = FactorizationInstance(label="C4", H=cyclic_group(4), summands=[Summand(1, 2, alt)])
    (outcome,) = verify(inst).summands
    assert outcome.index == 1
    assert not outcome.transitive
    assert outcome.orbit_count == 3


def test_instance_validation():
    """Test the instance invariants"""
    with pytest.raises(ValidationError, match="label"):
        FactorizationInstance(label=" ", H=cyclic_group(3))
    with pytest.raises(ValidationError, match="different domains"):
        FactorizationInstance(label="x", H=cyclic_group(3), G=symmetric_group(4))


def test_identity_has_full_fix():
    """Test that the identity fixes every point"""
    (obs,) = fixpoint_profile(classify_by([("identity", identity(6))]))
    assert obs.fixed == [6]


def test_verdict_log_tag(mocker):
    """Test that the verdict line carries the PASS or FAIL tag for the emoji formatter"""
    log = mocker.patch.object(factorization, "logger")
    verify(FactorizationInstance(label="C5 on 5", H=cyclic_group(5), expect={"H_order": 5}))
    verify(FactorizationInstance(label="C5 on 5", H=cyclic_group(5), expect={"H_order": 6}))
    tags = [c.kwargs["extra"]["tag"] for c in log.info.call_args_list if "extra" in c.kwargs]
    assert tags == ["PASS", "FAIL"]
