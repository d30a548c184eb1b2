"""検証レポートのデータモデル定義"""

from enum import Enum
from typing import Any, List, Optional

from pydantic import BaseModel, Field, field_validator

SCHEMA_VERSION = "factoriza-report/1"


class Verdict(str, Enum):
    """検証結果の判定"""

    PASS = "pass"
    FAIL = "fail"
    PARTIAL = "partial"


class Expectation(BaseModel):
    """One expected value next to what was computed."""

    key: str = Field(..., description="期待値の名前")
    expected: Any = Field(..., description="Expected value")
    computed: Any = Field(None, description="Computed value")
    matched: bool = Field(..., description="Whether the two agree")
    citation: Optional[str] = Field(None, description="Where the expected value comes from")


class FixObservation(BaseModel):
    """Fixed points of one class of elements."""

    descriptor: str = Field(..., description="Class label, e.g. 'rank 2' or 'a2'")
    count: int = Field(..., ge=0, description="Number of elements in the class")
    fixed: List[int] = Field(default_factory=list, description="Distinct fixed-point counts observed")
    predicted: Optional[int] = Field(None, description="Predicted fixed-point count")

    @property
    def matched(self) -> bool:
        return self.predicted is None or self.fixed == [self.predicted]


class SummandOutcome(BaseModel):
    """Outcome of one choice of invariant summand."""

    index: int = Field(..., ge=0, description="Summand index")
    dimension: int = Field(..., ge=0, description="Summand dimension")
    transitive: bool = Field(..., description="Whether W:C is transitive")
    orbit_count: int = Field(..., ge=1, description="Number of orbits")


class DivisibilityResult(BaseModel):
    """|H ∩ G0| against |G0 : K ∩ G0|."""

    h_order: int = Field(..., gt=0)
    index: int = Field(..., gt=0)
    divides: bool = Field(..., description="Whether h_order divides index")
    exact_possible: bool = Field(..., description="False when the divisibility rules out exactness")


class VerificationReport(BaseModel):
    """検証結果を表すモデル"""

    label: str = Field(..., description="Instance label")
    H_order: int = Field(..., gt=0, description="|H| in the acting group")
    domain_size: int = Field(..., gt=0, description="|Δ|")
    orbit_sizes: List[int] = Field(default_factory=list)
    transitive: bool = Field(...)
    exact: bool = Field(...)
    stabilizer_order: int = Field(..., gt=0, description="|H ∩ K| read off a point stabilizer")
    orbit_count: Optional[str] = Field(None, description="Orbit-counting value as a fraction")
    kernel_order: int = Field(1, gt=0, description="Order of the matrix kernel divided out")
    fix_profile: List[FixObservation] = Field(default_factory=list)
    summands: List[SummandOutcome] = Field(default_factory=list)
    divisibility: Optional[DivisibilityResult] = None
    expectations: List[Expectation] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    elapsed: float = Field(0.0, ge=0, description="Seconds spent")
    verdict: Verdict = Field(...)

    @field_validator("label")
    @classmethod
    def label_cannot_be_empty(cls, v: str) -> str:
        """ラベルが空でないことを検証"""
        if not v or not v.strip():
            raise ValueError("ラベルは空にできません")
        return v.strip()

    @property
    def mismatches(self) -> List[Expectation]:
        return [e for e in self.expectations if not e.matched]


class RegularClass(BaseModel):
    """One conjugacy class of regular subgroups found by a search."""

    shape: str = Field(..., description="Registry name or an order-profile label")
    order: int = Field(..., gt=0)
    nilpotent: bool = Field(...)
    extraspecial: Optional[str] = Field(None, description="'+' or '-' for extraspecial groups")
    up_to: str = Field("conjugacy", description="'conjugacy' or 'fingerprint'")
    generators: List[List[int]] = Field(default_factory=list, description="Image lists")


class InstanceRecord(BaseModel):
    """Structured output record: one verified or skipped instance."""

    label: str = Field(...)
    table: Optional[str] = None
    row: Optional[str] = None
    params: dict = Field(default_factory=dict)
    report: Optional[VerificationReport] = None
    skipped: Optional[str] = Field(None, description="Reason the instance was not verified")
