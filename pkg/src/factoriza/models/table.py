"""表の行データモデル定義"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

from src.factoriza.services.formula import Expr


class TableId(str, Enum):
    """Tables carried in data."""

    T1 = "T1"  # Type I families with overgroups A and B
    T2 = "T2"  # Type I factors of least order
    T3 = "T3"  # ℓ(G0)
    T4 = "T4"  # exact factorizations
    T5 = "T5"  # exact families (i)-(iv)
    T6 = "T6"  # Type II factors
    T7 = "T7"  # Type III factors


class Tractability(str, Enum):
    """How far a row can be checked at desk scale."""

    VERIFIED = "verified"
    ORDER_ONLY = "order-only"
    INTRACTABLE = "intractable"


class TableRow(BaseModel):
    """One row of a table, with shapes, ℓ and the reason a witness is or is not built."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    table: TableId = Field(..., description="Table id")
    row: str = Field(..., description="Case number or family name")
    G: str = Field(..., description="The group, in shape notation")
    H: List[str] = Field(default_factory=list, description="Solvable factor shapes")
    K: List[str] = Field(default_factory=list, description="Other factor shapes")
    ell: Optional[Expr] = Field(None, exclude=True, description="ℓ as an expression in n, m, q, d, e")
    conditions: str = Field("", description="Conditions on the parameters, as printed")
    defaults: Dict[str, int] = Field(default_factory=dict, description="Smallest legal parameters")
    tractability: Tractability = Field(...)
    reason: str = Field("", description="Why the row is only partly checked")
    citation: str = Field(..., description="Where the row comes from")

    @field_validator("row", "citation")
    @classmethod
    def must_not_be_empty(cls, v: str) -> str:
        """行番号と出典が空でないことを検証"""
        if not v or not v.strip():
            raise ValueError("行番号と出典は空にできません")
        return v.strip()

    @computed_field  # type: ignore[prop-decorator]
    @property
    def ell_formula(self) -> Optional[str]:
        return None if self.ell is None else str(self.ell)

    @property
    def key(self) -> str:
        return f"{self.table.value}/{self.row}"

    def ell_at(self, params: Dict[str, int] | None = None) -> Optional[int]:
        """ℓ at the given parameters (the row's defaults when omitted)."""
        if self.ell is None:
            return None
        return self.ell.value({**self.defaults, **(params or {})})


class CoverageLine(BaseModel):
    """Per-table coverage counts."""

    table: TableId
    rows: int = Field(..., ge=0)
    verified: int = Field(0, ge=0)
    order_only: int = Field(0, ge=0)
    intractable: int = Field(0, ge=0)
    reasons: Dict[str, str] = Field(default_factory=dict, description="Row -> reason, for rows not verified")


class ArithmeticFinding(BaseModel):
    """Outcome of the order arithmetic on one row."""

    key: str
    consistent: bool
    meet: Optional[str] = Field(None, description="|H||K|/|G| as a fraction")
    detail: str = ""
    values: Dict[str, Any] = Field(default_factory=dict)
