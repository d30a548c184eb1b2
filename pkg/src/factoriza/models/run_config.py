"""実行設定のデータモデル定義"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Command(str, Enum):
    """CLI subcommands."""

    VERIFY = "verify"
    SEARCH_REGULAR = "search-regular"
    REPORT = "report"


class OutputFormat(str, Enum):
    """出力形式"""

    HUMAN = "human"
    STRUCTURED = "structured"


class RunConfig(BaseModel):
    """One CLI invocation, validated before anything is computed."""

    command: Command = Field(..., description="Subcommand")
    table: Optional[str] = Field(None, description="Table id, e.g. T2")
    case: List[str] = Field(default_factory=list, description="Row selectors within the table")
    n: List[int] = Field(default_factory=list, description="Values of n")
    m: List[int] = Field(default_factory=list, description="Values of m")
    q: List[int] = Field(default_factory=list, description="Values of q")
    variant: Optional[str] = Field(None, description="H-shape variant of an exact row")
    outer: Optional[int] = Field(None, ge=1, le=2, description="Outer part O of an exact row")
    negative_control: bool = Field(False, description="Build the negative control instead")
    all_tractable: bool = Field(False, description="Every verified row at its witnessed variants")
    include_sporadic: bool = Field(False, description="Include the optional J2/HS rows")
    group: Optional[str] = Field(None, description="Group selector for search-regular")
    nilpotent_only: bool = Field(False, description="Restrict search-regular to nilpotent classes")
    workers: Optional[int] = Field(None, gt=0, description="Worker pool size")
    seed: Optional[int] = Field(None, description="Seed override")
    format: OutputFormat = Field(OutputFormat.HUMAN, description="出力形式")
    output: Optional[str] = Field(None, description="Report path; stdout when omitted")
    domain_cap: Optional[int] = Field(None, gt=0)
    coset_cap: Optional[int] = Field(None, gt=0)
    field_cap: Optional[int] = Field(None, gt=1)

    @field_validator("n", "m", "q")
    @classmethod
    def positive_parameters(cls, v: List[int]) -> List[int]:
        """パラメータが正の整数であることを検証"""
        if any(x < 1 for x in v):
            raise ValueError("パラメータは正の整数でなければなりません")
        return sorted(set(v))

    @field_validator("table")
    @classmethod
    def normalize_table(cls, v: Optional[str]) -> Optional[str]:
        return None if v is None else v.strip().upper()

    @model_validator(mode="after")
    def selectors_present(self) -> "RunConfig":
        """Selectors must name something for the commands that need them."""
        if self.command is Command.VERIFY and not self.all_tractable and not self.table:
            raise ValueError("verify needs --table or --all-tractable")
        if self.command is Command.SEARCH_REGULAR and not self.group:
            raise ValueError("search-regular needs --group")
        return self

    def parameter_grid(self) -> List[dict]:
        """Cartesian product of the given n, m and q values (one empty set when none)."""
        grid: List[dict] = [{}]
        for name in ("n", "m", "q"):
            values = getattr(self, name)
            if values:
                grid = [{**g, name: v} for g in grid for v in values]
        return grid

    def cap_overrides(self) -> dict:
        caps = {"DOMAIN_CAP": self.domain_cap, "COSET_CAP": self.coset_cap, "FIELD_CAP": self.field_cap}
        return {k: v for k, v in caps.items() if v is not None}
