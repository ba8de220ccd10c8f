from builtins import all, bool, float, len, str
from typing import List

from pydantic import BaseModel, Field

from app import __version__


class ClaimResult(BaseModel):
    name: str = Field(..., example="period3-born-at-seven-quarters")
    statement: str = Field(..., example="Period-3 point counts of 1 - alpha x**2 are 0, 3, 6 below, at and above 7/4")
    passed: bool = Field(...)
    expected: str = Field(..., example="0,0,0,0,3,6,6,6")
    computed: str = Field(..., example="0,0,0,0,3,6,6,6")
    seconds: float = Field(0.0, ge=0)


class VerificationReport(BaseModel):
    claims: List[ClaimResult] = Field(default_factory=list)
    quick: bool = Field(False, description="Slow claims were skipped")
    tool_version: str = Field(default=__version__)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_text(self) -> str:
        lines = []
        for claim in self.claims:
            status = "PASS" if claim.passed else "FAIL"
            lines.append(f"{status} {claim.name}: {claim.statement}")
            lines.append(f"     expected {claim.expected}")
            lines.append(f"     computed {claim.computed}")
        verdict = "all claims pass" if self.passed else "some claims FAILED"
        lines.append(f"{len(self.claims)} claim(s) checked{' (quick)' if self.quick else ''}: {verdict}")
        return "\n".join(lines)
