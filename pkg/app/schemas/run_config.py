from builtins import bool, float, int, str
from enum import Enum
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    SVG = "svg"
    TEXT = "text"


class RunConfig(BaseModel):
    """Validated options of one command-line run."""
    command: str = Field(..., example="detect")
    family_spec: str = Field(..., description="Family descriptor", example="family=T-fixed-a;a=1329/500;b=1")
    n: Optional[int] = Field(None, ge=1, description="Period", example=3)
    range_lo: Optional[str] = Field(None, description="Exact lower end of the parameter range", example="1/10")
    range_hi: Optional[str] = Field(None, description="Exact upper end of the parameter range", example="5/2")
    range_required: bool = Field(False, description="The command needs lo < hi")
    newton_tol: Optional[float] = Field(None, gt=0, example=1e-12)
    point_tol: Optional[float] = Field(None, gt=0, example=1e-9)
    step0: Optional[float] = Field(None, gt=0, example=1e-3)
    output: Optional[str] = Field(None, description="Output path; standard output when omitted", example="bubble.json")
    format: OutputFormat = Field(OutputFormat.TEXT, example=OutputFormat.JSON)

    @model_validator(mode="after")
    def check_range(self):
        if self.range_required and (self.range_lo is None or self.range_hi is None):
            raise ValueError(f"{self.command} needs a parameter range")
        if self.range_lo is not None and self.range_hi is not None:
            lo, hi = Fraction(self.range_lo), Fraction(self.range_hi)
            if lo > hi or (self.range_required and lo == hi):
                raise ValueError(f"range {self.range_lo}..{self.range_hi} must have lo < hi")
        return self
