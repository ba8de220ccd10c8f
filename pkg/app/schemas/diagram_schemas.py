from builtins import float, int, len, str, sum, zip
from typing import Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class DiagramSettings(BaseModel):
    transient: int = Field(..., ge=0, description="Iterates discarded before recording", example=1000)
    keep: int = Field(..., ge=1, description="Iterates recorded per parameter and seed", example=200)
    x0_policy: str = Field("critical-point", description="'critical-point' or 'fixed'", example="critical-point")
    x0_value: Optional[float] = Field(None, description="Seed used by the 'fixed' policy", example=0.0)
    escape_bound: float = Field(..., gt=0, example=1e6)

    @model_validator(mode="after")
    def check_policy(self):
        if self.x0_policy not in ("critical-point", "fixed"):
            raise ValueError(f"unknown x0 policy {self.x0_policy!r}")
        if self.x0_policy == "fixed" and self.x0_value is None:
            raise ValueError("the fixed x0 policy needs x0_value")
        return self


class DiagramDataset(BaseModel):
    """
    Orbit-diagram samples. ``samples[i]`` holds the recorded iterates at
    ``params[i]`` (every seed merged, escaped seeds left out); ``escaped[i]``
    counts the seeds that escaped there.
    """
    family: str = Field(..., example="family=T-fixed-a;a=1329/500;b=1")
    param_name: str = Field(..., example="c")
    params: List[float] = Field(..., min_length=1)
    samples: List[List[float]] = Field(...)
    escaped: List[int] = Field(...)
    settings: DiagramSettings

    @model_validator(mode="after")
    def check_lengths(self):
        if not (len(self.params) == len(self.samples) == len(self.escaped)):
            raise ValueError("params, samples and escaped must have the same length")
        return self

    @property
    def escaped_total(self) -> int:
        return sum(self.escaped)

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.samples)

    def points(self) -> Iterator[Tuple[float, float]]:
        for param, values in zip(self.params, self.samples):
            for x in values:
                yield param, x
