from builtins import bool, float, int, str
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class Stability(str, Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


class EventKind(str, Enum):
    FOLD = "fold"
    FLIP = "flip"
    BUBBLE_OPEN = "bubble-open"
    BUBBLE_CLOSE = "bubble-close"
    POINT = "point"


class OrbitPoint(BaseModel):
    """
    One accepted point of a periodic-orbit branch. ``cycle`` is ordered by
    iteration, ``multiplier`` is the product of f' along the cycle.
    """
    param: float = Field(..., description="Family parameter", example=2.0)
    cycle: List[float] = Field(..., min_length=1, description="Orbit points x0, f(x0), ..., f^(n-1)(x0)", example=[0.5])
    multiplier: float = Field(..., description="(f^n)'(x0)", example=-2.0)
    residual: float = Field(..., ge=0, description="max |f(x_i) - x_(i+1 mod n)|", example=0.0)
    tangent: float = Field(0.0, description="dx0/dparam from the implicit function theorem")

    @property
    def period(self) -> int:
        return len(self.cycle)


class BifurcationEvent(BaseModel):
    kind: EventKind = Field(..., example=EventKind.FOLD)
    param: float = Field(..., description="Event location (bisection midpoint or last accepted parameter)", example=1.75)
    period: int = Field(..., ge=1, example=3)
    bracket: Optional[Tuple[float, float]] = Field(None, description="Parameter bracket the event was refined to")
    suspected: bool = Field(False, description="Inferred from the branch ending rather than from a multiplier crossing")
    note: Optional[str] = Field(None, example="orbit-match-ambiguous")


class OrbitBranch(BaseModel):
    family: str = Field(..., example="family=quadratic-normal")
    period: int = Field(..., ge=1, example=3)
    points: List[OrbitPoint] = Field(default_factory=list)
    events: List[BifurcationEvent] = Field(default_factory=list)
    terminated: bool = Field(False, description="The branch ended before reaching the end of the range")

    @property
    def params(self) -> List[float]:
        return [p.param for p in self.points]

    def events_of(self, kind: EventKind) -> List[BifurcationEvent]:
        return [e for e in self.events if e.kind == kind]
