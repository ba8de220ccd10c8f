from builtins import bool, dict, float, int, str
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, InstanceOf

from app import __version__
from app.models.polynomial import AlgebraicRoot


class ReportKind(str, Enum):
    BUBBLE = "bubble"
    POINT = "point"
    NONE = "none"


class DetectionMethod(str, Enum):
    CLOSED_FORM = "closed-form"
    SCAN = "scan"


class CountSample(BaseModel):
    param: str = Field(..., description="Exact rational grid point", example="1329/1000")
    value: float = Field(..., example=1.329)
    count: int = Field(..., ge=0, example=6)
    lower_period_flag: bool = Field(False)


class CountGrid(BaseModel):
    family: str = Field(..., example="family=T-fixed-a;a=1329/500;b=1")
    period: int = Field(..., ge=1, example=3)
    samples: List[CountSample] = Field(default_factory=list)

    @property
    def counts(self) -> List[int]:
        return [s.count for s in self.samples]

    @property
    def values(self) -> List[float]:
        return [s.value for s in self.samples]


class Transition(BaseModel):
    lo: float = Field(..., description="Left end of the refined bracket")
    hi: float = Field(..., description="Right end of the refined bracket")
    exact_lo: str = Field(..., example="601/500")
    exact_hi: str = Field(..., example="601/500")
    count_before: int = Field(..., ge=0)
    count_after: int = Field(..., ge=0)
    kind: str = Field(..., description="'birth', 'death' or 'change'", example="birth")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


class DetectedEvent(BaseModel):
    kind: str = Field(..., description="'bubble', 'point', 'birth' or 'death'", example="bubble")
    lo: float = Field(..., example=1.20156)
    hi: float = Field(..., example=1.45644)
    count_inside: Optional[int] = Field(None, description="Period-n points strictly inside a bubble, or at a point bifurcation")
    certificates: Dict[str, Any] = Field(default_factory=dict)
    exact_lo: Optional[InstanceOf[AlgebraicRoot]] = Field(None, exclude=True)
    exact_hi: Optional[InstanceOf[AlgebraicRoot]] = Field(None, exclude=True)

    class Config:
        arbitrary_types_allowed = True

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)


class BubbleReport(BaseModel):
    """
    Result of a bubble / point-bifurcation detection. ``interval_lo``/``interval_hi``
    describe the primary event (first bubble, else first point); every event found
    is listed in ``events``.
    """
    family: str = Field(..., example="family=T-fixed-a;a=1329/500;b=1")
    period: int = Field(..., ge=1, example=3)
    kind: ReportKind = Field(..., example=ReportKind.BUBBLE)
    interval_lo: Optional[float] = Field(None, example=1.20156)
    interval_hi: Optional[float] = Field(None, example=1.45644)
    method: DetectionMethod = Field(..., example=DetectionMethod.SCAN)
    events: List[DetectedEvent] = Field(default_factory=list)
    transitions: List[Transition] = Field(default_factory=list)
    certificates: Dict[str, Any] = Field(default_factory=dict)
    witness: Optional[CountGrid] = Field(None)
    tool_version: str = Field(default=__version__)

    class Config:
        arbitrary_types_allowed = True

    def events_of(self, kind: str) -> List[DetectedEvent]:
        return [e for e in self.events if e.kind == kind]

    def to_document(self) -> dict:
        """JSON-ready document; exact endpoints are rendered as text."""
        document = self.model_dump(mode="json", exclude={"witness"})
        document["events"] = [
            dict(
                event.model_dump(mode="json"),
                exact_lo=str(event.exact_lo) if event.exact_lo is not None else None,
                exact_hi=str(event.exact_hi) if event.exact_hi is not None else None,
            )
            for event in self.events
        ]
        if self.witness is not None:
            document["witness"] = {"values": self.witness.values, "counts": self.witness.counts}
        return document
