from builtins import bool, int, str
from typing import List, Optional

from pydantic import BaseModel, Field, InstanceOf

from app.models.polynomial import AlgebraicRoot, ParamPoly, UniPoly


class DynatomicResult(BaseModel):
    n: int = Field(..., ge=1, description="Period", example=3)
    phi: ParamPoly = Field(..., description="Period-n divisor polynomial in x with coefficients in t")
    factor_checked: bool = Field(..., description="Every exact division behind phi left a zero remainder")
    divisors: List[int] = Field(default_factory=list, description="Proper divisors of n whose polynomials were divided out", example=[1])

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class PeriodCount(BaseModel):
    family: str = Field(..., example="family=quadratic-normal")
    n: int = Field(..., ge=1, example=3)
    param: str = Field(..., description="Parameter at which phi was specialised", example="7/4")
    count: int = Field(..., ge=0, description="Distinct real roots of phi at the parameter", example=3)
    lower_period_flag: bool = Field(False, description="phi shares a real root with a lower-period divisor polynomial")
    shared_periods: List[int] = Field(default_factory=list, description="Lower periods whose polynomials share a real root", example=[1])
    leading_coefficient_vanishes: bool = Field(False, description="Specialisation dropped the x-degree of phi")
    method: str = Field("sturm", description="'sturm' at rational parameters, 'reduction' when counted through the normal form", example="sturm")

    class Config:
        frozen = True


class TangentLocus(BaseModel):
    n: int = Field(..., ge=1, example=3)
    params: List[InstanceOf[AlgebraicRoot]] = Field(default_factory=list, description="Parameters carrying a real multiple root of phi")
    certificate: UniPoly = Field(..., description="Resultant of phi and d(phi)/dx with respect to x")
    methods: List[str] = Field(default_factory=list, description="How each parameter was certified, aligned with params")
    rejected: List[InstanceOf[AlgebraicRoot]] = Field(default_factory=list, description="Resultant roots whose multiple roots are complex only")

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @property
    def values(self) -> List[float]:
        return [float(p) for p in self.params]


class SquareCertificate(BaseModel):
    n: int = Field(..., example=3)
    param: str = Field(..., example="7/4")
    root: Optional[UniPoly] = Field(None, description="q with q**2 == phi(t0, x), positive leading coefficient")

    class Config:
        arbitrary_types_allowed = True
        frozen = True
