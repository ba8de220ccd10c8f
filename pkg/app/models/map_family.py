"""
One-parameter polynomial map families and the affine conjugacies onto the
normal form f_alpha(x) = 1 - alpha x**2.

Family rules are sympy expressions in ``X`` (state), ``T`` (the family
parameter) and the symbols of the fixed parameters. ``FamilyService.builtin``
binds the fixed parameters and produces a ``MapFamily``.
"""
from builtins import bool, dict, float, int, isinstance, len, repr, str, tuple
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import sympy as sp

from app.exceptions import DegenerateConjugacy
from app.models.polynomial import AlgebraicRoot, ParamPoly, T, X

A, B = sp.symbols("a b")

ParamValue = Union[Fraction, AlgebraicRoot]


class FamilyName(str, Enum):
    QUADRATIC_NORMAL = "quadratic-normal"
    S_FIXED_A = "S-fixed-a"
    T_FIXED_A = "T-fixed-a"
    LOGISTIC = "logistic"
    CUBIC_EXERCISE = "cubic-exercise"


@dataclass(frozen=True)
class NormalFormReduction:
    """Family at t is conjugate to f_alpha(t) via h(x) = shift(t) + scale(t) * x."""
    alpha: sp.Expr
    shift: sp.Expr
    scale: sp.Expr

    @property
    def is_identity(self) -> bool:
        return self.alpha == T and self.shift == 0 and self.scale == 1


@dataclass(frozen=True)
class FamilyTemplate:
    name: FamilyName
    param_name: str
    rule: sp.Expr
    fixed_names: Tuple[str, ...] = ()
    fixed_defaults: Tuple[Optional[Fraction], ...] = ()
    reduction: Optional[NormalFormReduction] = None
    critical_points: Tuple[sp.Expr, ...] = (sp.Integer(0),)


def _format_value(value: ParamValue) -> str:
    if isinstance(value, Fraction):
        return str(value)
    exact = value.rational_value
    if exact is not None:
        return str(exact)
    coefficients = value.defining.coefficients
    if len(coefficients) == 3 and coefficients[1] == 0 and coefficients[2] == 1 and value.isolator.lo >= 0:
        radicand = -coefficients[0]
        if radicand.denominator == 1:
            return f"sqrt{radicand.numerator}"
    return repr(float(value))


@dataclass(frozen=True)
class MapFamily:
    """
    A named family x -> rule(t, x).

    ``rule`` is the exact ``ParamPoly`` when every fixed parameter is rational and
    ``None`` when one of them is an algebraic number; ``rule_expr`` always holds the
    sympy expression with rational fixed parameters substituted.
    """
    name: FamilyName
    param_name: str
    rule_expr: sp.Expr
    rule: Optional[ParamPoly] = None
    fixed_params: Tuple[Tuple[str, ParamValue], ...] = ()
    reduction: Optional[NormalFormReduction] = None
    critical_points: Tuple[sp.Expr, ...] = field(default=(sp.Integer(0),))

    @property
    def fixed(self) -> Dict[str, ParamValue]:
        return dict(self.fixed_params)

    @property
    def is_exact(self) -> bool:
        return self.rule is not None

    @property
    def algebraic_fixed(self) -> Tuple[Tuple[str, AlgebraicRoot], ...]:
        return tuple((k, v) for k, v in self.fixed_params if isinstance(v, AlgebraicRoot))

    @property
    def descriptor(self) -> str:
        parts = [f"family={self.name.value}"]
        parts.extend(f"{k}={_format_value(v)}" for k, v in self.fixed_params)
        return ";".join(parts)

    def __str__(self) -> str:
        return self.descriptor


@dataclass(frozen=True)
class Conjugacy:
    """Affine h(x) = shift + scale * x with source(h(x)) == h(target(x))."""
    shift: Fraction
    scale: Fraction
    source: MapFamily
    source_param: Fraction
    target: MapFamily
    target_param: Fraction

    def __post_init__(self):
        if self.scale == 0:
            raise DegenerateConjugacy(
                f"conjugacy of {self.source.descriptor} at {self.source.param_name}={self.source_param} is constant"
            )


BUILTIN_TEMPLATES: Dict[FamilyName, FamilyTemplate] = {
    FamilyName.QUADRATIC_NORMAL: FamilyTemplate(
        name=FamilyName.QUADRATIC_NORMAL,
        param_name="alpha",
        rule=1 - T * X**2,
        reduction=NormalFormReduction(alpha=T, shift=sp.Integer(0), scale=sp.Integer(1)),
    ),
    FamilyName.S_FIXED_A: FamilyTemplate(
        name=FamilyName.S_FIXED_A,
        param_name="c",
        rule=A - T * X**2,
        fixed_names=("a",),
        fixed_defaults=(None,),
        reduction=NormalFormReduction(alpha=A * T, shift=sp.Integer(0), scale=A),
    ),
    # T_{a,b,c}(x) = a - c(b + x**2); the bound family is S with a <- a - b c.
    FamilyName.T_FIXED_A: FamilyTemplate(
        name=FamilyName.T_FIXED_A,
        param_name="c",
        rule=A - B * T - T * X**2,
        fixed_names=("a", "b"),
        fixed_defaults=(None, Fraction(1)),
        reduction=NormalFormReduction(alpha=(A - B * T) * T, shift=sp.Integer(0), scale=A - B * T),
    ),
    FamilyName.LOGISTIC: FamilyTemplate(
        name=FamilyName.LOGISTIC,
        param_name="mu",
        rule=T * X - T * X**2,
        reduction=NormalFormReduction(
            alpha=(T**2 - 2 * T) / 4,
            shift=sp.Rational(1, 2),
            scale=T / 4 - sp.Rational(1, 2),
        ),
        critical_points=(sp.Rational(1, 2),),
    ),
    FamilyName.CUBIC_EXERCISE: FamilyTemplate(
        name=FamilyName.CUBIC_EXERCISE,
        param_name="c",
        rule=X**3 - 2 * X + T,
        critical_points=(-sp.sqrt(sp.Rational(2, 3)), sp.sqrt(sp.Rational(2, 3))),
    ),
}
