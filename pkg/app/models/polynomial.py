"""
Exact polynomial types shared by every symbolic service.

``UniPoly`` and ``ParamPoly`` wrap sympy ``Poly`` objects over ``QQ`` and are
never mutated after construction. A ``UniPoly`` is read in whatever variable the
caller means (x for maps, t for resultants); internally it always uses ``X``.
A ``ParamPoly`` is a polynomial in ``X`` whose coefficients are polynomials in
the parameter ``T``.
"""
from builtins import bool, float, int, isinstance, len, max, min, reversed, str, tuple
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

import sympy as sp
from sympy import Poly, QQ

X, T = sp.symbols("x t")

RationalLike = Union[Fraction, int, float, str, sp.Rational]


def as_rational(value: RationalLike) -> Fraction:
    """Convert ints, decimal strings, ``p/q`` strings, floats and sympy rationals to ``Fraction``.

    Floats go through their shortest repr, so ``2.658`` becomes ``1329/500``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    numerator = getattr(value, "numerator", None)
    denominator = getattr(value, "denominator", None)
    if numerator is not None and denominator is not None:
        return Fraction(int(numerator), int(denominator))
    raise TypeError(f"cannot read {value!r} as a rational number")


def to_sympy(value: RationalLike) -> sp.Rational:
    q = as_rational(value)
    return sp.Rational(q.numerator, q.denominator)


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class Interval:
    """Closed rational interval [lo, hi]; supports the interval arithmetic used for sign decisions."""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, value: RationalLike) -> "Interval":
        q = as_rational(value)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: Union[RationalLike, float]) -> bool:
        if isinstance(value, float):
            return float(self.lo) <= value <= float(self.hi)
        q = as_rational(value)
        return self.lo <= q <= self.hi

    def intersection(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def intersects(self, other: "Interval") -> bool:
        return self.intersection(other) is not None

    def as_floats(self) -> Tuple[float, float]:
        return float(self.lo), float(self.hi)

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other) -> "Interval":
        other = self._coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        other = self._coerce(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class UniPoly:
    """Univariate polynomial with rational coefficients, given in ascending degree order."""
    __slots__ = ("_poly",)

    def __init__(self, coefficients: Iterable[RationalLike] = ()):
        coeffs = [to_sympy(c) for c in coefficients]
        self._poly = Poly(list(reversed(coeffs)) or [0], X, domain=QQ)

    @classmethod
    def from_poly(cls, poly: Poly) -> "UniPoly":
        if poly.gens != (X,):
            if len(poly.gens) != 1:
                raise ValueError(f"expected a univariate polynomial, got generators {poly.gens}")
            poly = poly.replace(poly.gen, X)
        obj = cls.__new__(cls)
        obj._poly = poly.set_domain(QQ)
        return obj

    @classmethod
    def from_expr(cls, expr, gen: sp.Symbol = X) -> "UniPoly":
        return cls.from_poly(Poly(expr, gen, domain=QQ))

    @classmethod
    def constant(cls, value: RationalLike) -> "UniPoly":
        return cls([value])

    @classmethod
    def identity(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def poly(self) -> Poly:
        return self._poly

    @property
    def is_zero(self) -> bool:
        return self._poly.is_zero

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else self._poly.degree()

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        if self.is_zero:
            return ()
        return tuple(as_rational(c) for c in reversed(self._poly.all_coeffs()))

    @property
    def leading_coefficient(self) -> Fraction:
        return as_rational(self._poly.LC())

    def float_coefficients(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.coefficients)

    def as_expr(self, gen: sp.Symbol = X):
        return self._poly.as_expr().subs(X, gen) if gen != X else self._poly.as_expr()

    def __call__(self, value: RationalLike) -> Fraction:
        return as_rational(self._poly.eval(to_sympy(value)))

    def sign_at(self, value: RationalLike) -> int:
        return _sign(self(value))

    def derivative(self) -> "UniPoly":
        return UniPoly.from_poly(self._poly.diff(X))

    def _coerce(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly.constant(other)

    def __add__(self, other) -> "UniPoly":
        return UniPoly.from_poly(self._poly + self._coerce(other)._poly)

    __radd__ = __add__

    def __sub__(self, other) -> "UniPoly":
        return UniPoly.from_poly(self._poly - self._coerce(other)._poly)

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        return UniPoly.from_poly(self._poly * self._coerce(other)._poly)

    __rmul__ = __mul__

    def __neg__(self) -> "UniPoly":
        return UniPoly.from_poly(-self._poly)

    def __pow__(self, exponent: int) -> "UniPoly":
        return UniPoly.from_poly(self._poly ** exponent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"UniPoly({self._poly.as_expr()})"


class ParamPoly:
    """Polynomial in x whose coefficients are polynomials in the parameter t."""
    __slots__ = ("_poly",)

    def __init__(self, coefficients: Iterable[Union[UniPoly, RationalLike]] = ()):
        expr = sp.Integer(0)
        for power, coefficient in enumerate(coefficients):
            if isinstance(coefficient, UniPoly):
                coefficient_expr = coefficient.as_expr(T)
            else:
                coefficient_expr = to_sympy(coefficient)
            expr += coefficient_expr * X ** power
        self._poly = Poly(expr, X, T, domain=QQ)

    @classmethod
    def from_poly(cls, poly: Poly) -> "ParamPoly":
        obj = cls.__new__(cls)
        obj._poly = poly if poly.gens == (X, T) else Poly(poly.as_expr(), X, T, domain=QQ)
        obj._poly = obj._poly.set_domain(QQ)
        return obj

    @classmethod
    def from_expr(cls, expr) -> "ParamPoly":
        return cls.from_poly(Poly(expr, X, T, domain=QQ))

    @property
    def poly(self) -> Poly:
        return self._poly

    @property
    def is_zero(self) -> bool:
        return self._poly.is_zero

    @property
    def degree(self) -> int:
        """Degree in x; -1 for the zero polynomial."""
        return -1 if self.is_zero else self._poly.degree(X)

    @property
    def coefficients(self) -> Tuple[UniPoly, ...]:
        if self.is_zero:
            return ()
        in_x = Poly(self._poly.as_expr(), X)
        return tuple(UniPoly.from_expr(c, T) for c in reversed(in_x.all_coeffs()))

    @property
    def leading_coefficient(self) -> UniPoly:
        return self.coefficients[-1]

    def specialize(self, t0: RationalLike) -> UniPoly:
        return UniPoly.from_poly(self._poly.eval(T, to_sympy(t0)))

    def derivative_x(self) -> "ParamPoly":
        return ParamPoly.from_poly(self._poly.diff(X))

    def as_expr(self):
        return self._poly.as_expr()

    def _coerce(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, UniPoly):
            return ParamPoly.from_expr(other.as_expr(X))
        return ParamPoly([other])

    def __add__(self, other) -> "ParamPoly":
        return ParamPoly.from_poly(self._poly + self._coerce(other)._poly)

    __radd__ = __add__

    def __sub__(self, other) -> "ParamPoly":
        return ParamPoly.from_poly(self._poly - self._coerce(other)._poly)

    def __mul__(self, other) -> "ParamPoly":
        return ParamPoly.from_poly(self._poly * self._coerce(other)._poly)

    __rmul__ = __mul__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly.from_poly(-self._poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return (self._poly - other._poly).is_zero

    def __hash__(self) -> int:
        return hash(self._poly.as_expr())

    def __repr__(self) -> str:
        return f"ParamPoly({self._poly.as_expr()})"


@dataclass(frozen=True)
class AlgebraicRoot:
    """A real algebraic number: the unique root of ``defining`` inside ``isolator``.

    Construct through ``PolyService`` (``isolate_real_roots``, ``algebraic_root``) so the
    isolating property is Sturm-checked; refinement also lives there.
    """
    defining: UniPoly
    isolator: Interval

    @classmethod
    def from_rational(cls, value: RationalLike) -> "AlgebraicRoot":
        q = as_rational(value)
        return cls(UniPoly([-q, 1]), Interval.point(q))

    @property
    def is_rational(self) -> bool:
        return self.defining.degree == 1 or self.isolator.is_point

    @property
    def rational_value(self) -> Optional[Fraction]:
        if self.isolator.is_point:
            return self.isolator.lo
        if self.defining.degree == 1:
            c0, c1 = self.defining.coefficients
            return -c0 / c1
        return None

    def __float__(self) -> float:
        value = self.rational_value
        return float(value if value is not None else self.isolator.midpoint)

    def __str__(self) -> str:
        value = self.rational_value
        if value is not None:
            return str(value)
        return f"root of {self.defining.as_expr()} in {self.isolator}"
