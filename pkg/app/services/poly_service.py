from builtins import any, bool, classmethod, enumerate, int, isinstance, len, list, max, min, range, reversed, sorted, sum, type, zip
from fractions import Fraction
from math import isqrt
from typing import List, Optional, Tuple, Union
import logging

from sympy import Poly
from sympy.polys.polyerrors import ExactQuotientFailed

from app.dependencies import get_settings
from app.exceptions import NonzeroRemainder
from app.models.polynomial import (
    AlgebraicRoot, Interval, ParamPoly, RationalLike, T, UniPoly, X, as_rational,
)

settings = get_settings()
logger = logging.getLogger(__name__)

AnyPoly = Union[UniPoly, ParamPoly]


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def _variations(signs: List[int]) -> int:
    nonzero = [s for s in signs if s]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def default_width() -> Fraction:
    return Fraction(1, 2 ** settings.root_width_exponent)


def _reduce(c: UniPoly, m: UniPoly) -> UniPoly:
    return UniPoly.from_poly(c.poly.rem(m.poly))


def _trim(coefficients: List[UniPoly]) -> List[UniPoly]:
    coefficients = list(coefficients)
    while coefficients and coefficients[-1].is_zero:
        coefficients.pop()
    return coefficients


class PolyService:
    """
    Exact arithmetic on ``UniPoly``/``ParamPoly``: composition, exact division,
    Sturm counting, Descartes counts, perfect squares, resultants and real-root
    isolation with algebraic-number refinement and sign decisions.
    """

    @classmethod
    def compose(cls, outer: AnyPoly, inner: AnyPoly) -> AnyPoly:
        """Return outer(inner(x)); for ``ParamPoly`` operands the parameter is shared."""
        if isinstance(outer, ParamPoly) or isinstance(inner, ParamPoly):
            outer_p = outer if isinstance(outer, ParamPoly) else ParamPoly.from_expr(outer.as_expr())
            inner_p = inner if isinstance(inner, ParamPoly) else ParamPoly.from_expr(inner.as_expr())
            return ParamPoly.from_poly(outer_p.poly.compose(inner_p.poly))
        return UniPoly.from_poly(outer.poly.compose(inner.poly))

    @classmethod
    def iterate(cls, p: AnyPoly, n: int) -> AnyPoly:
        """n-fold self composition, n >= 1."""
        if n < 1:
            raise ValueError(f"iterate needs n >= 1, got {n}")
        result = p
        for _ in range(n - 1):
            result = cls.compose(p, result)
        return result

    @classmethod
    def divide_exact(cls, dividend: AnyPoly, divisor: AnyPoly) -> AnyPoly:
        if divisor.is_zero:
            raise ValueError("division by the zero polynomial")
        try:
            quotient = dividend.poly.exquo(divisor.poly)
        except ExactQuotientFailed as e:
            logger.error(f"Exact division failed: {dividend!r} / {divisor!r}")
            raise NonzeroRemainder(f"{divisor!r} does not divide {dividend!r}") from e
        return type(dividend).from_poly(quotient)

    @classmethod
    def gcd(cls, p: UniPoly, q: UniPoly) -> UniPoly:
        return UniPoly.from_poly(p.poly.gcd(q.poly))

    @classmethod
    def square_free_part(cls, p: UniPoly) -> UniPoly:
        if p.degree <= 0:
            return p
        return UniPoly.from_poly(p.poly.sqf_part())

    @classmethod
    def sturm_chain(cls, p: UniPoly) -> List[UniPoly]:
        """Sturm chain of the square-free part of p."""
        sqf = cls.square_free_part(p)
        if sqf.degree <= 0:
            return [sqf]
        return [UniPoly.from_poly(s) for s in sqf.poly.sturm()]

    @classmethod
    def _variations_at(cls, chain: List[UniPoly], value: Fraction) -> int:
        return _variations([s.sign_at(value) for s in chain])

    @classmethod
    def _variations_at_infinity(cls, chain: List[UniPoly], positive: bool) -> int:
        signs = []
        for s in chain:
            if s.is_zero:
                continue
            sign = _sign(s.leading_coefficient)
            if not positive and s.degree % 2:
                sign = -sign
            signs.append(sign)
        return _variations(signs)

    @classmethod
    def sturm_count(cls, p: UniPoly, interval: Optional[Interval] = None) -> int:
        """Number of distinct real roots of p in the closed interval (whole line when omitted)."""
        if p.is_zero:
            raise ValueError("sturm_count of the zero polynomial")
        chain = cls.sturm_chain(p)
        if interval is None:
            return cls._variations_at_infinity(chain, False) - cls._variations_at_infinity(chain, True)
        count = cls._variations_at(chain, interval.lo) - cls._variations_at(chain, interval.hi)
        if chain[0].sign_at(interval.lo) == 0:
            count += 1
        return count

    @classmethod
    def count_positive_roots(cls, p: UniPoly) -> int:
        """Distinct real roots in (0, inf)."""
        if p.is_zero:
            raise ValueError("count_positive_roots of the zero polynomial")
        chain = cls.sturm_chain(p)
        return cls._variations_at(chain, Fraction(0)) - cls._variations_at_infinity(chain, True)

    @classmethod
    def descartes_changes(cls, p: UniPoly) -> int:
        if p.is_zero:
            raise ValueError("descartes_changes of the zero polynomial")
        return _variations([_sign(c) for c in p.coefficients])

    @classmethod
    def perfect_square_decompose(cls, p: UniPoly) -> Optional[UniPoly]:
        """Return q with q**2 == p and positive leading coefficient, or None."""
        if p.is_zero:
            raise ValueError("perfect_square_decompose of the zero polynomial")
        if p.degree % 2 or p.leading_coefficient < 0:
            return None
        coeff, factors = p.poly.sqf_list()
        if any(k % 2 for _, k in factors):
            return None
        root_coeff = _rational_sqrt(as_rational(coeff))
        if root_coeff is None:
            return None
        q = UniPoly.constant(root_coeff)
        for factor, k in factors:
            q = q * UniPoly.from_poly(factor) ** (k // 2)
        if q.leading_coefficient < 0:
            q = -q
        if q * q != p:
            logger.error(f"Square-free decomposition of {p!r} did not reassemble")
            return None
        return q

    @classmethod
    def resultant_x(cls, p: ParamPoly, q: ParamPoly) -> UniPoly:
        """Resultant with respect to x (Sylvester convention), a polynomial in t."""
        if p.is_zero or q.is_zero:
            raise ValueError("resultant of a zero polynomial")
        dp, dq = p.degree, q.degree
        if dp == 0:
            return p.leading_coefficient ** dq
        if dq == 0:
            return q.leading_coefficient ** dp
        cp, p_int = p.poly.clear_denoms(convert=True)
        cq, q_int = q.poly.clear_denoms(convert=True)
        scaled = p_int.resultant(q_int)
        scale = as_rational(cp) ** dq * as_rational(cq) ** dp
        if isinstance(scaled, Poly):
            result = UniPoly.from_expr(scaled.as_expr(), T)
        else:
            result = UniPoly.constant(as_rational(scaled))
        return result * (1 / scale)

    @classmethod
    def resultant(cls, p: UniPoly, q: UniPoly) -> Fraction:
        if p.is_zero or q.is_zero:
            raise ValueError("resultant of a zero polynomial")
        if p.degree == 0:
            return p.leading_coefficient ** q.degree
        if q.degree == 0:
            return q.leading_coefficient ** p.degree
        return as_rational(p.poly.resultant(q.poly))

    @classmethod
    def algebraic_root(cls, defining: UniPoly, isolator: Interval) -> AlgebraicRoot:
        """Build an ``AlgebraicRoot`` after checking the isolating property."""
        sqf = cls.square_free_part(defining)
        if cls.sturm_count(sqf, isolator) != 1:
            raise ValueError(f"{isolator} does not isolate exactly one root of {defining!r}")
        return AlgebraicRoot(sqf, isolator)

    @classmethod
    def _step_off(cls, p: UniPoly, root: Fraction, towards: Fraction) -> Fraction:
        """A rational between ``root`` and ``towards`` with no root of p on it or between it and ``root``."""
        candidate = (root + towards) / 2
        while p.sign_at(candidate) == 0 or cls.sturm_count(p, Interval(min(root, candidate), max(root, candidate))) > 1:
            candidate = (root + candidate) / 2
        return candidate

    @classmethod
    def _closed_isolator(cls, p: UniPoly, lo: Fraction, hi: Fraction) -> Interval:
        """
        Turn an isolator whose endpoints may be roots of neighbouring isolators
        into a closed interval holding exactly one root of the square-free p.
        """
        if lo == hi or cls.sturm_count(p, Interval(lo, hi)) <= 1:
            return Interval(lo, hi)
        if p.sign_at(lo) == 0:
            lo = cls._step_off(p, lo, hi)
        if p.sign_at(hi) == 0 and cls.sturm_count(p, Interval(lo, hi)) > 1:
            hi = cls._step_off(p, hi, lo)
        return Interval(lo, hi)

    @classmethod
    def isolate_real_roots(cls, p: UniPoly, width: Optional[Fraction] = None) -> List[AlgebraicRoot]:
        """One disjoint closed isolator per distinct real root, ascending."""
        if p.is_zero:
            raise ValueError("isolate_real_roots of the zero polynomial")
        if p.degree <= 0:
            return []
        sqf = cls.square_free_part(p)
        roots = []
        for lo, hi in sqf.poly.intervals(sqf=True):
            root = AlgebraicRoot(sqf, cls._closed_isolator(sqf, as_rational(lo), as_rational(hi)))
            if root.isolator.is_point or sqf.degree == 1:
                root = cls.refine(root, Fraction(0))
            roots.append(root)
        roots = sorted(roots, key=lambda r: r.isolator.lo)
        for i in range(1, len(roots)):
            while roots[i - 1].isolator.intersects(roots[i].isolator):
                roots[i - 1] = cls.refine(roots[i - 1], roots[i - 1].isolator.width / 2)
                roots[i] = cls.refine(roots[i], roots[i].isolator.width / 2)
        if width is not None:
            roots = [cls.refine(r, width) for r in roots]
        return roots

    @classmethod
    def refine(cls, root: AlgebraicRoot, width: Optional[RationalLike] = None) -> AlgebraicRoot:
        """Bisect the isolator until its width is at most ``width`` (default 2**-40)."""
        target = default_width() if width is None else as_rational(width)
        p, iso = root.defining, root.isolator
        if iso.is_point:
            return root
        if p.degree == 1:
            c0, c1 = p.coefficients
            return AlgebraicRoot(p, Interval.point(-c0 / c1))
        lo, hi = iso.lo, iso.hi
        s_lo, s_hi = p.sign_at(lo), p.sign_at(hi)
        if s_lo == 0 or s_hi == 0:
            if cls.sturm_count(p, iso) == 1:
                return AlgebraicRoot(p, Interval.point(lo if s_lo == 0 else hi))
            iso = cls._closed_isolator(p, lo, hi)
            lo, hi = iso.lo, iso.hi
            s_lo = p.sign_at(lo)
        while hi - lo > target:
            mid = (lo + hi) / 2
            s_mid = p.sign_at(mid)
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        return AlgebraicRoot(p, Interval(lo, hi))

    @classmethod
    def sign_at(cls, root: AlgebraicRoot, p: UniPoly) -> int:
        """Exact sign of p at the algebraic number ``root``."""
        if p.is_zero:
            return 0
        value = root.rational_value
        if value is not None:
            return p.sign_at(value)
        common = cls.gcd(root.defining, p)
        if common.degree >= 1 and cls.sturm_count(common, root.isolator) >= 1:
            return 0
        current = root
        while cls.sturm_count(p, current.isolator) > 0:
            current = cls.refine(current, current.isolator.width / 4)
        return p.sign_at(current.isolator.midpoint)

    @classmethod
    def compare(cls, first: Union[AlgebraicRoot, RationalLike], second: Union[AlgebraicRoot, RationalLike]) -> int:
        """Sign of first - second for algebraic or rational operands."""
        a = first if isinstance(first, AlgebraicRoot) else AlgebraicRoot.from_rational(first)
        b = second if isinstance(second, AlgebraicRoot) else AlgebraicRoot.from_rational(second)
        va, vb = a.rational_value, b.rational_value
        if va is not None and vb is not None:
            return _sign(va - vb)
        if va is not None:
            return -cls.sign_at(b, UniPoly([-va, 1]))
        if vb is not None:
            return cls.sign_at(a, UniPoly([-vb, 1]))
        common = cls.gcd(a.defining, b.defining)
        overlap = a.isolator.intersection(b.isolator)
        if common.degree >= 1 and overlap is not None and cls.sturm_count(common, overlap) >= 1:
            return 0
        while a.isolator.intersects(b.isolator):
            a = cls.refine(a, a.isolator.width / 2)
            b = cls.refine(b, b.isolator.width / 2)
        return -1 if a.isolator.hi < b.isolator.lo else 1

    @classmethod
    def separate(cls, root: AlgebraicRoot, others: List[AlgebraicRoot]) -> AlgebraicRoot:
        """Refine ``root`` until its isolator meets none of the other isolators; others must differ from root."""
        current = root
        for other in others:
            while current.isolator.intersects(other.isolator):
                current = cls.refine(current, current.isolator.width / 2)
                other = cls.refine(other, other.isolator.width / 2)
                if current.isolator.is_point and other.isolator.is_point and current.isolator == other.isolator:
                    raise ValueError("cannot separate equal algebraic numbers")
        return current

    @classmethod
    def evaluate_interval(cls, p: UniPoly, interval: Interval) -> Interval:
        """Horner evaluation in interval arithmetic; encloses p over the interval."""
        result = Interval.point(0)
        for c in reversed(p.coefficients):
            result = result * interval + c
        return result

    @classmethod
    def rational_roots(cls, p: UniPoly) -> List[Fraction]:
        """Distinct rational roots, read off the linear factors of p."""
        if p.degree <= 0:
            return []
        _, factors = p.poly.factor_list()
        roots = []
        for factor, _ in factors:
            if factor.degree() == 1:
                c1, c0 = factor.all_coeffs()
                roots.append(-as_rational(c0) / as_rational(c1))
        return sorted(roots)

    @classmethod
    def rational_value(cls, root: AlgebraicRoot) -> Optional[Fraction]:
        """The value of ``root`` when it is rational."""
        value = root.rational_value
        if value is not None:
            return value
        for q in cls.rational_roots(root.defining):
            if root.isolator.contains(q):
                return q
        return None

    @classmethod
    def image_of_root(cls, root: AlgebraicRoot, p: UniPoly) -> AlgebraicRoot:
        """Exact p(root): defining polynomial Res_y(m(y), s - p(y)), isolator chosen by interval evaluation."""
        value = root.rational_value
        if value is not None:
            return AlgebraicRoot.from_rational(p(value))
        minimal = ParamPoly.from_expr(root.defining.as_expr(X))
        relation = ParamPoly.from_expr(T - p.as_expr(X))
        image_defining = cls.resultant_x(minimal, relation)
        candidates = cls.isolate_real_roots(image_defining)
        current = root
        while True:
            enclosure = cls.evaluate_interval(p, current.isolator)
            hits = [c for c in candidates if c.isolator.intersects(enclosure)]
            if len(hits) == 1:
                break
            current = cls.refine(current, current.isolator.width / 4)
            candidates = [cls.refine(c, c.isolator.width / 2) if c in hits else c for c in candidates]
        image = hits[0]
        exact = cls.rational_value(image)
        return AlgebraicRoot.from_rational(exact) if exact is not None else image

    @classmethod
    def minimal_polynomial(cls, root: AlgebraicRoot) -> UniPoly:
        """The irreducible factor of the defining polynomial that vanishes at ``root``."""
        _, factors = root.defining.poly.factor_list()
        for factor, _ in factors:
            candidate = UniPoly.from_poly(factor)
            if candidate.degree > 0 and cls.sign_at(root, candidate) == 0:
                return candidate
        raise ValueError(f"no factor of {root.defining!r} vanishes at {root}")

    @classmethod
    def _field_rem(cls, a: List[UniPoly], b: List[UniPoly], m: UniPoly) -> List[UniPoly]:
        """Remainder of a by b in Q(theta)[x], m(theta) = 0; coefficient lists ascending in x, reduced mod m."""
        inverse = UniPoly.from_poly(b[-1].poly.invert(m.poly))
        a = list(a)
        while len(a) >= len(b):
            factor = _reduce(a[-1] * inverse, m)
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] = _reduce(a[shift + i] - factor * c, m)
            a = _trim(a)
        return a

    @classmethod
    def _field_sturm_count(cls, g: List[UniPoly], m: UniPoly, root: AlgebraicRoot) -> int:
        if len(g) < 2:
            return 0
        chain = [g, _trim([_reduce(c * i, m) for i, c in enumerate(g)][1:])]
        while True:
            remainder = cls._field_rem(chain[-2], chain[-1], m)
            if not remainder:
                break
            chain.append([-c for c in remainder])
        at_plus = [cls.sign_at(root, s[-1]) for s in chain]
        at_minus = [sign if len(s) % 2 else -sign for sign, s in zip(at_plus, chain)]
        return _variations(at_minus) - _variations(at_plus)

    @classmethod
    def common_roots_at(cls, p: ParamPoly, q: ParamPoly, root: AlgebraicRoot) -> Tuple[int, int]:
        """
        Degree and number of distinct real roots of gcd(p(root, x), q(root, x)).

        The gcd is taken in Q(root)[x]: coefficients are polynomials in the parameter
        reduced modulo the minimal polynomial of ``root``, and the Sturm signs at
        infinity are exact signs of those coefficients at ``root``.
        """
        m = cls.minimal_polynomial(root)
        a = _trim([_reduce(c, m) for c in p.coefficients])
        b = _trim([_reduce(c, m) for c in q.coefficients])
        if not a and not b:
            raise ValueError(f"both polynomials vanish at {root}")
        while b:
            a, b = b, cls._field_rem(a, b, m)
        return len(a) - 1, cls._field_sturm_count(a, m, root)
