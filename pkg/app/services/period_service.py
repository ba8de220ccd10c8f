from builtins import bool, classmethod, float, int, isinstance, len, list, range, str
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple, Union
import logging

from app.dependencies import get_settings
from app.exceptions import (
    DegenerateConjugacy, ExactnessRequired, LeadingCoefficientVanishes, PeriodCapExceeded,
)
from app.models.map_family import MapFamily, ParamValue
from app.models.polynomial import AlgebraicRoot, ParamPoly, RationalLike, UniPoly, as_rational
from app.schemas.period_schemas import DynatomicResult, PeriodCount, SquareCertificate, TangentLocus
from app.services.event_service import EventService, EventTypes
from app.services.family_service import FamilyService
from app.services.poly_service import PolyService

settings = get_settings()
logger = logging.getLogger(__name__)


def proper_divisors(n: int) -> List[int]:
    return [d for d in range(1, n) if n % d == 0]


@lru_cache(maxsize=64)
def _dynatomic_poly(rule: ParamPoly, n: int) -> ParamPoly:
    """f^n(x) - x with the period-d factor divided out exactly, recursively, for every proper divisor d of n."""
    phi = PolyService.iterate(rule, n) - UniPoly.identity()
    for d in proper_divisors(n):
        phi = PolyService.divide_exact(phi, _dynatomic_poly(rule, d))
    return phi


@lru_cache(maxsize=64)
def _discriminant_locus(rule: ParamPoly, n: int) -> UniPoly:
    phi = _dynatomic_poly(rule, n)
    return PolyService.resultant_x(phi, phi.derivative_x())


@lru_cache(maxsize=64)
def _critical_locus(rule: ParamPoly, n: int) -> Tuple[AlgebraicRoot, ...]:
    phi = _dynatomic_poly(rule, n)
    locus = _discriminant_locus(rule, n) * phi.leading_coefficient
    for d in proper_divisors(n):
        locus = locus * PolyService.resultant_x(phi, _dynatomic_poly(rule, d))
    if locus.is_zero:
        raise ValueError(f"critical locus of period {n} vanishes identically")
    return tuple(PolyService.isolate_real_roots(locus))


def _param_label(value: Union[ParamValue, RationalLike]) -> str:
    return str(value if isinstance(value, AlgebraicRoot) else as_rational(value))


class PeriodService:
    """
    Period-n divisor polynomials and what they say about a family: point counts,
    tangent (fold) parameters and perfect-square certificates.
    """

    @classmethod
    def _check_period(cls, n: int) -> None:
        if n < 1:
            raise ValueError(f"period must be >= 1, got {n}")
        if n > settings.period_cap:
            logger.error(f"Period {n} exceeds the cap {settings.period_cap}")
            raise PeriodCapExceeded(f"period {n} exceeds the cap {settings.period_cap}")

    @classmethod
    def dynatomic(cls, family: MapFamily, n: int) -> DynatomicResult:
        cls._check_period(n)
        if family.rule is None:
            raise ExactnessRequired(f"{family.descriptor} has no rational rule; use the normal form")
        phi = _dynatomic_poly(family.rule, n)
        return DynatomicResult(n=n, phi=phi, factor_checked=True, divisors=proper_divisors(n))

    @classmethod
    def critical_parameters(cls, family: MapFamily, n: int) -> List[AlgebraicRoot]:
        """Real parameters where the real-root count of phi can change: multiple roots, degree drops, lower-period collisions."""
        cls._check_period(n)
        cls.dynatomic(family, n)
        return list(_critical_locus(family.rule, n))

    @classmethod
    def _count_exact(cls, family: MapFamily, n: int, t: Fraction, strict: bool) -> PeriodCount:
        phi = cls.dynatomic(family, n).phi
        phi_t = phi.specialize(t)
        drops = phi_t.degree < phi.degree
        if drops:
            logger.warning(f"Leading x-coefficient of phi_{n} vanishes at {family.param_name}={t} for {family.descriptor}")
            if strict:
                raise LeadingCoefficientVanishes(f"phi_{n} drops degree at {family.param_name}={t}")
        if phi_t.is_zero:
            raise LeadingCoefficientVanishes(f"phi_{n} vanishes identically at {family.param_name}={t}")
        count = PolyService.sturm_count(phi_t) if phi_t.degree > 0 else 0
        shared = []
        for d in proper_divisors(n):
            lower = cls.dynatomic(family, d).phi.specialize(t)
            if lower.is_zero:
                continue
            common = PolyService.gcd(phi_t, lower)
            if common.degree > 0 and PolyService.sturm_count(common) > 0:
                shared.append(d)
        if shared:
            logger.warning(f"phi_{n} shares real roots with periods {shared} at {family.param_name}={t}")
        return PeriodCount(
            family=family.descriptor,
            n=n,
            param=str(t),
            count=count,
            lower_period_flag=bool(shared),
            shared_periods=shared,
            leading_coefficient_vanishes=drops,
            method="sturm",
        )

    @classmethod
    def _count_by_reduction(cls, family: MapFamily, n: int, t: ParamValue, strict: bool) -> PeriodCount:
        if family.reduction is None:
            raise ExactnessRequired(f"{family.descriptor} has no normal-form reduction for an irrational parameter")
        if FamilyService.conjugacy_scale_sign(family, t) == 0:
            raise DegenerateConjugacy(f"conjugacy of {family.descriptor} degenerates at {family.param_name}={t}")
        alpha = FamilyService.effective_parameter(family, t)
        normal = FamilyService.normal_form()
        if isinstance(alpha, Fraction):
            inner = cls._count_exact(normal, n, alpha, strict)
        else:
            inner = cls._count_in_cell(normal, n, alpha)
        logger.debug(f"Counted period {n} of {family.descriptor} at {t} through alpha={alpha}")
        return inner.model_copy(update={"family": family.descriptor, "param": _param_label(t), "method": "reduction"})

    @classmethod
    def _count_in_cell(cls, family: MapFamily, n: int, t: AlgebraicRoot) -> PeriodCount:
        critical = cls.critical_parameters(family, n)
        for c in critical:
            if PolyService.compare(t, c) == 0:
                raise ExactnessRequired(
                    f"{family.param_name}={t} is a critical parameter of period {n}; count it at a rational value"
                )
        separated = PolyService.separate(t, critical)
        sample = separated.isolator.midpoint
        return cls._count_exact(family, n, sample, strict=False).model_copy(update={"param": str(t)})

    @classmethod
    def count_period_points(
        cls, family: MapFamily, n: int, t: Union[ParamValue, RationalLike], strict: bool = False,
    ) -> PeriodCount:
        """Distinct real roots of phi_n at t, with lower-period and degree-drop flags."""
        cls._check_period(n)
        param = t
        if isinstance(param, AlgebraicRoot):
            exact = PolyService.rational_value(param)
            param = exact if exact is not None else param
        else:
            param = as_rational(param)
        if family.rule is not None and isinstance(param, Fraction):
            return cls._count_exact(family, n, param, strict)
        if family.rule is not None and family.reduction is None:
            return cls._count_in_cell(family, n, param)
        return cls._count_by_reduction(family, n, param, strict)

    @classmethod
    def _has_real_double_root(cls, phi_t: UniPoly) -> bool:
        common = PolyService.gcd(phi_t, phi_t.derivative())
        return common.degree > 0 and PolyService.sturm_count(common) > 0

    @classmethod
    def _certify(cls, family: MapFamily, n: int, candidate: AlgebraicRoot) -> Optional[str]:
        """How a real multiple root of phi at ``candidate`` was proven, or None when all multiple roots are complex."""
        phi = cls.dynatomic(family, n).phi
        exact = PolyService.rational_value(candidate)
        if exact is not None:
            return "rational-gcd" if cls._has_real_double_root(phi.specialize(exact)) else None
        degree, real = PolyService.common_roots_at(phi, phi.derivative_x(), candidate)
        logger.debug(f"gcd(phi_{n}, phi_{n}') at {candidate}: degree {degree}, {real} real root(s)")
        return "algebraic-gcd" if real > 0 else None

    @classmethod
    def tangent_parameters(cls, family: MapFamily, n: int, positive_only: bool = True) -> TangentLocus:
        """Parameters where phi(t, .) has a real multiple root, each certified."""
        cls._check_period(n)
        phi = cls.dynatomic(family, n).phi
        resultant = _discriminant_locus(family.rule, n)
        if resultant.is_zero:
            raise ValueError(f"phi_{n} of {family.descriptor} has a repeated factor for every parameter")
        candidates = PolyService.isolate_real_roots(resultant) if resultant.degree > 0 else []
        if positive_only:
            candidates = [c for c in candidates if PolyService.compare(c, 0) > 0]
        params, methods, rejected = [], [], []
        for candidate in candidates:
            method = cls._certify(family, n, candidate)
            exact = PolyService.rational_value(candidate)
            root = AlgebraicRoot.from_rational(exact) if exact is not None else candidate
            if method is None:
                rejected.append(root)
                continue
            params.append(root)
            methods.append(method)
            EventService.publish(EventTypes.TANGENT_FOUND, {
                "family": family.descriptor, "n": n, "param": str(root), "approx": float(root), "method": method,
            })
        logger.info(f"Period {n} of {family.descriptor}: {len(params)} tangent parameter(s), {len(rejected)} rejected")
        return TangentLocus(n=n, params=params, certificate=resultant, methods=methods, rejected=rejected)

    @classmethod
    def square_certificate(cls, family: MapFamily, n: int, t0: RationalLike) -> SquareCertificate:
        t0 = as_rational(t0)
        phi_t = cls.dynatomic(family, n).phi.specialize(t0)
        root = None
        if not phi_t.is_zero and phi_t.degree % 2 == 0:
            root = PolyService.perfect_square_decompose(phi_t)
        return SquareCertificate(n=n, param=str(t0), root=root)

    @classmethod
    def square_root_coefficients(cls, alpha: RationalLike) -> UniPoly:
        """Closed-form q = a x^3 + b x^2 + c x + d with q**2 = phi_3(alpha, x) at the fold of the normal form."""
        alpha = as_rational(alpha)
        a = alpha ** 3
        b = -alpha ** 2 / 2
        c = -3 * alpha ** 2 / 2 + 3 * alpha / 8
        d = alpha / 4 - Fraction(5, 16)
        return UniPoly([d, c, b, a])
