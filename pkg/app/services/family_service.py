from builtins import all, classmethod, dict, enumerate, float, int, isinstance, len, list, max, range, tuple, zip
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union
import logging

import numpy as np
import sympy as sp

from app.exceptions import (
    DegenerateConjugacy, ExactnessRequired, MissingFixedParam, UnknownFamily, FamilySpecError,
)
from app.models.map_family import (
    A, B, BUILTIN_TEMPLATES, Conjugacy, FamilyName, MapFamily, NormalFormReduction, ParamValue,
)
from app.models.polynomial import (
    AlgebraicRoot, ParamPoly, RationalLike, T, UniPoly, X, as_rational, to_sympy,
)
from app.services.poly_service import PolyService

logger = logging.getLogger(__name__)

FIXED_SYMBOLS = {"a": A, "b": B}
NUMERIC_WIDTH = Fraction(1, 2 ** 64)


def _coerce_param(value: Union[ParamValue, RationalLike]) -> ParamValue:
    if isinstance(value, AlgebraicRoot):
        exact = value.rational_value
        return exact if exact is not None else value
    return as_rational(value)


class FamilyService:
    """Builds the registered map families and the maps between them."""

    @classmethod
    def names(cls) -> Sequence[str]:
        return [name.value for name in FamilyName]

    @classmethod
    def builtin(cls, name: Union[str, FamilyName], fixed_params: Iterable[Union[ParamValue, RationalLike]] = ()) -> MapFamily:
        try:
            key = FamilyName(name)
        except ValueError as e:
            logger.error(f"Unknown family requested: {name}")
            raise UnknownFamily(f"unknown family '{name}'; known: {', '.join(cls.names())}") from e
        template = BUILTIN_TEMPLATES[key]
        given = [_coerce_param(v) for v in fixed_params]
        if len(given) > len(template.fixed_names):
            raise FamilySpecError(
                f"{key.value} takes {len(template.fixed_names)} fixed parameter(s), got {len(given)}"
            )
        bound = []
        for i, (fixed_name, default) in enumerate(zip(template.fixed_names, template.fixed_defaults)):
            if i < len(given):
                bound.append((fixed_name, given[i]))
            elif default is not None:
                bound.append((fixed_name, default))
            else:
                logger.error(f"Family {key.value} is missing fixed parameter '{fixed_name}'")
                raise MissingFixedParam(f"{key.value} needs the fixed parameter '{fixed_name}'")

        rational_subs = {FIXED_SYMBOLS[k]: to_sympy(v) for k, v in bound if isinstance(v, Fraction)}
        rule_expr = sp.expand(template.rule.subs(rational_subs))
        exact = all(isinstance(v, Fraction) for _, v in bound)
        rule = ParamPoly.from_expr(rule_expr) if exact else None

        reduction = None
        if template.reduction is not None:
            reduction = NormalFormReduction(
                alpha=sp.expand(template.reduction.alpha.subs(rational_subs)),
                shift=sp.expand(template.reduction.shift.subs(rational_subs)),
                scale=sp.expand(template.reduction.scale.subs(rational_subs)),
            )
        family = MapFamily(
            name=key,
            param_name=template.param_name,
            rule_expr=rule_expr,
            rule=rule,
            fixed_params=tuple(bound),
            reduction=reduction,
            critical_points=template.critical_points,
        )
        logger.debug(f"Built family {family.descriptor}")
        return family

    @classmethod
    def normal_form(cls) -> MapFamily:
        return cls.builtin(FamilyName.QUADRATIC_NORMAL)

    @classmethod
    def _require_exact(cls, family: MapFamily) -> ParamPoly:
        if family.rule is None:
            raise ExactnessRequired(f"{family.descriptor} has an algebraic fixed parameter; no rational rule exists")
        return family.rule

    @classmethod
    def specialize(cls, family: MapFamily, t: RationalLike) -> UniPoly:
        """The map x -> rule(t, x) at a rational parameter."""
        return cls._require_exact(family).specialize(t)

    @classmethod
    def eval_map(cls, family: MapFamily, t: RationalLike, x: RationalLike, iterates: int = 1) -> Fraction:
        if iterates < 1:
            raise ValueError(f"iterates must be >= 1, got {iterates}")
        f_t = cls.specialize(family, t)
        value = as_rational(x)
        for _ in range(iterates):
            value = f_t(value)
        return value

    @classmethod
    def alpha_polynomial(cls, family: MapFamily) -> UniPoly:
        """The reduction t -> alpha(t) as a polynomial in t (rational fixed parameters only)."""
        if family.reduction is None:
            raise ValueError(f"{family.descriptor} has no normal-form reduction")
        if family.algebraic_fixed:
            raise ExactnessRequired(f"{family.descriptor}: reduction has algebraic coefficients")
        return UniPoly.from_expr(family.reduction.alpha, T)

    @classmethod
    def _reduction_in_fixed(cls, expr: sp.Expr, family: MapFamily, t: Fraction) -> AlgebraicRoot:
        """Evaluate a reduction expression at rational t when exactly one fixed parameter is algebraic."""
        algebraic = family.algebraic_fixed
        if len(algebraic) != 1:
            raise ExactnessRequired(f"{family.descriptor}: only one algebraic fixed parameter is supported")
        fixed_name, root = algebraic[0]
        in_fixed = sp.expand(expr.subs(T, to_sympy(t)))
        poly = UniPoly.from_expr(in_fixed, FIXED_SYMBOLS[fixed_name])
        return PolyService.image_of_root(root, poly)

    @classmethod
    def effective_parameter(cls, family: MapFamily, t: Union[ParamValue, RationalLike]) -> ParamValue:
        """Normal-form parameter of ``family`` at t, exact (Fraction or AlgebraicRoot)."""
        if family.reduction is None:
            raise ValueError(f"{family.descriptor} has no normal-form reduction")
        param = _coerce_param(t)
        if family.algebraic_fixed:
            if isinstance(param, AlgebraicRoot):
                raise ExactnessRequired("both the family parameter and a fixed parameter are irrational")
            image = cls._reduction_in_fixed(family.reduction.alpha, family, param)
        elif isinstance(param, AlgebraicRoot):
            image = PolyService.image_of_root(param, cls.alpha_polynomial(family))
        else:
            return cls.alpha_polynomial(family)(param)
        exact = image.rational_value
        return exact if exact is not None else image

    @classmethod
    def conjugacy_scale_sign(cls, family: MapFamily, t: Union[ParamValue, RationalLike]) -> int:
        """Exact sign of the conjugacy scale at t; zero means the conjugacy degenerates."""
        if family.reduction is None:
            raise ValueError(f"{family.descriptor} has no normal-form reduction")
        param = _coerce_param(t)
        if family.algebraic_fixed:
            if isinstance(param, AlgebraicRoot):
                raise ExactnessRequired("both the family parameter and a fixed parameter are irrational")
            image = cls._reduction_in_fixed(family.reduction.scale, family, param)
            return PolyService.compare(image, 0)
        scale = UniPoly.from_expr(family.reduction.scale, T)
        if isinstance(param, AlgebraicRoot):
            return PolyService.sign_at(param, scale)
        return scale.sign_at(param)

    @classmethod
    def conjugacy(cls, family: MapFamily, t: RationalLike) -> Conjugacy:
        """Affine conjugacy from ``family`` at rational t onto the normal form."""
        if family.reduction is None:
            raise ValueError(f"{family.descriptor} has no normal-form reduction")
        cls._require_exact(family)
        t = as_rational(t)
        shift = UniPoly.from_expr(family.reduction.shift, T)(t)
        scale = UniPoly.from_expr(family.reduction.scale, T)(t)
        try:
            return Conjugacy(
                shift=shift,
                scale=scale,
                source=family,
                source_param=t,
                target=cls.normal_form(),
                target_param=cls.alpha_polynomial(family)(t),
            )
        except DegenerateConjugacy:
            logger.error(f"Degenerate conjugacy for {family.descriptor} at {family.param_name}={t}")
            raise

    @classmethod
    def identity_conjugacy(cls, family: MapFamily, t: RationalLike) -> Conjugacy:
        t = as_rational(t)
        return Conjugacy(shift=Fraction(0), scale=Fraction(1), source=family, source_param=t, target=family, target_param=t)

    @classmethod
    def verify_conjugacy(cls, conjugacy: Conjugacy) -> bool:
        """Exact check of F(h(x)) - h(G(x)) == 0."""
        h = UniPoly([conjugacy.shift, conjugacy.scale])
        source = cls.specialize(conjugacy.source, conjugacy.source_param)
        target = cls.specialize(conjugacy.target, conjugacy.target_param)
        difference = PolyService.compose(source, h) - PolyService.compose(h, target)
        if not difference.is_zero:
            logger.warning(f"Conjugacy identity fails for {conjugacy.source.descriptor}: residue {difference!r}")
        return difference.is_zero

    @classmethod
    def numeric_fixed(cls, family: MapFamily) -> dict:
        values = {}
        for k, v in family.fixed_params:
            if isinstance(v, AlgebraicRoot):
                v = PolyService.refine(v, NUMERIC_WIDTH)
            values[FIXED_SYMBOLS[k]] = float(v)
        return values

    @classmethod
    def numeric_rule(cls, family: MapFamily) -> np.ndarray:
        """Coefficient matrix C with rule(t, x) = sum C[i, j] x**i t**j, for vectorised evaluation."""
        expr = sp.expand(family.rule_expr.subs(cls.numeric_fixed(family)))
        poly = sp.Poly(expr, X, T)
        dx, dt = poly.degree(X), poly.degree(T)
        matrix = np.zeros((dx + 1, max(dt, 0) + 1), dtype=float)
        for (i, j), coefficient in poly.terms():
            matrix[i, j] = float(coefficient)
        return matrix

    @classmethod
    def critical_points(cls, family: MapFamily) -> list:
        return [float(p) for p in family.critical_points]

    @classmethod
    def seed_point(cls, family: MapFamily) -> Optional[float]:
        points = cls.critical_points(family)
        return points[0] if points else None

    @classmethod
    def numeric_map(cls, family: MapFamily, t: float) -> np.ndarray:
        """Ascending float coefficients of x -> rule(t, x)."""
        matrix = cls.numeric_rule(family)
        return matrix @ (float(t) ** np.arange(matrix.shape[1]))
