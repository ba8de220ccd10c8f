from builtins import abs, float, isinstance, len, range, reversed, set
from fractions import Fraction

import numpy as np
import pytest
from faker import Faker

from app.exceptions import DegenerateConjugacy, ExactnessRequired, FamilySpecError, MissingFixedParam, UnknownFamily
from app.models.map_family import FamilyName
from app.models.polynomial import AlgebraicRoot, UniPoly
from app.services.family_service import FamilyService
from app.services.period_service import PeriodService
from app.services.poly_service import PolyService
from tests.conftest import fake, random_rational


def _sqrt(n):
    return PolyService.isolate_real_roots(UniPoly([-n, 0, 1]))[-1]


def test_names_lists_every_family():
    assert set(FamilyService.names()) == {"quadratic-normal", "S-fixed-a", "T-fixed-a", "logistic", "cubic-exercise"}


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        FamilyService.builtin("henon")


def test_missing_fixed_parameter():
    with pytest.raises(MissingFixedParam):
        FamilyService.builtin(FamilyName.S_FIXED_A)


def test_too_many_fixed_parameters():
    with pytest.raises(FamilySpecError):
        FamilyService.builtin(FamilyName.S_FIXED_A, [1, 2])


def test_t_family_defaults_b_to_one(t_family):
    assert t_family.fixed == {"a": Fraction(1329, 500), "b": Fraction(1)}
    assert t_family.descriptor == "family=T-fixed-a;a=1329/500;b=1"
    assert t_family.is_exact


def test_descriptor_of_algebraic_fixed_parameter():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    assert family.descriptor == "family=T-fixed-a;a=sqrt7;b=1"
    assert not family.is_exact
    assert family.rule is None


def test_specialize_requires_rational_rule():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    with pytest.raises(ExactnessRequired):
        FamilyService.specialize(family, 1)


@pytest.mark.parametrize("name, fixed, t, x, expected", [
    (FamilyName.QUADRATIC_NORMAL, [], 2, Fraction(1, 2), Fraction(1, 2)),
    (FamilyName.S_FIXED_A, [2], Fraction(7, 8), 1, Fraction(9, 8)),
    (FamilyName.T_FIXED_A, ["2.658"], 1, 0, Fraction(829, 500)),
    (FamilyName.LOGISTIC, [], 4, Fraction(1, 2), 1),
    (FamilyName.CUBIC_EXERCISE, [], Fraction(1, 3), 1, Fraction(-2, 3)),
])
def test_eval_map(name, fixed, t, x, expected):
    assert FamilyService.eval_map(FamilyService.builtin(name, fixed), t, x) == expected


def test_eval_map_iterates(normal_family):
    # 0 -> 1 -> -1 -> -1 under 1 - 2x**2
    assert FamilyService.eval_map(normal_family, 2, 0, iterates=3) == -1


@pytest.mark.parametrize("name, fixed, t", [
    (FamilyName.S_FIXED_A, [2], Fraction(7, 8)),
    (FamilyName.S_FIXED_A, [Fraction(-3, 2)], Fraction(5, 3)),
    (FamilyName.T_FIXED_A, ["2.658"], Fraction(13, 10)),
    (FamilyName.T_FIXED_A, [3, Fraction(1, 2)], Fraction(2, 7)),
    (FamilyName.LOGISTIC, [], Fraction(39, 10)),
    (FamilyName.LOGISTIC, [], Fraction(1, 3)),
])
def test_conjugacy_identity_holds(name, fixed, t):
    """
    Tests that h(x) = shift + scale x maps the normal form onto the family exactly.
    """
    family = FamilyService.builtin(name, fixed)
    conjugacy = FamilyService.conjugacy(family, t)
    assert FamilyService.verify_conjugacy(conjugacy)
    assert conjugacy.target_param == FamilyService.effective_parameter(family, t)


def test_identity_conjugacy_verifies(cubic_family):
    assert FamilyService.verify_conjugacy(FamilyService.identity_conjugacy(cubic_family, 1))


@pytest.mark.parametrize("name, fixed, t", [
    (FamilyName.T_FIXED_A, [2], 2),
    (FamilyName.LOGISTIC, [], 2),
    (FamilyName.S_FIXED_A, [0], 1),
])
def test_degenerate_conjugacy(name, fixed, t):
    family = FamilyService.builtin(name, fixed)
    with pytest.raises(DegenerateConjugacy):
        FamilyService.conjugacy(family, t)
    assert FamilyService.conjugacy_scale_sign(family, t) == 0


def test_effective_parameter_of_scaled_family(s_family):
    assert FamilyService.effective_parameter(s_family, Fraction(7, 8)) == Fraction(7, 4)


def test_logistic_effective_parameter_at_irrational_mu(logistic_family):
    """
    Tests that mu = 1 + 2 sqrt2 reduces to alpha = 7/4 exactly.
    """
    mu = PolyService.isolate_real_roots(UniPoly([-7, -2, 1]))[-1]
    assert FamilyService.effective_parameter(logistic_family, mu) == Fraction(7, 4)


def test_effective_parameter_with_algebraic_fixed_parameter():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    # alpha(c) = (sqrt7 - c) c is irrational at c = 1
    alpha = FamilyService.effective_parameter(family, 1)
    assert isinstance(alpha, AlgebraicRoot)
    assert abs(float(PolyService.refine(alpha, Fraction(1, 2 ** 40))) - (7 ** 0.5 - 1)) < 1e-9


def test_effective_parameter_rejects_two_irrationals():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    with pytest.raises(ExactnessRequired):
        FamilyService.effective_parameter(family, _sqrt(2))


def test_cubic_has_no_reduction(cubic_family):
    with pytest.raises(ValueError):
        FamilyService.effective_parameter(cubic_family, 1)


def test_numeric_map_matches_exact_rule(t_family):
    coefficients = FamilyService.numeric_map(t_family, 1.3)
    exact = FamilyService.specialize(t_family, "1.3")
    assert np.allclose(coefficients[:3], [float(c) for c in exact.coefficients], rtol=0, atol=1e-15)


def test_numeric_map_with_algebraic_fixed_parameter():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    coefficients = FamilyService.numeric_map(family, 1.0)
    assert coefficients[0] == pytest.approx(7 ** 0.5 - 1, abs=1e-15)
    assert coefficients[2] == pytest.approx(-1.0)


def test_critical_points(cubic_family, logistic_family, normal_family):
    assert FamilyService.critical_points(normal_family) == [0.0]
    assert FamilyService.critical_points(logistic_family) == [0.5]
    low, high = FamilyService.critical_points(cubic_family)
    assert low == pytest.approx(-(2 / 3) ** 0.5)
    assert high == pytest.approx((2 / 3) ** 0.5)
    assert len(FamilyService.critical_points(cubic_family)) == 2


def _random_reducible_family():
    """A random S, T or logistic family instance with rational fixed parameters."""
    name = fake.random_element([FamilyName.S_FIXED_A, FamilyName.T_FIXED_A, FamilyName.LOGISTIC])
    if name == FamilyName.S_FIXED_A:
        return FamilyService.builtin(name, [random_rational() or Fraction(1)])
    if name == FamilyName.T_FIXED_A:
        return FamilyService.builtin(name, [random_rational() or Fraction(2), random_rational() or Fraction(1)])
    return FamilyService.builtin(name)


def test_conjugacy_identity_on_random_families():
    """
    Tests the exact identity F(h(x)) == h(G(x)) on 20 random (family, t) pairs,
    skipping parameters where the conjugacy is constant.
    """
    Faker.seed(1234)
    checked = 0
    while checked < 20:
        family = _random_reducible_family()
        t = random_rational()
        if FamilyService.conjugacy_scale_sign(family, t) == 0:
            continue
        assert FamilyService.verify_conjugacy(FamilyService.conjugacy(family, t))
        checked += 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_conjugacy_preserves_period_counts(n):
    """
    Tests that counting on the family's own period-n polynomial agrees with counting
    on the normal form at the effective parameter.
    """
    Faker.seed(77 + n)
    normal = FamilyService.normal_form()
    checked = 0
    while checked < 10:
        family = _random_reducible_family()
        t = random_rational(max_numerator=20, max_denominator=8)
        if FamilyService.conjugacy_scale_sign(family, t) == 0:
            continue
        own = PeriodService.count_period_points(family, n, t)
        if own.leading_coefficient_vanishes:
            continue
        alpha = FamilyService.effective_parameter(family, t)
        assert own.count == PeriodService.count_period_points(normal, n, alpha).count
        checked += 1


def test_eval_map_matches_horner_on_iterated_polynomial():
    Faker.seed(2718)
    for name, fixed in [(FamilyName.QUADRATIC_NORMAL, []), (FamilyName.T_FIXED_A, ["2.658"]), (FamilyName.CUBIC_EXERCISE, [])]:
        family = FamilyService.builtin(name, fixed)
        for _ in range(5):
            t, x = random_rational(), random_rational()
            k = fake.random_int(min=2, max=3)
            composed = PolyService.iterate(FamilyService.specialize(family, t), k)
            horner = Fraction(0)
            for c in reversed(composed.coefficients):
                horner = horner * x + c
            assert FamilyService.eval_map(family, t, x, iterates=k) == horner
