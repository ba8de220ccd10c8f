"""
File: conftest.py

Overview:
Shared fixtures for the service, model, schema and command tests.

Fixtures:
- Family fixtures (`normal_family`, `s_family`, `t_family`, `t_family_period2`, `logistic_family`,
  `cubic_family`): the registered families at the parameter values the tests revolve around.
- `poly_factory`: builds Faker-seeded random rational polynomials of bounded degree.
- `random_polys`: 200 seeded random polynomials for the property suites.
- `runner`: a click `CliRunner` that keeps stderr (logs, error messages) out of `result.output`.
"""

# Standard library imports
from builtins import int, range
from fractions import Fraction

# Third-party imports
import pytest
from click.testing import CliRunner
from faker import Faker

# Application-specific imports
from app.dependencies import get_settings
from app.models.map_family import FamilyName
from app.models.polynomial import UniPoly
from app.services.family_service import FamilyService

fake = Faker()
Faker.seed(4242)

settings = get_settings()

PROPERTY_CASES = 200


def random_rational(max_numerator: int = 9, max_denominator: int = 4) -> Fraction:
    numerator = fake.random_int(min=-max_numerator, max=max_numerator)
    denominator = fake.random_int(min=1, max=max_denominator)
    return Fraction(numerator, denominator)


def random_poly(max_degree: int = 6, min_degree: int = 0) -> UniPoly:
    """Random polynomial with a nonzero leading coefficient of degree in [min_degree, max_degree]."""
    degree = fake.random_int(min=min_degree, max=max_degree)
    coefficients = [random_rational() for _ in range(degree)]
    leading = Fraction(0)
    while leading == 0:
        leading = random_rational()
    return UniPoly(coefficients + [leading])


@pytest.fixture
def poly_factory():
    return random_poly


@pytest.fixture(scope="session")
def random_polys():
    Faker.seed(2024)
    return [random_poly() for _ in range(PROPERTY_CASES)]


@pytest.fixture(scope="session")
def random_poly_pairs():
    Faker.seed(7)
    return [(random_poly(min_degree=1), random_poly(max_degree=3, min_degree=1)) for _ in range(PROPERTY_CASES)]


@pytest.fixture
def normal_family():
    return FamilyService.normal_form()


@pytest.fixture
def s_family():
    return FamilyService.builtin(FamilyName.S_FIXED_A, [2])


@pytest.fixture
def t_family():
    return FamilyService.builtin(FamilyName.T_FIXED_A, ["2.658"])


@pytest.fixture
def t_family_period2():
    return FamilyService.builtin(FamilyName.T_FIXED_A, ["2.35"])


@pytest.fixture
def logistic_family():
    return FamilyService.builtin(FamilyName.LOGISTIC)


@pytest.fixture
def cubic_family():
    return FamilyService.builtin(FamilyName.CUBIC_EXERCISE)


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)
