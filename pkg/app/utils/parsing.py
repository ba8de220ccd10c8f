from builtins import len, str
from fractions import Fraction
from math import isqrt
from typing import Dict, Optional, Tuple
import re

from app.exceptions import FamilySpecError
from app.models.map_family import ParamValue
from app.models.polynomial import Interval, UniPoly
from app.services.poly_service import PolyService

_RATIONAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")
_SQRT = re.compile(r"^sqrt(\d+(?:/\d+)?)$")


def parse_rational(text: str) -> Fraction:
    """
    Read ``p/q`` or a decimal exactly: ``2.658`` is 1329/500, never a float.

    Raises:
        ValueError: for anything else, including exponents and zero denominators.
    """
    cleaned = text.strip()
    if not _RATIONAL.match(cleaned):
        raise ValueError(f"not a rational number: {text!r}")
    if "/" in cleaned and "." in cleaned:
        raise ValueError(f"use either p/q or a decimal, not both: {text!r}")
    try:
        return Fraction(cleaned)
    except ZeroDivisionError as e:
        raise ValueError(f"zero denominator in {text!r}") from e


def sqrt_root(radicand: Fraction) -> ParamValue:
    """Positive square root of a positive rational, exact."""
    if radicand <= 0:
        raise ValueError(f"sqrt needs a positive radicand, got {radicand}")
    p, q = radicand.numerator, radicand.denominator
    if isqrt(p) ** 2 == p and isqrt(q) ** 2 == q:
        return Fraction(isqrt(p), isqrt(q))
    positive = PolyService.isolate_real_roots(UniPoly([-radicand, 0, 1]))[-1]
    return positive


def parse_param(text: str) -> ParamValue:
    """A rational, or ``sqrtN`` for the positive root of x**2 - N."""
    cleaned = text.strip()
    match = _SQRT.match(cleaned)
    if match:
        return sqrt_root(Fraction(match.group(1)))
    return parse_rational(cleaned)


def parse_range(text: str) -> Interval:
    """``lo..hi`` with rational ends; lo must not exceed hi."""
    parts = text.strip().split("..")
    if len(parts) != 2:
        raise ValueError(f"a range is written lo..hi, got {text!r}")
    lo, hi = parse_rational(parts[0]), parse_rational(parts[1])
    if lo > hi:
        raise ValueError(f"range {text!r} has lo > hi")
    return Interval(lo, hi)


def parse_family_spec(text: str) -> Tuple[str, Dict[str, ParamValue]]:
    """
    Split ``family=<name>;a=<q>;b=<q>`` into the family name and its fixed
    parameters. Entries may come in any order after the family name.
    """
    name: Optional[str] = None
    params: Dict[str, ParamValue] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, value = chunk.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise FamilySpecError(f"malformed entry {chunk!r} in family spec {text!r}")
        if key == "family":
            name = value
            continue
        if key in params:
            raise FamilySpecError(f"{key} given twice in family spec {text!r}")
        try:
            params[key] = parse_param(value)
        except ValueError as e:
            raise FamilySpecError(f"bad value for {key} in family spec {text!r}: {e}") from e
    if name is None:
        raise FamilySpecError(f"family spec {text!r} names no family")
    return name, params

