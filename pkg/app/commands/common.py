"""
Shared pieces of the command-line surface: click parameter types for exact
numbers, the family options every command takes, run-config validation and
the error-to-exit-code mapping (2 for usage errors, 1 for failed computations).
"""
from builtins import isinstance, set, sorted, str
from functools import wraps
from typing import Callable, List, Optional
import logging

import click
from pydantic import ValidationError

from app.exceptions import BifurcationError, FamilySpecError, MissingFixedParam, UnknownFamily
from app.models.map_family import MapFamily, ParamValue
from app.models.polynomial import Interval
from app.schemas.run_config import RunConfig
from app.services.family_service import FamilyService
from app.utils.common import write_atomic
from app.utils.parsing import parse_family_spec, parse_param, parse_range, parse_rational

logger = logging.getLogger(__name__)

USAGE_ERRORS = (UnknownFamily, MissingFixedParam, FamilySpecError)


class RationalParam(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return parse_rational(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class ExactParam(click.ParamType):
    """A rational or ``sqrtN``."""
    name = "exact"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return parse_param(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class RangeParam(click.ParamType):
    name = "lo..hi"

    def convert(self, value, param, ctx):
        if isinstance(value, Interval):
            return value
        try:
            return parse_range(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


RATIONAL = RationalParam()
EXACT = ExactParam()
RANGE = RangeParam()


def family_options(command: Callable) -> Callable:
    """--family NAME with --a/--b, or --family-spec 'family=<name>;a=<q>;b=<q>'."""
    command = click.option("--b", "b", type=EXACT, default=None, help="Second fixed parameter (T-fixed-a, default 1).")(command)
    command = click.option("--a", "a", type=EXACT, default=None, help="Fixed parameter a, rational or sqrtN.")(command)
    command = click.option("--family-spec", default=None, help="Family descriptor, e.g. 'family=T-fixed-a;a=2.658'.")(command)
    command = click.option("--family", "family_name", default=None, help=f"One of: {', '.join(FamilyService.names())}.")(command)
    return command


def resolve_family(
    family_name: Optional[str], family_spec: Optional[str], a: Optional[ParamValue], b: Optional[ParamValue],
) -> MapFamily:
    if family_spec is not None:
        if family_name is not None or a is not None or b is not None:
            raise click.UsageError("--family-spec cannot be combined with --family, --a or --b")
        family_name, params = parse_family_spec(family_spec)
        unknown = set(params) - {"a", "b"}
        if unknown:
            raise FamilySpecError(f"unknown fixed parameter(s) {sorted(unknown)} in {family_spec!r}")
        a, b = params.get("a"), params.get("b")
    if family_name is None:
        raise click.UsageError("give --family or --family-spec")
    if b is not None and a is None:
        raise click.UsageError("--b needs --a")
    fixed: List[ParamValue] = [v for v in (a, b) if v is not None]
    return FamilyService.builtin(family_name, fixed)


def run_config(**fields) -> RunConfig:
    """Validate a run before anything is computed or written."""
    t_range = fields.pop("t_range", None)
    if t_range is not None:
        fields["range_lo"], fields["range_hi"] = str(t_range.lo), str(t_range.hi)
    return RunConfig(**fields)


def emit(text: str, output: Optional[str]) -> None:
    if output:
        write_atomic(output, text)
        logger.info(f"Wrote {output}")
    else:
        click.echo(text.rstrip("\n"))


def handle_errors(command: Callable) -> Callable:
    """Usage problems exit 2 through click; failed computations print the reason and exit 1."""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ValidationError as e:
            raise click.UsageError(str(e)) from e
        except USAGE_ERRORS as e:
            raise click.UsageError(str(e)) from e
        except (BifurcationError, ValueError) as e:
            logger.error(f"{command.__name__} failed: {e}")
            click.echo(f"error: {e}", err=True)
            raise click.exceptions.Exit(1) from e

    return wrapper
