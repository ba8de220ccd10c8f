from builtins import float, str
import json

import click

from app.commands.common import RANGE, emit, family_options, handle_errors, resolve_family, run_config
from app.models.map_family import FamilyName
from app.schemas.bubble_schemas import BubbleReport
from app.services.detection_service import BIRTH_PARAMETERS, DetectionService


def _as_text(report: BubbleReport) -> str:
    lines = [f"{report.family} period {report.period}: {report.kind.value} ({report.method.value})"]
    if report.interval_lo is not None:
        lines.append(f"interval [{report.interval_lo:.12g}, {report.interval_hi:.12g}]")
    for event in report.events:
        lines.append(f"  {event.kind} [{event.lo:.12g}, {event.hi:.12g}]")
    return "\n".join(lines)


@click.command("detect")
@family_options
@click.option("--n", type=int, required=True, help="Period.")
@click.option("--range", "t_range", type=RANGE, default=None, help="Parameter range lo..hi; the T family can go without one.")
@click.option("--point-tol", type=float, default=None, help="Width below which a birth/death pair is a point.")
@click.option("--grid", type=int, default=None, help="Scan grid points.")
@click.option("--no-points", is_flag=True, help="Skip the resultant search for point bifurcations.")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Report file; standard output when omitted.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
@handle_errors
def detect(family_name, family_spec, a, b, n, t_range, point_tol, grid, no_points, output, fmt):
    """Bubbles and point bifurcations of period-n orbits."""
    family = resolve_family(family_name, family_spec, a, b)
    closed_form = t_range is None or not family.is_exact
    if closed_form and not (family.name == FamilyName.T_FIXED_A and n in BIRTH_PARAMETERS):
        raise click.UsageError(f"--range is required for {family.descriptor} at period {n}")
    run_config(
        command="detect", family_spec=family.descriptor, n=n, t_range=t_range,
        range_required=not closed_form, point_tol=point_tol, output=output, format=fmt,
    )
    if closed_form:
        fixed = family.fixed
        report = DetectionService.bubble_closed_form(fixed["a"], n, fixed["b"], point_tol=point_tol)
    else:
        report = DetectionService.detect(family, n, t_range, point_tol=point_tol, grid=grid, search_points=not no_points)
    text = json.dumps(report.to_document(), indent=2) if fmt == "json" else _as_text(report)
    emit(text, output)
