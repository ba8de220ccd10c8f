from builtins import float, int, len, str
import json

import click

from app.commands.common import RANGE, RATIONAL, emit, family_options, handle_errors, resolve_family, run_config
from app.dependencies import get_settings
from app.services.continuation_service import ContinuationService
from app.services.diagram_service import DiagramService

settings = get_settings()


@click.command("continue")
@family_options
@click.option("--n", type=int, required=True, help="Period.")
@click.option("--param", type=RATIONAL, required=True, help="Rational parameter the orbits are seeded at.")
@click.option("--range", "t_range", type=RANGE, required=True, help="Parameter range lo..hi to continue through.")
@click.option("--index", type=int, default=0, show_default=True, help="Which distinct cycle to follow, in seed order.")
@click.option("--step0", type=float, default=None, help="Initial step.")
@click.option("--newton-tol", type=float, default=None, help="Newton residual tolerance.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@handle_errors
def continue_orbit(family_name, family_spec, a, b, n, param, t_range, index, step0, newton_tol, output, fmt):
    """Follow one period-n orbit from an exact seed through a parameter range."""
    family = resolve_family(family_name, family_spec, a, b)
    run_config(
        command="continue", family_spec=family.descriptor, n=n, t_range=t_range, range_required=True,
        newton_tol=newton_tol, step0=step0, output=output, format=fmt,
    )
    cycles = ContinuationService.distinct_cycles(ContinuationService.seed_orbits(family, n, param))
    if not 0 <= index < len(cycles):
        raise click.UsageError(f"{len(cycles)} period-{n} cycle(s) at {family.param_name}={param}; --index {index} is out of range")
    branch = ContinuationService.continue_branch(family, n, cycles[index], t_range, step0=step0, newton_tol=newton_tol)
    if fmt == "json":
        emit(json.dumps(branch.model_dump(mode="json"), indent=2), output)
    else:
        emit(ContinuationService.branch_to_csv(branch), output)


def _x0_policy(value: str):
    if value == "critical-point":
        return value
    try:
        return float(value)
    except ValueError as e:
        raise click.BadParameter(f"expected 'critical-point' or a number, got {value!r}") from e


@click.command("diagram")
@family_options
@click.option("--range", "t_range", type=RANGE, required=True, help="Parameter range lo..hi.")
@click.option("--n-params", type=int, default=None, help=f"Parameter samples (default {settings.n_params}).")
@click.option("--transient", type=int, default=None, help=f"Discarded iterates (default {settings.transient}).")
@click.option("--keep", type=int, default=None, help=f"Recorded iterates (default {settings.keep}).")
@click.option("--x0", default="critical-point", show_default=True, help="'critical-point' or a fixed seed value.")
@click.option("--width", type=int, default=None)
@click.option("--height", type=int, default=None)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["svg", "csv"]), default="svg")
@handle_errors
def diagram(family_name, family_spec, a, b, t_range, n_params, transient, keep, x0, width, height, output, fmt):
    """Orbit diagram by direct iteration, as an SVG scatter or CSV."""
    family = resolve_family(family_name, family_spec, a, b)
    policy = _x0_policy(x0)
    run_config(command="diagram", family_spec=family.descriptor, t_range=t_range, range_required=True, output=output, format=fmt)
    dataset = DiagramService.orbit_diagram(family, t_range, n_params=n_params, transient=transient, keep=keep, x0_policy=policy)
    if fmt == "csv":
        emit(DiagramService.dataset_to_csv(dataset), output)
    else:
        emit(DiagramService.render_svg(dataset, width, height), output)
