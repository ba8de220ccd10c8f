from builtins import float, int, str, zip
import csv
import io
import json

import click

from app.commands.common import EXACT, RANGE, emit, family_options, handle_errors, resolve_family, run_config
from app.dependencies import get_settings
from app.services.detection_service import DetectionService
from app.services.period_service import PeriodService

settings = get_settings()


@click.command("period-count")
@family_options
@click.option("--n", type=int, required=True, help="Period.")
@click.option("--param", type=EXACT, required=True, help="Parameter value, p/q, decimal or sqrtN.")
@click.option("--strict", is_flag=True, help="Fail when the leading x-coefficient vanishes.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@handle_errors
def period_count(family_name, family_spec, a, b, n, param, strict, fmt):
    """Number of distinct real period-n points at one parameter."""
    family = resolve_family(family_name, family_spec, a, b)
    run_config(command="period-count", family_spec=family.descriptor, n=n, format=fmt)
    result = PeriodService.count_period_points(family, n, param, strict=strict)
    if fmt == "json":
        emit(json.dumps(result.model_dump(mode="json"), indent=2), None)
        return
    lines = [str(result.count)]
    if result.lower_period_flag:
        lines.append(f"lower-period roots shared with periods {','.join(str(d) for d in result.shared_periods)}")
    if result.leading_coefficient_vanishes:
        lines.append("leading coefficient vanishes at this parameter")
    emit("\n".join(lines), None)


@click.command("tangent")
@family_options
@click.option("--n", type=int, required=True, help="Period.")
@click.option("--all-signs", is_flag=True, help="Keep non-positive parameters too.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@handle_errors
def tangent(family_name, family_spec, a, b, n, all_signs, fmt):
    """Parameters where the period-n polynomial has a real multiple root."""
    family = resolve_family(family_name, family_spec, a, b)
    run_config(command="tangent", family_spec=family.descriptor, n=n, format=fmt)
    locus = PeriodService.tangent_parameters(family, n, positive_only=not all_signs)
    if fmt == "json":
        document = {
            "family": family.descriptor,
            "n": n,
            "params": [{"value": float(p), "exact": str(p), "method": m} for p, m in zip(locus.params, locus.methods)],
            "rejected": [str(r) for r in locus.rejected],
            "certificate": str(locus.certificate.as_expr()),
        }
        emit(json.dumps(document, indent=2), None)
        return
    emit("\n".join(f"{float(p):.12g}\t{p}\t{m}" for p, m in zip(locus.params, locus.methods)) or "none", None)


@click.command("scan")
@family_options
@click.option("--n", type=int, required=True, help="Period.")
@click.option("--range", "t_range", type=RANGE, required=True, help="Parameter range lo..hi.")
@click.option("--grid", type=int, default=None, help=f"Grid points (default {settings.scan_grid}).")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file; standard output when omitted.")
@handle_errors
def scan(family_name, family_spec, a, b, n, t_range, grid, output):
    """Exact period-n counts on a rational grid, as CSV."""
    family = resolve_family(family_name, family_spec, a, b)
    run_config(command="scan", family_spec=family.descriptor, n=n, t_range=t_range, output=output, format="csv")
    counts = DetectionService.scan_counts(family, n, t_range, grid or settings.scan_grid)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["param", "value", "count", "lower_period_flag"])
    for sample in counts.samples:
        writer.writerow([sample.param, f"{sample.value:.17g}", sample.count, int(sample.lower_period_flag)])
    emit(buffer.getvalue(), output)
