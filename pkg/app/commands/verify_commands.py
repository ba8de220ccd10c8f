from builtins import dict
import json

import click

from app.commands.common import emit, handle_errors
from app.services.verification_service import VerificationService


@click.command("verify-paper")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--quick", is_flag=True, help="Skip the continuation and cubic claims.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@handle_errors
def verify_paper(fmt, quick, output):
    """Replay every checkable claim; exit 0 only when all pass."""
    report = VerificationService.run(quick=quick)
    text = json.dumps(dict(report.model_dump(mode="json"), passed=report.passed), indent=2) if fmt == "json" else report.to_text()
    emit(text, output)
    if not report.passed:
        raise click.exceptions.Exit(1)
