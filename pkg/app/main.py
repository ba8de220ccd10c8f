"""
Command-line entry point. Run ``python -m app.main --help`` for the command list.
"""
from builtins import bool
import logging

import click

from app import __version__
from app.commands.detect_commands import detect
from app.commands.orbit_commands import continue_orbit, diagram
from app.commands.period_commands import period_count, scan, tangent
from app.commands.verify_commands import verify_paper
from app.utils.common import setup_logging


@click.group()
@click.version_option(__version__, prog_name="bubbles")
@click.option("--debug", is_flag=True, help="Log at DEBUG level.")
def cli(debug: bool):
    """Exact and numerical tools for period counts, bubbles and point bifurcations of polynomial map families."""
    setup_logging()
    if debug:
        logging.getLogger("app").setLevel(logging.DEBUG)


cli.add_command(period_count)
cli.add_command(tangent)
cli.add_command(scan)
cli.add_command(detect)
cli.add_command(continue_orbit)
cli.add_command(diagram)
cli.add_command(verify_paper)


if __name__ == "__main__":
    cli()
