"""evans-pipeline command line: one subcommand per task module."""

import click

from . import __version__
from .job import configure_logging
from .tasks import TASKS


@click.group()
@click.version_option(__version__)
@click.option("--verbose", "-v", is_flag=True, help="log at DEBUG level.")
def cli(verbose):
    """Evans function evaluation and error analysis for travelling waves."""
    configure_logging(verbose)


for task in TASKS:
    task.register(cli)


def main():
    cli(prog_name="evans-pipeline")
