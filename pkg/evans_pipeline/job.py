"""Logging and error reporting around one command invocation."""

import logging
import sys
from contextlib import contextmanager

import click
from contexttimer import Timer

from .errors import ConfigError, EvansError, InadmissibleError, NumericalError

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s: %(message)s"


def configure_logging(verbose=False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


class NumericalFailure(click.ClickException):
    exit_code = 3


class Job:
    """One run of a task; everything it reports goes through logprint."""

    def __init__(self, name):
        self.name = name
        self.logger = logging.getLogger(f"evans_pipeline.tasks.{name}")

    def __repr__(self):
        return f"Job({self.name!r})"

    def logprint(self, message, level=logging.INFO):
        self.logger.log(level, message)

    @contextmanager
    def timed(self, what):
        with Timer() as t:
            yield t
        self.logprint(f"{what} took {t.elapsed:.2f} s")

    @contextmanager
    def reporting(self):
        """Turn library errors into click exits: 2 for bad input, 3 for numerical failure."""
        try:
            yield
        except (ConfigError, InadmissibleError) as exc:
            raise click.UsageError(str(exc))
        except NumericalError as exc:
            self.logprint(f"{type(exc).__name__}: {exc}", level=logging.ERROR)
            raise NumericalFailure(str(exc))
        except EvansError as exc:
            failure = click.ClickException(str(exc))
            failure.exit_code = exc.exit_code
            raise failure
