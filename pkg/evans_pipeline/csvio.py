"""CSV reports: header line, comma-separated rows, "#" trailer lines."""

import click
import pandas as pd

from .error_analysis import fit_order
from .errors import ConfigError

FLOAT_FORMAT = "%.17g"


def render_table(df, trailers=()):
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return text + "".join(f"# {line}\n" for line in trailers)


def write_table(df, path=None, trailers=()):
    text = render_table(df, trailers)
    if path is None:
        click.echo(text, nl=False)
        return
    with open(path, "w", newline="\n") as stream:
        stream.write(text)


def read_table(path):
    """Rows of a report (trailers dropped) and its trailer lines."""
    try:
        with open(path) as stream:
            lines = stream.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}")
    trailers = [line[1:].strip() for line in lines if line.startswith("#")]
    try:
        df = pd.read_csv(path, comment="#")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise ConfigError(f"{path} is not a CSV report: {exc}")
    return df, trailers


def fitted_trailer(name, samples, exact_label="exact", exact_tolerance=1e-11):
    """ "<name>=<slope>" for (abscissa, error) samples, or exact_label when
    every error is below exact_tolerance."""
    if all(abs(e) <= exact_tolerance for _, e in samples):
        return exact_label
    positive = [(x, abs(e)) for x, e in samples if abs(e) > 0]
    if len(positive) < 3:
        return f"{name}=nan"
    return f"{name}={fit_order(positive).slope:.6g}"
