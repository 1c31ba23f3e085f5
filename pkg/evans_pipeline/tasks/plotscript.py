"""
Plotscript Task Description:
-------------------
Writes a gnuplot script for a CSV report produced by one of the other tasks.

1. Reads the CSV and recognises the report from its header.

2. Writes a standalone gnuplot script next to the requested output,
   referencing the CSV by relative path: log-log axes for converge,
   sweep-lambda and predict reports, linear axes for evaluate reports.

3. With --render also draws the same plot to a PNG with matplotlib.
"""

import os

import click
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ..csvio import read_table
from ..errors import ConfigError
from ..job import Job

# header prefix -> (title, logscale, x column, [y columns])
LAYOUTS = {
    "evaluate": ("D(lambda)", False, "lambda_re", ["D_re", "D_im"]),
    "converge": ("E_D against h", True, "h", ["abs_E_D"]),
    "sweep-lambda": ("errors against |lambda|", True, "abs_lambda", ["abs_E_D", "abs_asym_residual"]),
    "predict": ("measured and predicted E_D", True, "h", ["measured_re", "predicted_re"]),
}
HEADERS = {
    "evaluate": ["lambda_re", "lambda_im", "D_re", "D_im"],
    "converge": ["h", "N", "abs_E_D"],
    "sweep-lambda": ["abs_lambda", "abs_E_D", "abs_asym_residual"],
    "predict": ["lambda_re", "lambda_im", "h", "measured_re"],
}


def register(cli):
    cli.add_command(plotscript)


def recognise(columns):
    for kind, prefix in HEADERS.items():
        if list(columns[: len(prefix)]) == prefix:
            return kind
    raise ConfigError(f"unrecognised CSV header: {','.join(map(str, columns))}")


def gnuplot_script(kind, csv_relpath, columns):
    title, logscale, x, ys = LAYOUTS[kind]
    lines = [
        f"# {kind} report",
        'set datafile separator ","',
        "set datafile commentschars \"#\"",
        f'set title "{title}"',
        f'set xlabel "{x}"',
        "set key autotitle columnhead",
        "set grid",
    ]
    if logscale:
        lines.append("set logscale xy")
        # absolute values on log axes
        using = [f"{columns.index(x) + 1}:(abs(${columns.index(y) + 1}))" for y in ys]
    else:
        using = [f"{columns.index(x) + 1}:{columns.index(y) + 1}" for y in ys]
    plots = [f"'{csv_relpath}' using {u} with linespoints title '{y}'" for u, y in zip(using, ys)]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def render_png(kind, df, path):
    title, logscale, x, ys = LAYOUTS[kind]
    fig, ax = plt.subplots(1, figsize=(7.0, 5.5))
    for y in ys:
        values = df[y].abs() if logscale else df[y]
        ax.plot(df[x], values, marker="o", label=y)
    if logscale:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


@click.command("plotscript")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="script path [default: CSV with .gp suffix].")
@click.option("--render", is_flag=True, help="also render a PNG preview with matplotlib.")
def plotscript(csv_path, output, render):
    """Emit a gnuplot script for a CSV report."""
    my_job = Job("plotscript")
    with my_job.reporting():
        df, _ = read_table(csv_path)
        columns = list(df.columns)
        kind = recognise(columns)
        script_path = output or os.path.splitext(csv_path)[0] + ".gp"
        relpath = os.path.relpath(csv_path, os.path.dirname(os.path.abspath(script_path)))
        with open(script_path, "w", newline="\n") as stream:
            stream.write(gnuplot_script(kind, relpath, columns))
        my_job.logprint(f"wrote {kind} plot script {script_path}")
        if render:
            png_path = os.path.splitext(script_path)[0] + ".png"
            render_png(kind, df, png_path)
            my_job.logprint(f"rendered {png_path}")
