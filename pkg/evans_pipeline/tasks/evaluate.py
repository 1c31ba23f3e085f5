"""
Evaluate Task Description:
-------------------
Computes D(lambda) for a list of spectral parameters and writes one CSV row
per lambda.

1. Builds the run configuration and the model from the command-line flags,
   logging every model parameter that falls back to its default.

2. Derives the grid (L and N) from --N or --h.

3. Checks that every lambda is admissible and reports all offending values
   at once before doing any work.

4. Evaluates the Evans function for each lambda on a thread pool, keeping
   the input order.

5. Writes lambda_re, lambda_im, D_re, D_im, method, h, L, N as CSV.
"""

import click
import pandas as pd

from ..config import RunConfig, lambda_options, method_option, model_options, run_options, step_options
from ..csvio import write_table
from ..evans import evans_sweep
from ..job import Job

COLUMNS = ["lambda_re", "lambda_im", "D_re", "D_im", "method", "h", "L", "N"]


def register(cli):
    cli.add_command(evaluate)


def evaluate_table(results):
    rows = [
        {
            "lambda_re": r.lam.real,
            "lambda_im": r.lam.imag,
            "D_re": r.value.real,
            "D_im": r.value.imag,
            "method": r.method,
            "h": r.grid.h,
            "L": r.grid.L,
            "N": r.grid.N,
        }
        for r in results
    ]
    return pd.DataFrame(rows, columns=COLUMNS)


@click.command("evaluate")
@model_options
@method_option
@lambda_options
@step_options
@run_options
def evaluate(**options):
    """Evaluate the Evans function D(lambda)."""
    my_job = Job("evaluate")
    with my_job.reporting():
        my_config = RunConfig.from_options("evaluate", **options)
        my_model = my_config.build_model(my_job)
        grid = my_config.grid(my_model)
        if not my_config.lambdas:
            raise click.UsageError("no lambda given (use --lambda or --lambda-start)")
        my_job.logprint(
            f"{my_model.name} model, {my_config.method}, L = {grid.L}, N = {grid.N}, "
            f"{len(my_config.lambdas)} lambda value(s)"
        )
        with my_job.timed("evaluation"):
            results = evans_sweep(
                my_model, my_config.lambdas, grid, my_config.method, my_config.jobs
            )
        write_table(evaluate_table(results), my_config.output)
