"""
Predict Task Description:
-------------------
Compares measured Evans-function errors with their closed-form leading-order
predictions.

1. Builds the configuration and model; the method must have a closed-form
   prediction (midpoint or magnus4).

2. For every (lambda, h) pair computes the magnus4 reference, the measured
   E_D = D - D_ref and the predicted E_D.

3. Writes lambda_re, lambda_im, h, measured_re, measured_im, predicted_re,
   predicted_im, ratio; ratio is left empty when the prediction is zero.
"""

from concurrent.futures import ThreadPoolExecutor

import click
import pandas as pd

from ..config import RunConfig, lambda_options, method_option, model_options, run_options, step_options
from ..csvio import write_table
from ..error_analysis import measure_evans_error, reference_evans
from ..errors import ConfigError
from ..evans import check_admissible
from ..job import Job

PREDICTABLE = ("midpoint", "magnus4")


def register(cli):
    cli.add_command(predict)


@click.command("predict")
@model_options
@method_option
@lambda_options
@step_options
@run_options
def predict(**options):
    """Measured versus predicted E_D."""
    my_job = Job("predict")
    with my_job.reporting():
        my_config = RunConfig.from_options("predict", **options)
        if my_config.method not in PREDICTABLE:
            raise ConfigError(
                f"no closed-form prediction for {my_config.method}; "
                f"use one of {', '.join(PREDICTABLE)}"
            )
        my_model = my_config.build_model(my_job)
        grids = my_config.grids(my_model)
        lambdas = my_config.lambdas
        if not lambdas:
            raise ConfigError("no lambda given (use --lambda or --lambda-start)")
        check_admissible(my_model, lambdas)

        def measure(lam):
            reference = reference_evans(my_model, lam, grids[0].L)
            return [
                measure_evans_error(my_model, lam, grid, my_config.method, reference)
                for grid in grids
            ]

        with my_job.timed("predictions"):
            with ThreadPoolExecutor(max_workers=my_config.jobs) as pool:
                reports = [r for batch in pool.map(measure, lambdas) for r in batch]

        df = pd.DataFrame(
            {
                "lambda_re": [r.lam.real for r in reports],
                "lambda_im": [r.lam.imag for r in reports],
                "h": [r.grid.h for r in reports],
                "measured_re": [r.measured_E_D.real for r in reports],
                "measured_im": [r.measured_E_D.imag for r in reports],
                "predicted_re": [r.predicted_E_D.real for r in reports],
                "predicted_im": [r.predicted_E_D.imag for r in reports],
                "ratio": pd.Series([r.ratio for r in reports], dtype=float),
            }
        )
        write_table(df, my_config.output)
