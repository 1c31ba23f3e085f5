"""
Sweep-Lambda Task Description:
-------------------
Measures how the Evans-function error and the asymptotic-series residual
decay along a geometric sweep of lambda at a fixed grid.

1. Builds the configuration and model; needs one grid and at least three
   lambda values (typically --lambda-start/--lambda-factor/--lambda-count).

2. Checks admissibility of the whole sweep up front.

3. For each lambda, on a thread pool: evaluates D with the chosen method,
   the magnus4 reference D_ref, and the order-2 asymptotic value D_asym.

4. Writes abs_lambda, abs_E_D, abs_asym_residual (|D - D_asym|) and two
   trailing lines with the fitted slopes against |lambda|.
"""

from concurrent.futures import ThreadPoolExecutor

import click
import pandas as pd

from ..config import RunConfig, lambda_options, method_option, model_options, run_options, step_options
from ..csvio import fitted_trailer, write_table
from ..error_analysis import reference_evans
from ..errors import ConfigError
from ..evans import asymptotic_evans, asymptotic_series, check_admissible, evaluate_evans
from ..job import Job

MIN_LAMBDAS = 3


def register(cli):
    cli.add_command(sweep_lambda)


@click.command("sweep-lambda")
@model_options
@method_option
@lambda_options
@step_options
@run_options
def sweep_lambda(**options):
    """Fit the lambda-decay of E_D and of the asymptotic residual."""
    my_job = Job("sweep-lambda")
    with my_job.reporting():
        my_config = RunConfig.from_options("sweep-lambda", **options)
        my_model = my_config.build_model(my_job)
        grid = my_config.grid(my_model)
        lambdas = my_config.lambdas
        if len(lambdas) < MIN_LAMBDAS:
            raise ConfigError(f"sweep-lambda needs at least {MIN_LAMBDAS} lambda values")
        check_admissible(my_model, lambdas)
        series = asymptotic_series(my_model)
        my_job.logprint(f"Phi_total = {series.Phi_total:.12g}")

        def measure(lam):
            value = evaluate_evans(my_model, lam, grid, my_config.method).value
            reference = reference_evans(my_model, lam, grid.L)
            return value - reference, value - asymptotic_evans(series, lam)

        with my_job.timed(f"sweep over {len(lambdas)} lambda values"):
            with ThreadPoolExecutor(max_workers=my_config.jobs) as pool:
                measured = list(pool.map(measure, lambdas))

        df = pd.DataFrame(
            {
                "abs_lambda": [abs(lam) for lam in lambdas],
                "abs_E_D": [abs(e) for e, _ in measured],
                "abs_asym_residual": [abs(r) for _, r in measured],
            }
        )
        trailers = [
            fitted_trailer(
                "fitted_order_E_D",
                list(zip(df["abs_lambda"], df["abs_E_D"])),
                exact_label="exact_E_D",
            ),
            fitted_trailer(
                "fitted_order_asymptotic",
                list(zip(df["abs_lambda"], df["abs_asym_residual"])),
                exact_label="exact_asymptotic",
            ),
        ]
        for line in trailers:
            my_job.logprint(line)
        write_table(df, my_config.output, trailers)
