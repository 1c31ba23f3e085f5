"""
Converge Task Description:
-------------------
Measures the Evans-function error of one method over a sequence of step
sizes and fits the observed order in h.

1. Builds the configuration and model; needs one lambda and at least three
   --h (or --N) values.

2. Computes the self-convergent magnus4 reference D_ref at the same L once.

3. For each grid evaluates D with the chosen method and records
   E_D = D - D_ref.

4. Writes h, N, abs_E_D, E_D_re, E_D_im and a trailing "# fitted_order=<slope>"
   line (or "# exact" when every error is at roundoff level).
"""

from concurrent.futures import ThreadPoolExecutor

import click
import pandas as pd

from ..config import RunConfig, lambda_options, method_option, model_options, run_options, step_options
from ..csvio import fitted_trailer, write_table
from ..error_analysis import measure_evans_error, reference_evans
from ..errors import ConfigError
from ..evans import check_admissible
from ..job import Job

MIN_GRIDS = 3


def register(cli):
    cli.add_command(converge)


@click.command("converge")
@model_options
@method_option
@lambda_options
@step_options
@run_options
def converge(**options):
    """Fit the convergence order of E_D in h."""
    my_job = Job("converge")
    with my_job.reporting():
        my_config = RunConfig.from_options("converge", **options)
        my_model = my_config.build_model(my_job)
        lam = my_config.single_lambda()
        check_admissible(my_model, [lam])
        grids = my_config.grids(my_model)
        if len(grids) < MIN_GRIDS:
            raise ConfigError(f"converge needs at least {MIN_GRIDS} step sizes, got {len(grids)}")

        with my_job.timed("reference"):
            reference = reference_evans(my_model, lam, grids[0].L)
        my_job.logprint(f"D_ref({lam}) = {reference}")

        def measure(grid):
            return measure_evans_error(my_model, lam, grid, my_config.method, reference)

        with my_job.timed(f"{len(grids)} {my_config.method} runs"):
            with ThreadPoolExecutor(max_workers=my_config.jobs) as pool:
                reports = list(pool.map(measure, grids))

        df = pd.DataFrame(
            {
                "h": [r.grid.h for r in reports],
                "N": [r.grid.N for r in reports],
                "abs_E_D": [abs(r.measured_E_D) for r in reports],
                "E_D_re": [r.measured_E_D.real for r in reports],
                "E_D_im": [r.measured_E_D.imag for r in reports],
            }
        )
        trailer = fitted_trailer("fitted_order", list(zip(df["h"], df["abs_E_D"])))
        my_job.logprint(trailer)
        write_table(df, my_config.output, [trailer])
