"""
Fixture Task Description:
-------------------
Records or checks a golden Evans-function value.

1. Builds the configuration and model; needs exactly one lambda.

2. Without --check: runs the self-convergent magnus4 reference and writes a
   JSON fixture holding the model, its parameters, lambda, L, the reference
   value and the N it converged at.

3. With --check FILE: rebuilds the model from the fixture, recomputes the
   reference at the recorded L, and exits with status 3 when the value
   differs from the recorded one by more than 1e-10. Fixtures holding a
   closed-form value may leave out N.
"""

import json

import click

from ..config import RunConfig, lambda_options, model_options, run_options
from ..error_analysis import reference_run
from ..errors import ConfigError
from ..evans import check_admissible
from ..job import Job, NumericalFailure

FIXTURE_TOLERANCE = 1e-10


def register(cli):
    cli.add_command(fixture)


def load_fixture(path):
    try:
        with open(path) as stream:
            data = json.load(stream)
        return {
            "model": data["model"],
            "parameters": dict(data["parameters"]),
            "lambda": complex(*data["lambda"]),
            "L": float(data["L"]),
            "D": complex(*data["D"]),
            "N": int(data["N"]) if "N" in data else None,
        }
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read fixture {path}: {exc}")


def check_fixture(path, my_job):
    expected = load_fixture(path)
    my_config = RunConfig(
        command="fixture",
        model_name=expected["model"],
        parameters=expected["parameters"],
    )
    my_model = my_config.build_model(my_job)
    check_admissible(my_model, [expected["lambda"]])
    value, N = reference_run(my_model, expected["lambda"], expected["L"])
    if expected["N"] is not None and expected["N"] != N:
        my_job.logprint(f"fixture {path} was recorded at N = {expected['N']}, now N = {N}")
    difference = abs(value - expected["D"])
    my_job.logprint(f"fixture {path}: D = {value}, recorded {expected['D']}, |diff| = {difference:.3e}")
    if not difference <= FIXTURE_TOLERANCE:
        raise NumericalFailure(
            f"fixture mismatch at lambda = {expected['lambda']}: |D - D_fixture| = {difference:.3e}"
        )


@click.command("fixture")
@model_options
@lambda_options
@run_options
@click.option("--check", "check_path", type=click.Path(exists=True, dir_okay=False),
              help="compare against an existing fixture instead of writing one.")
def fixture(check_path, **options):
    """Write or check a golden reference value."""
    my_job = Job("fixture")
    with my_job.reporting():
        if check_path:
            check_fixture(check_path, my_job)
            return
        my_config = RunConfig.from_options("fixture", **options)
        if my_config.model_name == "profile":
            raise ConfigError("fixtures are recorded for the built-in models only")
        if not my_config.output:
            raise ConfigError("fixture needs --output FILE")
        my_model = my_config.build_model(my_job)
        lam = my_config.single_lambda()
        check_admissible(my_model, [lam])
        L = my_config.truncation(my_model)
        with my_job.timed("reference"):
            value, N = reference_run(my_model, lam, L)
        data = {
            "model": my_model.name,
            "parameters": my_model.parameters,
            "lambda": [lam.real, lam.imag],
            "L": L,
            "D": [value.real, value.imag],
            "N": N,
        }
        with open(my_config.output, "w", newline="\n") as stream:
            json.dump(data, stream, indent=2, sort_keys=True)
            stream.write("\n")
        my_job.logprint(f"wrote fixture {my_config.output}: D({lam}) = {value}")
