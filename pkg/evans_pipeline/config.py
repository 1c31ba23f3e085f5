"""Run configuration assembled from command-line flags.

Model parameters live in a plain `parameters` dict; `RunConfig.parameter`
falls back to DEFAULT_PARAMETERS and says so in the log.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Optional

import click

from .errors import ConfigError
from .integrators import GridSpec, METHODS, normalize_method
from .model import ingest_profile, make_bump, make_constant, make_nagumo, make_profile_model

logger = logging.getLogger(__name__)

MODELS = ("nagumo", "constant", "bump", "profile")
DEFAULT_PARAMETERS = {"a": 0.3, "q": 0.0, "c": 0.0, "amplitude": 1.0, "width": 1.0}
MODEL_PARAMETERS = {
    "nagumo": ("a",),
    "constant": ("q", "c"),
    "bump": ("q", "c", "amplitude", "width"),
    "profile": ("c",),
}


def parse_lambda(text):
    """Complex literal such as "4", "-1.5", "1+2j" or "1+2i"."""
    cleaned = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise ConfigError(f"cannot parse lambda value {text!r}")


def geometric_sweep(start, factor, count):
    if count < 1:
        raise ConfigError(f"--lambda-count must be positive, got {count}")
    if factor == 0:
        raise ConfigError("--lambda-factor must be non-zero")
    return [complex(start) * complex(factor) ** k for k in range(count)]


@dataclass
class RunConfig:
    command: str
    model_name: str = "nagumo"
    parameters: dict = field(default_factory=dict)
    profile_path: Optional[str] = None
    method: str = "magnus4"
    lambdas: list = field(default_factory=list)
    L: Optional[float] = None
    N_values: tuple = ()
    h_values: tuple = ()
    output: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.model_name not in MODELS:
            raise ConfigError(f"unknown model {self.model_name!r}; choose from {', '.join(MODELS)}")
        self.method = normalize_method(self.method)
        if self.N_values and self.h_values:
            raise ConfigError("give either --N or --h, not both")
        if self.jobs is None or self.jobs < 1:
            self.jobs = os.cpu_count() or 1

    @classmethod
    def from_options(cls, command, **options):
        lambdas = [parse_lambda(text) for text in options.get("lambdas") or ()]
        if options.get("lambda_start") is not None:
            lambdas += geometric_sweep(
                parse_lambda(options["lambda_start"]),
                options.get("lambda_factor") or 10.0,
                options.get("lambda_count") or 3,
            )
        parameters = {
            name: options[name]
            for name in DEFAULT_PARAMETERS
            if options.get(name) is not None
        }
        return cls(
            command=command,
            model_name=options.get("model") or "nagumo",
            parameters=parameters,
            profile_path=options.get("profile"),
            method=options.get("method") or "magnus4",
            lambdas=lambdas,
            L=options.get("L"),
            N_values=tuple(options.get("N") or ()),
            h_values=tuple(options.get("h") or ()),
            output=options.get("output"),
            jobs=options.get("jobs"),
        )

    def parameter(self, name, job=None):
        if name in self.parameters:
            return self.parameters[name]
        value = DEFAULT_PARAMETERS[name]
        message = f"No parameter for {name}, setting to {value}"
        if job is not None:
            job.logprint(message)
        else:
            logger.info(message)
        self.parameters[name] = value
        return value

    def build_model(self, job=None):
        unused = set(self.parameters) - set(MODEL_PARAMETERS[self.model_name])
        for name in sorted(unused):
            logger.warning("parameter %s is not used by the %s model", name, self.model_name)
        p = lambda name: self.parameter(name, job)
        if self.model_name == "nagumo":
            return make_nagumo(p("a"))
        if self.model_name == "constant":
            return make_constant(p("q"), p("c"))
        if self.model_name == "bump":
            return make_bump(p("q"), p("c"), p("amplitude"), p("width"))
        if not self.profile_path:
            raise ConfigError("--model profile needs --profile FILE")
        try:
            with open(self.profile_path) as stream:
                profile = ingest_profile(stream)
        except OSError as exc:
            raise ConfigError(f"cannot read profile {self.profile_path}: {exc.strerror}")
        return make_profile_model(profile, p("c"))

    def truncation(self, model):
        L = self.L if self.L is not None else model.recommended_L
        if not L > 0:
            raise ConfigError(f"--L must be positive, got {L}")
        return float(L)

    def grids(self, model):
        """One GridSpec per --N or --h value."""
        L = self.truncation(model)
        if self.N_values:
            return [GridSpec(L, N) for N in self.N_values]
        if self.h_values:
            return [GridSpec.from_h(L, h) for h in self.h_values]
        raise ConfigError("give the step with --N or --h")

    def grid(self, model):
        grids = self.grids(model)
        if len(grids) != 1:
            raise ConfigError(f"{self.command} takes exactly one --N or --h value")
        return grids[0]

    def single_lambda(self):
        if len(self.lambdas) != 1:
            raise ConfigError(f"{self.command} takes exactly one lambda, got {len(self.lambdas)}")
        return self.lambdas[0]


def model_options(func):
    options = [
        click.option("--model", type=click.Choice(MODELS), default="nagumo", show_default=True),
        click.option("--a", type=float, help="Nagumo threshold, 0 < a < 1."),
        click.option("--q", type=float, help="background value of f'(u_hat)."),
        click.option("--c", type=float, help="wave speed (constant, bump, profile)."),
        click.option("--amplitude", type=float, help="bump amplitude."),
        click.option("--width", type=float, help="bump width."),
        click.option("--profile", type=click.Path(dir_okay=False), help="tabulated profile file."),
        click.option("--L", "L", type=float, help="truncation half-length [default: model's]."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def method_option(func):
    choices = list(METHODS) + ["gl4"]
    return click.option(
        "--method", type=click.Choice(choices), default="magnus4", show_default=True
    )(func)


def lambda_options(func):
    options = [
        click.option("--lambda", "lambdas", multiple=True, help="spectral parameter (repeatable)."),
        click.option("--lambda-start", help="first value of a geometric lambda sweep."),
        click.option("--lambda-factor", type=float, help="ratio of the geometric sweep."),
        click.option("--lambda-count", type=int, help="number of sweep values."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def step_options(func):
    options = [
        click.option("--N", "N", type=int, multiple=True, help="number of steps on [-L, 0]."),
        click.option("--h", "h", type=float, multiple=True, help="step size (N = ceil(L/h))."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def run_options(func):
    options = [
        click.option("--output", "-o", type=click.Path(dir_okay=False), help="output file [default: stdout]."),
        click.option("--jobs", type=int, default=None, help="worker threads [default: CPU count]."),
    ]
    for option in reversed(options):
        func = option(func)
    return func
