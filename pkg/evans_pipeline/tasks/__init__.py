"""Command-line tasks. Each module exposes register(cli)."""

from . import converge, evaluate, fixture, plotscript, predict, sweep_lambda

TASKS = (evaluate, converge, sweep_lambda, predict, plotscript, fixture)
