"""Evans function evaluation for scalar travelling waves, with the
error-analysis harness for the exponential midpoint, fourth-order Magnus
and Gauss-Legendre integrators."""

from .errors import (
    ConfigError,
    ConvergenceError,
    EvansError,
    InadmissibleError,
    LinalgError,
    NumericalError,
    PropagationOverflow,
    SectorError,
)
from .evans import asymptotic_evans, asymptotic_series, evaluate_evans, evans_sweep
from .integrators import GridSpec, propagate
from .model import ingest_profile, make_bump, make_constant, make_nagumo, make_profile_model
from .spectral import build_frame

__version__ = "1.0.0"
