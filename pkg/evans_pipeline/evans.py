"""Evans function evaluation and its large-lambda asymptotics.

D(lambda) is the wedge product of the two decaying solutions at xi = 0.
Both sides are integrated in transformed coordinates and the wedge is
formed from the transformed values and kappa_minus, kappa_plus.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleError, ModelDomainError, NumericalError
from .integrators import GridSpec, normalize_method, propagate
from .model import quad_potential
from .spectral import build_frame, principal_sqrt, require_admissible

logger = logging.getLogger(__name__)

ASYMPTOTIC_ORDERS = (0, 1, 2)


@dataclass(frozen=True)
class EvansResult:
    lam: complex
    value: complex
    minus_final: np.ndarray
    plus_final: np.ndarray
    grid: GridSpec
    method: str


@dataclass(frozen=True)
class AsymptoticSeries:
    Phi_total: float
    c: float
    fprime_minus: float
    fprime_plus: float
    order: int = 2

    def __post_init__(self):
        if self.order not in ASYMPTOTIC_ORDERS:
            raise ModelDomainError(
                f"asymptotic order must be one of {ASYMPTOTIC_ORDERS}, got {self.order}"
            )


def combine(frame, minus_final, plus_final):
    """(B_minus y_minus) ^ (B_plus y_plus) written in the transformed components."""
    require_admissible(frame)
    u_m, v_m = minus_final
    u_p, v_p = plus_final
    k_m, k_p = frame.kappa_minus, frame.kappa_plus
    return complex(
        0.5 * (k_m - k_p) * (v_m * v_p - u_m * u_p)
        + 0.5 * (k_m + k_p) * (v_m * u_p - u_m * v_p)
    )


def check_admissible(model, lambdas):
    """Raise one InadmissibleError listing every inadmissible lambda."""
    bad = [lam for lam in lambdas if not build_frame(model, lam).admissible]
    if bad:
        listed = ", ".join(str(complex(lam)) for lam in bad)
        raise InadmissibleError(
            f"{len(bad)} inadmissible lambda value(s) (Re kappa <= 0): {listed}"
        )


def evaluate_evans(model, lam, grid, method="magnus4"):
    method = normalize_method(method)
    frame = build_frame(model, lam)
    require_admissible(frame)
    try:
        minus = propagate(model, frame, grid, method, "minus")
        plus = propagate(model, frame, grid, method, "plus")
    except NumericalError as exc:
        if exc.lam is not None:
            raise
        raise type(exc)(f"lambda = {frame.lam}: {exc}", lam=frame.lam) from exc
    value = combine(frame, minus.final, plus.final)
    if not np.isfinite(value):
        raise NumericalError(f"Evans function not finite at lambda = {frame.lam}", lam=frame.lam)
    return EvansResult(frame.lam, value, minus.final, plus.final, grid, method)


def evans_sweep(model, lambdas, grid, method="magnus4", jobs=1):
    """evaluate_evans over many lambdas, results in input order."""
    check_admissible(model, lambdas)
    if jobs is None or jobs <= 1 or len(lambdas) <= 1:
        return [evaluate_evans(model, lam, grid, method) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda lam: evaluate_evans(model, lam, grid, method), lambdas))


def asymptotic_series(model, order=2):
    return AsymptoticSeries(
        Phi_total=quad_potential(model, "Phi_total"),
        c=model.speed_c,
        fprime_minus=model.fprime_minus,
        fprime_plus=model.fprime_plus,
        order=order,
    )


def asymptotic_evans(series, lam, order=None):
    """
    Large-lambda expansion of D:

        -2 lambda^(1/2) + Phi - (Phi^2 - 2 f'_minus - 2 f'_plus + c^2) / (4 lambda^(1/2))

    truncated after `order` terms beyond the leading one (default: series.order).
    """
    order = series.order if order is None else order
    if order not in ASYMPTOTIC_ORDERS:
        raise ModelDomainError(f"asymptotic order must be one of {ASYMPTOTIC_ORDERS}")
    lam = complex(lam)
    if lam == 0:
        raise ModelDomainError("the asymptotic series is not defined at lambda = 0")
    root = principal_sqrt(lam)
    value = -2.0 * root
    if order >= 1:
        value += series.Phi_total
    if order >= 2:
        coefficient = (
            series.Phi_total**2
            - 2.0 * series.fprime_minus
            - 2.0 * series.fprime_plus
            + series.c**2
        )
        value -= 0.25 * coefficient / root
    return complex(value)
