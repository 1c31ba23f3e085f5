"""Measured and predicted discretisation errors.

Sign convention throughout: an error is numerical value minus reference
value, E_D = D_method - D_reference, E_k = y_k - y(xi_k).

The plus side is handled through the mirror relation: the backward plus
problem with potential phi_plus(xi) is the forward minus problem with
potential phi_plus(-s) after exchanging the two components.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, ConvergenceError, SectorError
from .evans import evaluate_evans
from .integrators import GridSpec, normalize_method, propagate
from .model import integrate, interval_integrals, potential_on_grid, quad_potential
from .spectral import STIFF_SECTOR, build_frame, gauss_points, require_admissible

logger = logging.getLogger(__name__)

REFERENCE_TOLERANCE = 1e-12
REFERENCE_MIN_N = 256
REFERENCE_DOUBLINGS = 8
SQRT3 = math.sqrt(3.0)
EULER_MACLAURIN_RULES = ("midpoint_sum", "gl_pair_sum")


@dataclass(frozen=True)
class ErrorReport:
    method: str
    lam: complex
    grid: GridSpec
    measured_E_D: complex
    predicted_E_D: Optional[complex]
    ratio: Optional[float]


@dataclass(frozen=True)
class OrderFit:
    samples: tuple
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class LocalErrorTerms:
    """Leading coefficients of the local error of one step.

    midpoint uses gamma, delta; magnus4 gamma, alpha, beta, chi;
    gauss_legendre4 La, Lb, Lc (with alpha, beta).
    """

    method: str
    gamma: Optional[complex] = None
    delta: Optional[complex] = None
    alpha: Optional[complex] = None
    beta: Optional[complex] = None
    chi: Optional[complex] = None
    La: Optional[complex] = None
    Lb: Optional[complex] = None
    Lc: Optional[complex] = None


def reference_run(model, lam, L):
    """magnus4 values at N, 2N, 4N, ... with one Richardson step per doubling.

    Stops when two successive plain values agree, returning the finer one, or
    when two successive extrapolations (16 D_2N - D_N) / 15 agree, returning
    the latest extrapolation. Agreement means a difference below
    REFERENCE_TOLERANCE * max(1, |D|). Returns the value and the finest N.
    """
    N = max(REFERENCE_MIN_N, math.ceil(8 * L))
    previous = evaluate_evans(model, lam, GridSpec(L, N), "magnus4").value
    extrapolated = None
    for _ in range(REFERENCE_DOUBLINGS):
        N *= 2
        current = evaluate_evans(model, lam, GridSpec(L, N), "magnus4").value
        tolerance = REFERENCE_TOLERANCE * max(1.0, abs(current))
        change = abs(current - previous)
        logger.debug("reference lambda=%s N=%d change=%.3e", lam, N, change)
        if change < tolerance:
            return current, N
        # magnus4 error is h^4 to leading order
        richardson = (16.0 * current - previous) / 15.0
        if extrapolated is not None and abs(richardson - extrapolated) < tolerance:
            return richardson, N
        extrapolated, previous = richardson, current
    raise ConvergenceError(
        f"reference Evans value at lambda = {lam} did not converge after "
        f"{REFERENCE_DOUBLINGS} doublings (N = {N}, last change {change:.3e})",
        lam=complex(lam),
    )


def reference_evans(model, lam, L):
    return reference_run(model, lam, L)[0]


def _signed_quadrature_defect(model, grid, rule):
    """Composite-rule sum minus integral, phi_minus on [-L, 0], phi_plus on [0, L]."""
    h, N, L = grid.h, grid.N, grid.L
    left = -L + h * np.arange(N)
    right = h * np.arange(N)
    if rule == "midpoint_sum":
        rule_sum = h * (
            model.phi_minus(left + 0.5 * h).sum() + model.phi_plus(right + 0.5 * h).sum()
        )
    elif rule == "gl_pair_sum":
        rule_sum = 0.5 * h * sum(
            model.phi_minus(x).sum() for x in gauss_points(left, h)
        ) + 0.5 * h * sum(model.phi_plus(x).sum() for x in gauss_points(right, h))
    else:
        raise ConfigError(f"unknown rule {rule!r}; expected one of {EULER_MACLAURIN_RULES}")
    exact = integrate(model.phi_minus, -L, 0.0) + integrate(model.phi_plus, 0.0, L)
    return float(rule_sum - exact)


def euler_maclaurin_residual(model, grid, rule):
    return abs(_signed_quadrature_defect(model, grid, rule))


def predict_evans_error(model, lam, grid, method):
    """
    Leading-order E_D, or None where only an order bound is known.

    midpoint: h sum phi(midpoints) - integral of phi over [-L, L];
    magnus4: -(h^4 / 144) * integral of phi'^2;
    gauss_legendre4: None.
    """
    method = normalize_method(method)
    require_admissible(build_frame(model, lam))
    if method == "midpoint":
        return complex(_signed_quadrature_defect(model, grid, "midpoint_sum"))
    if method == "magnus4":
        return complex(-(grid.h**4) / 144.0 * quad_potential(model, "phi_prime_sq_total"))
    return None


def measure_evans_error(model, lam, grid, method, reference=None):
    method = normalize_method(method)
    if reference is None:
        reference = reference_evans(model, lam, grid.L)
    measured = evaluate_evans(model, lam, grid, method).value - reference
    predicted = predict_evans_error(model, lam, grid, method)
    ratio = None
    if predicted is not None and abs(predicted) > 0:
        ratio = float((measured / predicted).real)
    return ErrorReport(method, complex(lam), grid, complex(measured), predicted, ratio)


def _side_potential(model, side):
    """Potential of the equivalent forward minus-side problem."""
    if side == "minus":
        return model.phi_minus
    return lambda s: model.phi_plus(-np.asarray(s, dtype=float))


def _terms(method, phi, Phi_nodes, nodes, h):
    """Local error coefficients for steps starting at `nodes` (forward, minus form)."""
    nodes = np.asarray(nodes, dtype=float)
    exact = interval_integrals(phi, nodes, nodes + h)
    if method == "midpoint":
        return {
            "gamma": exact - h * phi(nodes + 0.5 * h),
            "delta": phi(nodes + 0.5 * h) - phi(nodes + h),
        }
    phi1, phi2 = (phi(x) for x in gauss_points(nodes, h))
    alpha = 0.5 * (phi1 + phi2)
    beta = -SQRT3 / 12.0 * h * (phi1 - phi2)
    if method == "magnus4":
        chi = alpha - beta**2
        return {"gamma": exact - h * chi, "alpha": alpha, "beta": beta, "chi": chi}
    La = exact - h * alpha
    return {
        "alpha": alpha,
        "beta": beta,
        "La": La,
        "Lb": -La * (0.5 * La + Phi_nodes + h * alpha),
        "Lc": phi(nodes) - phi(nodes + h) + 12.0 * beta / h,
    }


def local_error_terms(model, frame, method, xi_k, h, side="minus"):
    """
    Local error coefficients of the step from xi_k (forwards on the minus
    side, backwards on the plus side) with step length h > 0.
    """
    require_admissible(frame)
    method = normalize_method(method)
    if side == "minus":
        Phi = quad_potential(model, "Phi_minus_at", xi_k) if method == "gauss_legendre4" else 0.0
        s = xi_k
    else:
        Phi = quad_potential(model, "Phi_plus_at", xi_k) if method == "gauss_legendre4" else 0.0
        s = -xi_k
    terms = _terms(method, _side_potential(model, side), np.array([Phi]), np.array([s]), h)
    return LocalErrorTerms(method, **{k: complex(v[0]) for k, v in terms.items()})


def _check_sector(frame, side, h):
    value = (h * frame.kappa(side)).real
    if value < STIFF_SECTOR:
        raise SectorError(
            f"Re(h*kappa_{side}) = {value:.3g} < {STIFF_SECTOR}; "
            "the leading-order global error is only valid in the stiff sector"
        )


def predicted_global_error(model, frame, grid, method, side, k):
    """Leading-order transformed global error E_k at node k of `side`."""
    require_admissible(frame)
    method = normalize_method(method)
    _check_sector(frame, side, grid.h)
    if not 0 <= k <= grid.N:
        raise ConfigError(f"node index {k} outside 0..{grid.N}")
    kappa = frame.kappa(side)
    if k == 0:
        return np.zeros(2, dtype=complex)

    h = grid.h
    s_nodes = grid.nodes("minus")[:k]
    Phi_nodes = 0.0
    if method == "gauss_legendre4":
        Phi_nodes = potential_on_grid(model, side, grid.nodes(side))[:k]
    terms = _terms(method, _side_potential(model, side), Phi_nodes, s_nodes, h)

    if method == "midpoint":
        first = terms["gamma"].sum() / kappa
        second = terms["delta"][-1] / kappa**2
    elif method == "magnus4":
        first = terms["gamma"].sum() / kappa
        second = terms["beta"][-1] / kappa
    else:
        La = terms["La"]
        earlier = np.concatenate(([0.0], np.cumsum(La)[:-1]))
        first = La.sum() / kappa + (terms["Lb"] - h * terms["alpha"] * earlier).sum() / kappa**2
        second = terms["Lc"].sum() / kappa**2

    if side == "minus":
        return np.array([first, second], dtype=complex)
    return np.array([second, first], dtype=complex)


def measured_global_error(model, frame, grid, method, side, refine=32):
    """Transformed trajectory minus a magnus4 run with step h/refine, at the grid nodes."""
    method = normalize_method(method)
    numerical = propagate(model, frame, grid, method, side)
    fine = propagate(model, frame, GridSpec(grid.L, grid.N * refine), "magnus4", side)
    return numerical.trajectory - fine.trajectory[::refine]


def recursion_defect(result, reference):
    """
    Largest violation of E_{k+1} = Psi_k E_k + L_k, where Psi_k are the step
    maps of `result`, E_k = result.trajectory - reference and
    L_k = Psi_k reference_k - reference_{k+1}.
    """
    reference = np.asarray(reference, dtype=complex)
    maps = result.step_maps
    error = result.trajectory - reference
    local = np.einsum("kij,kj->ki", maps, reference[:-1]) - reference[1:]
    propagated = np.einsum("kij,kj->ki", maps, error[:-1]) + local
    return float(np.abs(error[1:] - propagated).max())


def fit_order(samples):
    """Least-squares slope of log(error) against log(abscissa)."""
    samples = tuple((float(x), float(e)) for x, e in samples)
    if len(samples) < 3:
        raise ConfigError(f"an order fit needs at least 3 samples, got {len(samples)}")
    x, e = np.array(samples).T
    if np.any(x <= 0) or np.any(e <= 0):
        raise ConfigError("order fit samples must be positive")
    log_x, log_e = np.log(x), np.log(e)
    if np.ptp(log_x) == 0:
        raise ConfigError("order fit abscissae are all equal")
    slope, intercept = np.polyfit(log_x, log_e, 1)
    residual = np.abs(log_e - (slope * log_x + intercept)).max()
    return OrderFit(samples, float(slope), float(intercept), float(residual))
