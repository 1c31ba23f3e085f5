"""Travelling-wave problem data.

A `ReactionModel` carries f'(u_hat(xi)) along the wave, its limits at
-infinity and +infinity, the wave speed and the rate at which the potentials

    phi_minus(xi) = f'(u_hat(xi)) - f'(u_hat_minus)
    phi_plus(xi)  = f'(u_hat(xi)) - f'(u_hat_plus)

decay in their tails. Three built-in models are provided (Nagumo front,
constant coefficient, Gaussian bump) and tabulated profiles can be ingested
from text files.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate
import scipy.special
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, ModelDomainError, ProfileFormatError

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-13
QUAD_LIMIT = 200
TAIL_TOLERANCE = 1e-15
TAIL_EXTENSIONS = 40
MIN_PROFILE_ROWS = 4

POTENTIAL_KINDS = ("Phi_minus_at", "Phi_plus_at", "Phi_total", "phi_prime_sq_total")

# nodes/weights of the 8-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class TabulatedProfile:
    """Samples of f'(u_hat) at strictly increasing abscissae.

    The interpolant is the not-a-knot cubic spline through the samples;
    it may only be evaluated inside the node range.
    """

    nodes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.nodes) < MIN_PROFILE_ROWS:
            raise ProfileFormatError(
                f"a profile needs at least {MIN_PROFILE_ROWS} rows, got {len(self.nodes)}"
            )
        if np.any(np.diff(self.nodes) <= 0):
            raise ProfileFormatError("profile abscissae must be strictly increasing")
        object.__setattr__(self, "_interpolant", CubicSpline(self.nodes, self.values))

    @property
    def xi_min(self):
        return float(self.nodes[0])

    @property
    def xi_max(self):
        return float(self.nodes[-1])

    def _check_range(self, xi):
        if np.any(xi < self.xi_min) or np.any(xi > self.xi_max):
            raise ModelDomainError(
                f"profile evaluated outside its node range [{self.xi_min}, {self.xi_max}]"
            )

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        self._check_range(xi)
        return self._interpolant(xi)

    def derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        self._check_range(xi)
        return self._interpolant(xi, 1)


@dataclass(frozen=True)
class ReactionModel:
    """Coefficient data of the linearisation about a travelling wave.

    Parameters:
    name (str): model family, e.g. "nagumo".
    fprime_along_wave (callable): xi -> f'(u_hat(xi)), vectorised.
    fprime_derivative (callable): xi -> d/dxi f'(u_hat(xi)), vectorised.
    fprime_minus, fprime_plus (float): limits of f'(u_hat) at -inf / +inf.
    speed_c (float): wave speed.
    decay_scale (float): exponential decay rate of the potential tails.
    recommended_L (float): truncation half-length for [-L, L].
    parameters (dict): the constructor arguments, for reports and fixtures.
    profile (TabulatedProfile or None): set for ingested profiles.
    """

    name: str
    fprime_along_wave: Callable = field(repr=False)
    fprime_derivative: Callable = field(repr=False)
    fprime_minus: float
    fprime_plus: float
    speed_c: float
    decay_scale: float
    recommended_L: float
    parameters: dict = field(default_factory=dict)
    profile: Optional[TabulatedProfile] = field(default=None, repr=False)

    def phi_minus(self, xi):
        return self.fprime_along_wave(xi) - self.fprime_minus

    def phi_plus(self, xi):
        return self.fprime_along_wave(xi) - self.fprime_plus

    def phi(self, side, xi):
        return self.phi_minus(xi) if side == "minus" else self.phi_plus(xi)

    def phi_prime(self, xi):
        return self.fprime_derivative(xi)


@dataclass(frozen=True)
class PotentialData:
    phi_minus: Callable
    phi_plus: Callable
    Phi_minus_at: Callable
    Phi_plus_at: Callable
    Phi_total: float


def _check_finite(**kwargs):
    for name, value in kwargs.items():
        if not np.isfinite(value):
            raise ModelDomainError(f"{name} must be finite, got {value}")


def make_nagumo(a):
    """Nagumo front f(u) = u(1-u)(u-a) with u_hat(xi) = 1/(1 + exp(-xi/sqrt(2))).

    The front rises from u_hat_minus = 0 to u_hat_plus = 1, so
    f'(u_hat_minus) = -a and f'(u_hat_plus) = a - 1, and the profile
    equation u'' + c u' + f(u) = 0 holds with c = (2a - 1)/sqrt(2).
    """
    _check_finite(a=a)
    if not 0.0 < a < 1.0:
        raise ModelDomainError(f"Nagumo threshold a must lie in (0, 1), got {a}")
    a = float(a)
    rate = 1.0 / math.sqrt(2.0)

    def fprime_along_wave(xi):
        u = scipy.special.expit(rate * np.asarray(xi, dtype=float))
        return -3.0 * u * u + 2.0 * (1.0 + a) * u - a

    def fprime_derivative(xi):
        u = scipy.special.expit(rate * np.asarray(xi, dtype=float))
        return (-6.0 * u + 2.0 * (1.0 + a)) * rate * u * (1.0 - u)

    return ReactionModel(
        name="nagumo",
        fprime_along_wave=fprime_along_wave,
        fprime_derivative=fprime_derivative,
        fprime_minus=-a,
        fprime_plus=a - 1.0,
        speed_c=(2.0 * a - 1.0) * rate,
        decay_scale=rate,
        recommended_L=45.0,
        parameters={"a": a},
    )


def nagumo_profile(a, xi):
    """u_hat and its first two derivatives, for profile-equation checks."""
    rate = 1.0 / math.sqrt(2.0)
    u = scipy.special.expit(rate * np.asarray(xi, dtype=float))
    du = rate * u * (1.0 - u)
    ddu = rate * (1.0 - 2.0 * u) * du
    return u, du, ddu


def make_constant(q, c):
    _check_finite(q=q, c=c)
    q = float(q)

    def fprime_along_wave(xi):
        return np.full(np.shape(xi), q)

    def fprime_derivative(xi):
        return np.zeros(np.shape(xi))

    return ReactionModel(
        name="constant",
        fprime_along_wave=fprime_along_wave,
        fprime_derivative=fprime_derivative,
        fprime_minus=q,
        fprime_plus=q,
        speed_c=float(c),
        decay_scale=1.0,
        recommended_L=10.0,
        parameters={"q": q, "c": float(c)},
    )


def make_bump(q, c, amplitude, width):
    """Gaussian potential phi(xi) = amplitude * exp(-(xi/width)^2) on a constant background q."""
    _check_finite(q=q, c=c, amplitude=amplitude, width=width)
    if width <= 0:
        raise ModelDomainError(f"bump width must be positive, got {width}")
    q, amplitude, width = float(q), float(amplitude), float(width)

    def bump(xi):
        return amplitude * np.exp(-((np.asarray(xi, dtype=float) / width) ** 2))

    def fprime_along_wave(xi):
        return q + bump(xi)

    def fprime_derivative(xi):
        return -2.0 * np.asarray(xi, dtype=float) / width**2 * bump(xi)

    return ReactionModel(
        name="bump",
        fprime_along_wave=fprime_along_wave,
        fprime_derivative=fprime_derivative,
        fprime_minus=q,
        fprime_plus=q,
        speed_c=float(c),
        decay_scale=1.0 / width**2,
        recommended_L=8.0 * width,
        parameters={"q": q, "c": float(c), "amplitude": amplitude, "width": width},
    )


def ingest_profile(stream):
    """
    Reads a tabulated profile: one "xi value" record per line, fields
    separated by whitespace or a comma, "#" starting a comment.

    Parameters:
    stream (iterable of str): an open text file or a list of lines.

    Returns:
    TabulatedProfile
    """
    nodes, values = [], []
    for lineno, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.replace(",", " ").split()
        if len(fields) != 2:
            raise ProfileFormatError(f"expected 2 fields, found {len(fields)}", line=lineno)
        try:
            xi, value = float(fields[0]), float(fields[1])
        except ValueError:
            raise ProfileFormatError(f"cannot parse {text!r} as numbers", line=lineno)
        if not (math.isfinite(xi) and math.isfinite(value)):
            raise ProfileFormatError("non-finite entry", line=lineno)
        if nodes and xi <= nodes[-1]:
            raise ProfileFormatError(
                f"abscissa {xi} does not increase (previous {nodes[-1]})", line=lineno
            )
        nodes.append(xi)
        values.append(value)
    logger.debug("ingested %d profile rows", len(nodes))
    return TabulatedProfile(np.array(nodes), np.array(values))


def make_profile_model(profile, c=0.0):
    """Model whose f'(u_hat) is the profile interpolant, held constant beyond the nodes."""
    _check_finite(c=c)

    def clamp(xi):
        return np.clip(np.asarray(xi, dtype=float), profile.xi_min, profile.xi_max)

    def fprime_derivative(xi):
        xi = np.asarray(xi, dtype=float)
        inside = (xi >= profile.xi_min) & (xi <= profile.xi_max)
        return np.where(inside, profile.derivative(clamp(xi)), 0.0)

    half_range = min(-profile.xi_min, profile.xi_max)
    return ReactionModel(
        name="profile",
        fprime_along_wave=lambda xi: profile(clamp(xi)),
        fprime_derivative=fprime_derivative,
        fprime_minus=float(profile.values[0]),
        fprime_plus=float(profile.values[-1]),
        speed_c=float(c),
        decay_scale=1.0,
        recommended_L=half_range if half_range > 0 else profile.xi_max - profile.xi_min,
        parameters={"c": float(c), "rows": len(profile.nodes)},
        profile=profile,
    )


def integrate(func, lower, upper, points=None):
    if lower == upper:
        return 0.0
    limit = QUAD_LIMIT
    if points is not None:
        points = [p for p in points if lower < p < upper]
        limit = max(QUAD_LIMIT, 2 * len(points) + 4)
        points = points or None
    result = scipy.integrate.quad(
        lambda x: float(func(x)), lower, upper,
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=limit, points=points, full_output=1,
    )
    if len(result) > 3:
        raise ConvergenceError(
            f"quadrature on [{lower}, {upper}] did not converge: {result[3]}"
        )
    return result[0]


def _tail_cutoff(model, func, sign):
    """Distance R beyond which |func| < TAIL_TOLERANCE on the side sign*R."""
    R = float(model.recommended_L)
    for _ in range(TAIL_EXTENSIONS):
        worst = abs(float(func(sign * R)))
        if worst < TAIL_TOLERANCE:
            return R
        R += max(R, math.log(worst / TAIL_TOLERANCE) / model.decay_scale)
    raise ConvergenceError(
        f"{model.name} potential does not decay below {TAIL_TOLERANCE} in the tail"
    )


def _breakpoints(model):
    return None if model.profile is None else list(model.profile.nodes)


def Phi_minus_at(model, xi):
    """Integral of phi_minus from -infinity to xi."""
    lower = min(-_tail_cutoff(model, model.phi_minus, -1.0), xi)
    return integrate(model.phi_minus, lower, xi, _breakpoints(model))


def Phi_plus_at(model, xi):
    """Integral of phi_plus from xi to +infinity."""
    upper = max(_tail_cutoff(model, model.phi_plus, 1.0), xi)
    return integrate(model.phi_plus, xi, upper, _breakpoints(model))


def quad_potential(model, kind, xi=0.0):
    """
    Potential integrals needed by the asymptotics and the error formulas.

    Parameters:
    model (ReactionModel): the model.
    kind (str): one of POTENTIAL_KINDS.
    xi (float): evaluation point for Phi_minus_at / Phi_plus_at.

    Returns:
    float
    """
    if kind == "Phi_minus_at":
        return Phi_minus_at(model, xi)
    if kind == "Phi_plus_at":
        return Phi_plus_at(model, xi)
    if kind == "Phi_total":
        return Phi_minus_at(model, 0.0) + Phi_plus_at(model, 0.0)
    if kind == "phi_prime_sq_total":
        R = max(
            _tail_cutoff(model, model.phi_prime, -1.0),
            _tail_cutoff(model, model.phi_prime, 1.0),
        )
        breakpoints = _breakpoints(model)
        return integrate(lambda x: model.phi_prime(x) ** 2, -R, 0.0, breakpoints) + integrate(
            lambda x: model.phi_prime(x) ** 2, 0.0, R, breakpoints
        )
    raise ValueError(f"unknown potential kind {kind!r}; expected one of {POTENTIAL_KINDS}")


def potential_data(model):
    return PotentialData(
        phi_minus=model.phi_minus,
        phi_plus=model.phi_plus,
        Phi_minus_at=lambda xi: Phi_minus_at(model, xi),
        Phi_plus_at=lambda xi: Phi_plus_at(model, xi),
        Phi_total=quad_potential(model, "Phi_total"),
    )


def interval_integrals(func, lower, upper):
    """Integrals of func over [lower[k], upper[k]] by 8-point Gauss-Legendre.

    Intervals with upper < lower are integrated with the opposite sign.
    """
    left = np.asarray(lower, dtype=float)[:, None]
    width = np.asarray(upper, dtype=float)[:, None] - left
    return (width * _GL_W * func(left + width * _GL_X)).sum(axis=1)


def potential_on_grid(model, side, nodes):
    """Phi_minus (side "minus") or Phi_plus (side "plus") at every node.

    Accumulates interval integrals from the first node, which is seeded by
    one adaptive quadrature.
    """
    nodes = np.asarray(nodes, dtype=float)
    if side == "minus":
        start = Phi_minus_at(model, nodes[0])
        steps = interval_integrals(model.phi_minus, nodes[:-1], nodes[1:])
    else:
        # integrating from xi to +inf: sign flips along increasing xi
        start = Phi_plus_at(model, nodes[0])
        steps = -interval_integrals(model.phi_plus, nodes[:-1], nodes[1:])
    return start + np.concatenate(([0.0], np.cumsum(steps)))
