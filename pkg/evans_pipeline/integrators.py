"""One-step maps and full-interval propagation.

Three methods are provided for y' = G(xi) y with a 2x2 generator G:

    midpoint         y_{k+1} = exp(h G(xi_k + h/2)) y_k
    magnus4          y_{k+1} = exp(h/2 (G1 + G2) - sqrt(3)/12 h^2 [G1, G2]) y_k
    gauss_legendre4  two-stage Gauss-Legendre Runge-Kutta, stages solved exactly

with G1, G2 sampled at the Gauss-Legendre points of the step. A negative h
is a backward step; the abscissae then mirror automatically.

Generators are callables mapping an array of abscissae to an array of
2x2 matrices (see spectral.raw_generator / spectral.transformed_generator).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PropagationOverflow, SingularSystemError
from .linalg import IDENTITY, commutator, expm2, solve2n
from .spectral import (
    boundary_values,
    gauss_points,
    raw_generator,
    require_admissible,
    transformed_generator,
)

logger = logging.getLogger(__name__)

METHODS = ("midpoint", "magnus4", "gauss_legendre4")
METHOD_ALIASES = {"gl4": "gauss_legendre4", "m2": "midpoint", "m4": "magnus4"}
COORDINATES = ("raw", "transformed")
OVERFLOW_LIMIT = 1e300

SQRT3 = math.sqrt(3.0)
SIGMA1 = 0.25 - SQRT3 / 6.0
SIGMA2 = 0.25 + SQRT3 / 6.0


def normalize_method(method):
    method = METHOD_ALIASES.get(method, method)
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return method


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of N steps on [-L, 0] (and mirrored on [0, L]); h = L/N."""

    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ConfigError(f"L must be positive and finite, got {self.L}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_h(cls, L, h):
        if not h > 0:
            raise ConfigError(f"h must be positive, got {h}")
        ratio = L / h
        N = math.ceil(ratio - 1e-9 * ratio)
        if abs(N - ratio) > 1e-9 * ratio:
            logger.warning(
                "L/h = %.12g is not an integer; using N = %d (h = %.12g)", ratio, N, L / N
            )
        return cls(L, N)

    @property
    def h(self):
        return self.L / self.N

    @property
    def gauss_offsets(self):
        return (0.5 - SQRT3 / 6.0) * self.h, (0.5 + SQRT3 / 6.0) * self.h

    def nodes(self, side):
        """xi_0 .. xi_N in stepping order: -L .. 0 (minus) or L .. 0 (plus)."""
        k = np.arange(self.N + 1)
        nodes = self.L * (k / self.N - 1.0)
        nodes[-1] = 0.0
        return nodes if side == "minus" else -nodes

    def signed_h(self, side):
        return self.h if side == "minus" else -self.h


def _gl4_map(A1, A2, h):
    block = np.empty((4, 4), dtype=complex)
    block[:2, :2] = IDENTITY - 0.25 * h * A1
    block[:2, 2:] = -SIGMA1 * h * A1
    block[2:, :2] = -SIGMA2 * h * A2
    block[2:, 2:] = IDENTITY - 0.25 * h * A2
    stages = solve2n(block, np.vstack([A1, A2]))
    return IDENTITY + 0.5 * h * (stages[:2] + stages[2:])


def step_maps(method, generator, xi_k, h):
    """Step maps of `method` for every start abscissa in xi_k (shape (..., 2, 2))."""
    xi_k = np.asarray(xi_k, dtype=float)
    if method == "midpoint":
        return expm2(h * generator(xi_k + 0.5 * h))
    A1, A2 = (generator(x) for x in gauss_points(xi_k, h))
    if method == "magnus4":
        omega = 0.5 * h * (A1 + A2) - SQRT3 / 12.0 * h * h * commutator(A1, A2)
        return expm2(omega)
    if method == "gauss_legendre4":
        flat1, flat2 = A1.reshape(-1, 2, 2), A2.reshape(-1, 2, 2)
        maps = np.empty_like(flat1)
        for k, xi in enumerate(xi_k.ravel()):
            try:
                maps[k] = _gl4_map(flat1[k], flat2[k], h)
            except SingularSystemError as exc:
                raise SingularSystemError(
                    f"Gauss-Legendre stage system singular at xi_k = {xi}, h = {h}: {exc}"
                ) from exc
        return maps.reshape(A1.shape)
    raise ValueError(f"unknown method {method!r}")


def step_matrix(method, generator, xi_k, h):
    return step_maps(method, generator, np.array([xi_k], dtype=float), h)[0]


def step_midpoint(generator, xi_k, h, y):
    return step_matrix("midpoint", generator, xi_k, h) @ y


def step_magnus4(generator, xi_k, h, y):
    return step_matrix("magnus4", generator, xi_k, h) @ y


def step_gl4(generator, xi_k, h, y):
    return step_matrix("gauss_legendre4", generator, xi_k, h) @ y


@dataclass(frozen=True)
class PropagationResult:
    side: str
    coordinates: str
    method: str
    nodes: np.ndarray
    step_maps: np.ndarray
    trajectory: np.ndarray

    @property
    def final(self):
        return self.trajectory[-1]


def generator_for(model, frame, side, coordinates):
    if coordinates == "transformed":
        return lambda xi: transformed_generator(model, frame, side, xi)
    if coordinates == "raw":
        return lambda xi: raw_generator(model, frame, xi)
    raise ValueError(f"coordinates must be one of {COORDINATES}, got {coordinates!r}")


def apply_maps(maps, y0):
    """Trajectory y_0, M_0 y_0, M_1 M_0 y_0, ... for a stack of step maps."""
    trajectory = np.empty((len(maps) + 1, 2), dtype=complex)
    u, v = complex(y0[0]), complex(y0[1])
    trajectory[0] = u, v
    for k, ((a, b), (c, d)) in enumerate(maps.tolist(), start=1):
        u, v = a * u + b * v, c * u + d * v
        trajectory[k] = u, v
    return trajectory


def propagate(model, frame, grid, method, side, coordinates="transformed"):
    """
    Integrate the decaying solution of one side up to xi = 0.

    Parameters:
    model (ReactionModel): the model.
    frame (SpectralFrame): admissible frame for lambda.
    grid (GridSpec): L and N.
    method (str): one of METHODS.
    side (str): "minus" integrates forwards from -L, "plus" backwards from L.
    coordinates (str): "transformed" (default) or "raw".

    Returns:
    PropagationResult
    """
    require_admissible(frame)
    nodes = grid.nodes(side)
    y0 = boundary_values(frame, side, coordinates, nodes[0])
    if coordinates == "raw" and (not np.all(np.isfinite(y0)) or not np.any(y0)):
        raise PropagationOverflow(
            f"raw start vector at xi = {nodes[0]} is not representable "
            f"for lambda = {frame.lam}; use transformed coordinates",
            lam=frame.lam,
        )
    maps = step_maps(method, generator_for(model, frame, side, coordinates), nodes[:-1],
                     grid.signed_h(side))
    trajectory = apply_maps(maps, y0)

    magnitude = np.abs(trajectory).max(axis=1)
    bad = ~np.isfinite(magnitude) | (magnitude > OVERFLOW_LIMIT)
    if np.any(bad):
        k = int(np.argmax(bad))
        advice = "; use transformed coordinates" if coordinates == "raw" else ""
        raise PropagationOverflow(
            f"{side}-side solution overflowed at xi = {nodes[k]} "
            f"for lambda = {frame.lam}{advice}",
            lam=frame.lam,
        )
    logger.debug("propagated %s side with %s, N = %d", side, method, grid.N)
    return PropagationResult(side, coordinates, method, nodes, maps, trajectory)
