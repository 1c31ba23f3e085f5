"""Per-lambda spectral data and the large-kappa expansions.

For a model with limits f'_minus, f'_plus and speed c,

    kappa_pm = sqrt(c^2 + 4 (lambda - f'_pm))      (principal branch)
    mu_pm    = (-c +- kappa_pm) / 2
    B_pm     = [[1, 1], [mu_pm^[1], mu_pm^[2]]]

The transformed generators remove the growing (minus side) or decaying
(plus side) exponential so that the solutions stay bounded.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleError, SectorError
from .linalg import matrix, vector
from .model import quad_potential

SIDES = ("minus", "plus")
EXPANSION_ORDERS = (0, 1, 2)
STIFF_SECTOR = 5.0
SQRT3 = math.sqrt(3.0)


def principal_sqrt(z):
    """Square root with Re >= 0; on the cut Re = 0 the root with Im >= 0."""
    root = np.sqrt(np.asarray(z, dtype=complex))
    root = np.where((root.real == 0) & (root.imag < 0), -root, root)
    if root.ndim == 0:
        return complex(root)
    return root


@dataclass(frozen=True)
class SpectralFrame:
    lam: complex
    c: float
    kappa_minus: complex
    kappa_plus: complex
    mu: tuple
    B_minus: np.ndarray
    B_plus: np.ndarray
    admissible: bool

    def kappa(self, side):
        return self.kappa_minus if side == "minus" else self.kappa_plus

    def B(self, side):
        return self.B_minus if side == "minus" else self.B_plus

    @property
    def mu_minus(self):
        return self.mu[0], self.mu[1]

    @property
    def mu_plus(self):
        return self.mu[2], self.mu[3]


def build_frame(model, lam):
    lam = complex(lam)
    c = model.speed_c
    kappa_minus = principal_sqrt(c * c + 4.0 * (lam - model.fprime_minus))
    kappa_plus = principal_sqrt(c * c + 4.0 * (lam - model.fprime_plus))
    mu = (
        0.5 * (-c + kappa_minus),
        0.5 * (-c - kappa_minus),
        0.5 * (-c + kappa_plus),
        0.5 * (-c - kappa_plus),
    )
    return SpectralFrame(
        lam=lam,
        c=c,
        kappa_minus=kappa_minus,
        kappa_plus=kappa_plus,
        mu=mu,
        B_minus=matrix(1.0, 1.0, mu[0], mu[1]),
        B_plus=matrix(1.0, 1.0, mu[2], mu[3]),
        admissible=kappa_minus.real > 0 and kappa_plus.real > 0,
    )


def require_admissible(frame):
    if not frame.admissible:
        raise InadmissibleError(
            f"lambda = {frame.lam} is not admissible "
            f"(kappa_minus = {frame.kappa_minus:.6g}, kappa_plus = {frame.kappa_plus:.6g})"
        )


def _check_side(side):
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


def raw_generator(model, frame, xi):
    """A(xi; lambda) = [[0, 1], [lambda - f'(u_hat(xi)), -c]], vectorised in xi."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = 1.0
    out[..., 1, 0] = frame.lam - model.fprime_along_wave(xi)
    out[..., 1, 1] = -frame.c
    return out


def transformed_generator(model, frame, side, xi):
    """
    B^-1 A B - mu^[1] I on the minus side, B^-1 A B - mu^[2] I on the plus side.

    Parameters:
    model (ReactionModel): the model.
    frame (SpectralFrame): admissible frame for lambda.
    side (str): "minus" or "plus".
    xi (float or array): abscissae.

    Returns:
    array of shape xi.shape + (2, 2)
    """
    require_admissible(frame)
    _check_side(side)
    xi = np.asarray(xi, dtype=float)
    kappa = frame.kappa(side)
    ratio = model.phi(side, xi) / kappa
    out = np.empty(xi.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = -ratio
    out[..., 1, 0] = ratio
    if side == "minus":
        out[..., 0, 0] = -ratio
        out[..., 1, 1] = -kappa + ratio
    else:
        out[..., 0, 0] = kappa - ratio
        out[..., 1, 1] = ratio
    return out


def boundary_values(frame, side, coordinates, xi0=0.0):
    """Start vector of the decaying solution at xi0.

    In transformed coordinates this is (1, 0) on the minus side and (0, 1) on
    the plus side; raw coordinates carry the exponential factor back.
    """
    _check_side(side)
    if coordinates == "transformed":
        return vector(1.0, 0.0) if side == "minus" else vector(0.0, 1.0)
    if side == "minus":
        mu = frame.mu[0]
    else:
        mu = frame.mu[3]
    return np.exp(mu * xi0) * vector(1.0, mu)


def boundary_layer_solution(model, frame, side, xi, order=2):
    """Large-kappa expansion of the decaying transformed solution at xi.

    Minus side: (1 - Phi/kappa + Phi^2/(2 kappa^2), phi/kappa^2) with the
    minus-side potentials; the plus side is its mirror image with the
    components exchanged.
    """
    require_admissible(frame)
    _check_side(side)
    if order not in EXPANSION_ORDERS:
        raise ValueError(f"expansion order must be one of {EXPANSION_ORDERS}, got {order}")
    kappa = frame.kappa(side)
    leading, trailing = 1.0 + 0j, 0j
    if order >= 1:
        Phi = quad_potential(model, f"Phi_{side}_at", xi)
        leading -= Phi / kappa
        if order == 2:
            leading += 0.5 * Phi * Phi / kappa**2
            trailing = complex(model.phi(side, xi)) / kappa**2
    if side == "minus":
        return vector(leading, trailing)
    return vector(trailing, leading)


def gauss_points(xi_k, h):
    """The two Gauss-Legendre abscissae of the step from xi_k to xi_k + h."""
    return xi_k + (0.5 - SQRT3 / 6.0) * h, xi_k + (0.5 + SQRT3 / 6.0) * h


def _forward_expansion(phi, kappa, method, xi_k, h):
    """Expansion of the forward minus-side step map with potential phi."""
    if method == "midpoint":
        p = complex(phi(xi_k + 0.5 * h))
        return matrix(
            1.0 - h * p / kappa + (h * p) ** 2 / (2.0 * kappa**2),
            -p / kappa**2,
            p / kappa**2,
            -(p**2) / kappa**4,
        )
    p1, p2 = (complex(phi(x)) for x in gauss_points(xi_k, h))
    alpha = 0.5 * (p1 + p2)
    beta = -SQRT3 / 12.0 * h * (p1 - p2)
    if method == "magnus4":
        chi = alpha - beta**2
        return matrix(
            1.0 - h * chi / kappa + ((h * chi) ** 2 - 2.0 * beta**2) / (2.0 * kappa**2),
            beta / kappa - (alpha + h * chi * beta) / kappa**2,
            beta / kappa + (alpha - h * chi * beta) / kappa**2,
            beta**2 / kappa**2,
        )
    if method == "gauss_legendre4":
        hk = h * kappa
        off = 12.0 * beta / (h * kappa**2)
        return matrix(
            1.0 - h * alpha / kappa + (h * alpha) ** 2 / (2.0 * kappa**2),
            off,
            off,
            1.0 - 12.0 / hk + 72.0 / hk**2,
        )
    raise ValueError(f"unknown method {method!r}")


def onestep_stiff_expansion(model, frame, method, xi_k, h, side="minus"):
    """
    Large-kappa expansion of one transformed step map, up to exponentially
    small terms.

    On the minus side the step goes from xi_k to xi_k + h; on the plus side
    it goes backwards from xi_k to xi_k - h. h is the (positive) step length.
    """
    require_admissible(frame)
    _check_side(side)
    kappa = frame.kappa(side)
    if (h * kappa).real < STIFF_SECTOR:
        raise SectorError(
            f"Re(h*kappa) = {(h * kappa).real:.3g} < {STIFF_SECTOR}: "
            "stiff expansion not valid for this step"
        )
    if side == "minus":
        return _forward_expansion(model.phi_minus, kappa, method, xi_k, h)
    mirrored = _forward_expansion(lambda s: model.phi_plus(-s), kappa, method, -xi_k, h)
    return mirrored[::-1, ::-1].copy()
