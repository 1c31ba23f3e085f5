"""Complex 2-vector and 2x2-matrix kernels.

Vectors are numpy arrays of shape (2,) and matrices arrays of shape (2, 2),
both complex. `wedge`, `commutator` and `expm2` also accept stacks
(..., 2) / (..., 2, 2) so that the step maps of a whole grid can be formed
in one call.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import LinalgError, SingularSystemError

logger = logging.getLogger(__name__)

C2Vector = NDArray[np.complex128]
C2Matrix = NDArray[np.complex128]

# relative to the max-entry norm of the argument
DEGENERACY_THRESHOLD = 1e-6
PIVOT_THRESHOLD = 1e-14

IDENTITY = np.eye(2, dtype=complex)


def vector(u, v):
    return np.array([u, v], dtype=complex)


def matrix(a11, a12, a21, a22):
    return np.array([[a11, a12], [a21, a22]], dtype=complex)


def max_norm(M):
    return np.max(np.abs(M), axis=(-2, -1))


def wedge(a, b):
    """Wedge product a ^ b = a_u b_v - a_v b_u (the 2x2 determinant [a | b])."""
    a = np.asarray(a)
    b = np.asarray(b)
    value = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    if np.ndim(value) == 0:
        return complex(value)
    return value


def commutator(X, Y):
    return X @ Y - Y @ X


def _split(a, b, c, d):
    """Eigenvalues and the diagonals of M - lambda_i I without cancellation.

    With delta = (a - d)/2 and s = sqrt(delta^2 + bc) the eigenvalues are
    (a + d)/2 +- s. The smaller eigenvalue is recovered from det/larger and
    the smaller of p = delta + s, q = delta - s from p q = -bc.
    """
    half_trace = 0.5 * (a + d)
    delta = 0.5 * (a - d)
    bc = b * c
    s = np.sqrt(delta * delta + bc)
    det = a * d - bc
    lam1 = half_trace + s
    lam2 = half_trace - s
    p = delta + s
    q = delta - s
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.abs(lam1) >= np.abs(lam2)
        lam1, lam2 = (
            np.where(first | (lam2 == 0), lam1, det / lam2),
            np.where(first & (lam1 != 0), det / lam1, lam2),
        )
        first = np.abs(p) >= np.abs(q)
        p, q = (
            np.where(first | (q == 0), p, -bc / q),
            np.where(first & (p != 0), -bc / p, q),
        )
    return lam1, lam2, s, p, q


@dataclass(frozen=True)
class Eigen2:
    """Eigen-decomposition of a 2x2 matrix.

    V has unit first row, so its columns are (1, v1) and (1, v2);
    `discriminant` is (lambda1 - lambda2)^2 = trace^2 - 4 det.
    """

    lambda1: complex
    lambda2: complex
    V: C2Matrix
    discriminant: complex


def eigen2(M):
    M = np.asarray(M, dtype=complex)
    a, b, c, d = M.ravel()
    lam1, lam2, s, p, q = (complex(x) for x in _split(a, b, c, d))
    if b != 0:
        v1, v2 = -q / b, -p / b
    elif p != 0 and q != 0:
        v1, v2 = c / p, c / q
    else:
        raise LinalgError(
            "matrix has an eigenvector with vanishing first entry; "
            "no eigenvector matrix with unit first row"
        )
    return Eigen2(lam1, lam2, matrix(1.0, 1.0, v1, v2), 4.0 * s * s)


def expm2(M):
    """Matrix exponential of a 2x2 matrix (or a stack of them).

    Uses the spectral projectors exp(M) = e^l1 P1 + e^l2 P2 when the
    eigenvalues are separated by more than DEGENERACY_THRESHOLD * |M|_max,
    and scaling-and-squaring (scipy.linalg.expm) otherwise.
    """
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise LinalgError("matrix exponential of a non-finite matrix")
    shape = M.shape
    M = M.reshape(-1, 2, 2)
    a, b, c, d = M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1]
    lam1, lam2, s, p, q = _split(a, b, c, d)
    degenerate = np.abs(2.0 * s) <= DEGENERACY_THRESHOLD * max_norm(M)

    out = np.empty_like(M)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e1 = np.exp(lam1) / (2.0 * s)
        e2 = np.exp(lam2) / (2.0 * s)
        out[:, 0, 0] = e1 * p - e2 * q
        out[:, 0, 1] = (e1 - e2) * b
        out[:, 1, 0] = (e1 - e2) * c
        out[:, 1, 1] = e2 * p - e1 * q

    if np.any(degenerate):
        logger.debug(
            "expm2: %d of %d matrices near eigenvalue coalescence, "
            "using scaling-and-squaring", int(degenerate.sum()), len(M)
        )
        out[degenerate] = scipy.linalg.expm(M[degenerate])

    if not np.all(np.isfinite(out)):
        raise LinalgError("matrix exponential overflowed or did not converge")
    return out.reshape(shape)


def solve2n(A, b):
    """Solve the 4x4 complex system A x = b by LU with partial pivoting.

    `b` may hold several right-hand sides as columns.
    """
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.shape != (4, 4):
        raise LinalgError(f"solve2n expects a 4x4 block, got {A.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A)
    smallest = np.min(np.abs(np.diag(lu)))
    if not smallest > PIVOT_THRESHOLD * np.max(np.abs(A)):
        raise SingularSystemError(
            f"singular 4x4 system (smallest pivot {smallest:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), b)
