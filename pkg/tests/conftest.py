import math

import numpy as np
import pytest
from scipy.special import hyp2f1

from evans_pipeline.model import make_bump, make_constant, make_nagumo


@pytest.fixture
def nagumo():
    return make_nagumo(0.3)


@pytest.fixture
def constant():
    return make_constant(0.0, 0.0)


@pytest.fixture
def bump():
    return make_bump(0.0, 0.0, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rk4_reference(generator, xi0, h, y, substeps):
    """Classical RK4 for y' = G(xi) y from xi0 to xi0 + h."""
    G = lambda x: generator(np.array(x, dtype=float))
    y = np.asarray(y, dtype=complex)
    dt = h / substeps
    x = xi0
    for _ in range(substeps):
        k1 = G(x) @ y
        k2 = G(x + 0.5 * dt) @ (y + 0.5 * dt * k1)
        k3 = G(x + 0.5 * dt) @ (y + 0.5 * dt * k2)
        k4 = G(x + dt) @ (y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x += dt
    return y


def nagumo_closed_form_evans(a, lam):
    """Exact D(lambda) of the Nagumo front for real lambda.

    With s = expit(xi / sqrt(2)) both Jost solutions are
    s^alpha (1 - s)^beta times a Gauss hypergeometric function, in s on the
    minus side and in 1 - s on the plus side; D is their Wronskian at s = 1/2.
    """
    lam = float(lam)
    alpha = 0.5 * (1.0 - 2.0 * a + math.sqrt((2.0 * a - 1.0) ** 2 + 8.0 * (a + lam)))
    beta = 0.5 * (2.0 * a - 1.0 + math.sqrt((1.0 - 2.0 * a) ** 2 + 8.0 * (1.0 - a + lam)))
    sigma = alpha + beta
    A, B = sigma + 3.0, sigma - 2.0
    values = []
    for C in (2.0 * alpha + 2.0 * a, 2.0 * beta + 2.0 - 2.0 * a):
        values.append((hyp2f1(A, B, C, 0.5), A * B / C * hyp2f1(A + 1.0, B + 1.0, C + 1.0, 0.5)))
    (F, dF), (G, dG) = values
    return -(0.5 ** (2.0 * sigma)) / (4.0 * math.sqrt(2.0)) * (F * dG + dF * G)
