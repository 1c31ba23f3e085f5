import numpy as np
import pytest

from evans_pipeline.errors import InadmissibleError, SectorError
from evans_pipeline.integrators import GridSpec, propagate, step_matrix
from evans_pipeline.linalg import wedge
from evans_pipeline.model import make_bump, make_constant, make_nagumo, quad_potential
from evans_pipeline.spectral import (
    boundary_layer_solution,
    boundary_values,
    build_frame,
    onestep_stiff_expansion,
    principal_sqrt,
    raw_generator,
    transformed_generator,
)


def test_constant_frame(constant):
    frame = build_frame(constant, 4.0)
    assert frame.kappa_minus == frame.kappa_plus == 4.0
    assert frame.mu == (2.0, -2.0, 2.0, -2.0)
    assert frame.admissible


def test_nagumo_frame_at_zero(nagumo):
    frame = build_frame(nagumo, 0.0)
    assert frame.kappa_minus == pytest.approx(np.sqrt(1.28))
    assert frame.kappa_plus == pytest.approx(np.sqrt(0.08 + 2.8))
    assert frame.admissible


def test_inadmissible_frame():
    frame = build_frame(make_constant(1.0, 0.0), 0.5)
    assert frame.kappa_minus == pytest.approx(np.sqrt(2.0) * 1j)
    assert not frame.admissible
    with pytest.raises(InadmissibleError):
        transformed_generator(make_constant(1.0, 0.0), frame, "minus", 0.0)


def test_principal_sqrt_branch():
    assert principal_sqrt(complex(-4.0, -0.0)) == 2j
    assert principal_sqrt(complex(-4.0, 0.0)) == 2j
    roots = principal_sqrt(np.array([1 + 1j, 1 - 1j, -1 - 1j]))
    assert np.all(roots.real >= 0)


def test_mu_relations(nagumo, rng):
    for lam in rng.uniform(-0.2, 50, 10) + 1j * rng.uniform(-20, 20, 10):
        frame = build_frame(nagumo, lam)
        for side in ("minus", "plus"):
            mu = frame.mu_minus if side == "minus" else frame.mu_plus
            assert mu[0] + mu[1] == pytest.approx(-frame.c, abs=1e-12)
            assert mu[0] - mu[1] == pytest.approx(frame.kappa(side), abs=1e-12)
            assert np.linalg.det(frame.B(side)) == pytest.approx(-frame.kappa(side), abs=1e-12)


def test_conjugate_symmetry(nagumo):
    frame, conjugate = build_frame(nagumo, 2 + 3j), build_frame(nagumo, 2 - 3j)
    assert conjugate.kappa_minus == pytest.approx(np.conj(frame.kappa_minus), abs=1e-15)
    assert conjugate.kappa_plus == pytest.approx(np.conj(frame.kappa_plus), abs=1e-15)


def test_constant_transformed_generators(constant):
    frame = build_frame(constant, 4.0)
    np.testing.assert_allclose(transformed_generator(constant, frame, "minus", 0.3), [[0, 0], [0, -4]])
    np.testing.assert_allclose(transformed_generator(constant, frame, "plus", 0.3), [[4, 0], [0, 0]])


RECONSTRUCTION_MODELS = {
    "nagumo": lambda: make_nagumo(0.3),
    "bump": lambda: make_bump(0.0, 0.0, 1.0, 1.0),
    "moving_bump": lambda: make_bump(0.5, 1.0, 2.0, 0.7),
    "constant": lambda: make_constant(0.0, 0.0),
    "shifted_constant": lambda: make_constant(1.0, 2.0),
}


@pytest.mark.parametrize("name", sorted(RECONSTRUCTION_MODELS))
@pytest.mark.parametrize("side", ["minus", "plus"])
def test_transformed_generator_reconstructs_raw(name, rng, side):
    model = RECONSTRUCTION_MODELS[name]()
    lambdas = rng.uniform(1, 100, 100) + 1j * rng.uniform(-50, 50, 100)
    for lam, xi in zip(lambdas, rng.uniform(-5, 5, 100)):
        frame = build_frame(model, lam)
        B = frame.B(side)
        shift = frame.mu[0] if side == "minus" else frame.mu[3]
        rebuilt = B @ transformed_generator(model, frame, side, xi) @ np.linalg.inv(B) + shift * np.eye(2)
        np.testing.assert_allclose(rebuilt, raw_generator(model, frame, xi), atol=1e-10)


def test_generators_vectorised(nagumo):
    frame = build_frame(nagumo, 1.0)
    xi = np.linspace(-2.0, 2.0, 5)
    stacked = transformed_generator(nagumo, frame, "plus", xi)
    assert stacked.shape == (5, 2, 2)
    np.testing.assert_array_equal(stacked[3], transformed_generator(nagumo, frame, "plus", xi[3]))


def test_boundary_values(nagumo):
    frame = build_frame(nagumo, 1.0)
    np.testing.assert_array_equal(boundary_values(frame, "minus", "transformed"), [1, 0])
    np.testing.assert_array_equal(boundary_values(frame, "plus", "transformed"), [0, 1])
    raw = boundary_values(frame, "minus", "raw", -2.0)
    mu = frame.mu[0]
    np.testing.assert_allclose(raw, np.exp(-2.0 * mu) * np.array([1, mu]))
    # the raw minus start is B_minus applied to the transformed one
    assert wedge(raw, frame.B_minus @ np.array([1, 0])) == pytest.approx(0, abs=1e-14)


def test_boundary_layer_low_orders(nagumo, constant):
    frame = build_frame(nagumo, 100.0)
    np.testing.assert_array_equal(boundary_layer_solution(nagumo, frame, "minus", -1.0, order=0), [1, 0])
    np.testing.assert_array_equal(boundary_layer_solution(nagumo, frame, "plus", 1.0, order=0), [0, 1])
    frame = build_frame(constant, 7.0)
    for order in (0, 1, 2):
        np.testing.assert_allclose(
            boundary_layer_solution(constant, frame, "minus", -0.5, order), [1, 0], atol=1e-15
        )
    with pytest.raises(ValueError):
        boundary_layer_solution(nagumo, build_frame(nagumo, 1.0), "minus", 0.0, order=3)


def test_boundary_layer_order_one(nagumo):
    frame = build_frame(nagumo, 1e4)
    first = boundary_layer_solution(nagumo, frame, "minus", 0.0, order=1)
    Phi = quad_potential(nagumo, "Phi_minus_at", 0.0)
    assert first[0] == pytest.approx(1 - Phi / frame.kappa_minus)
    assert first[1] == 0


def test_boundary_layer_expansion_against_integration(nagumo):
    residuals, kappas = [], []
    for lam in (1e4, 1e6):
        frame = build_frame(nagumo, lam)
        fine = propagate(nagumo, frame, GridSpec(35.0, 35000), "magnus4", "minus")
        expansion = boundary_layer_solution(nagumo, frame, "minus", 0.0, order=2)
        residuals.append(np.abs(fine.final - expansion).max())
        kappas.append(abs(frame.kappa_minus))
    scaled = [r * k**3 for r, k in zip(residuals, kappas)]
    assert residuals[1] < residuals[0] / 50
    assert scaled[1] <= 5 * scaled[0]


def test_stiff_expansion_sector(bump):
    with pytest.raises(SectorError):
        onestep_stiff_expansion(bump, build_frame(bump, 1.0), "midpoint", -0.5, 0.1)


def test_stiff_expansion_constant_model():
    model = make_constant(0.0, 0.0)
    frame = build_frame(model, 1e4)
    np.testing.assert_allclose(
        onestep_stiff_expansion(model, frame, "midpoint", -1.0, 0.1), [[1, 0], [0, 0]], atol=1e-15
    )
    assert onestep_stiff_expansion(model, frame, "magnus4", -1.0, 0.1)[0, 0] == 1


def _expansion_errors(model, method, lambdas, entries, xi_k=-0.5, h=0.1):
    scaled = []
    for lam in lambdas:
        frame = build_frame(model, lam)
        exact = step_matrix(method, lambda x: transformed_generator(model, frame, "minus", x), xi_k, h)
        expansion = onestep_stiff_expansion(model, frame, method, xi_k, h)
        kappa3 = abs(frame.kappa_minus) ** 3
        scaled.append([abs(exact[i, j] - expansion[i, j]) * kappa3 for i, j in entries])
    return np.array(scaled)


@pytest.mark.parametrize("method", ["midpoint", "magnus4"])
def test_stiff_expansion_leading_entry(bump, method):
    scaled = _expansion_errors(bump, method, (1e3, 1e4, 1e5), [(0, 0)])
    assert scaled.max() / scaled.min() < 3


@pytest.mark.parametrize("method", ["midpoint", "magnus4"])
def test_stiff_expansion_off_diagonal(bump, method):
    scaled = _expansion_errors(bump, method, (1e4, 1e5, 1e6), [(0, 0), (0, 1), (1, 0)])
    assert np.all(scaled.max(axis=0) / scaled.min(axis=0) < 3)


@pytest.mark.parametrize("method", ["midpoint", "magnus4"])
def test_stiff_expansion_last_entry_is_exponentially_small(bump, method):
    # exact (2,2) entry is e^(-h kappa) plus the algebraic term the expansion keeps
    h = 0.1
    for lam in (1e3, 1e4, 1e5):
        frame = build_frame(bump, lam)
        exact = step_matrix(method, lambda x: transformed_generator(bump, frame, "minus", x), -0.5, h)
        expansion = onestep_stiff_expansion(bump, frame, method, -0.5, h)
        bound = np.exp(-h * frame.kappa_minus.real) + abs(expansion[1, 1])
        assert abs(exact[1, 1]) <= 2 * bound


def test_stiff_expansion_gauss_legendre(bump):
    scaled = _expansion_errors(bump, "gauss_legendre4", (1e4, 1e5, 1e6), [(0, 0), (0, 1), (1, 0), (1, 1)])
    assert np.all(scaled.max(axis=0) / scaled.min(axis=0) < 3)


@pytest.mark.parametrize("method", ["midpoint", "magnus4", "gauss_legendre4"])
def test_plus_side_expansion_mirrors_minus_side(bump, method):
    frame = build_frame(bump, 1e4)
    minus = onestep_stiff_expansion(bump, frame, method, -0.5, 0.1, side="minus")
    plus = onestep_stiff_expansion(bump, frame, method, 0.5, 0.1, side="plus")
    np.testing.assert_allclose(plus, minus[::-1, ::-1], rtol=1e-14, atol=1e-300)


def test_backward_plus_step_is_mirrored_forward_step():
    model = make_bump(0.0, 0.0, 1.0, 1.0)
    frame = build_frame(model, 1e5)
    for method in ("midpoint", "magnus4", "gauss_legendre4"):
        backward = step_matrix(
            method, lambda x: transformed_generator(model, frame, "plus", x), 0.7, -0.1
        )
        forward = step_matrix(
            method, lambda x: transformed_generator(model, frame, "minus", x), -0.7, 0.1
        )
        np.testing.assert_allclose(backward, forward[::-1, ::-1], atol=1e-13)
