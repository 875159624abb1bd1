import numpy as np
import pytest

from ecfm.basis import (
    BasisKind,
    clamped_beam_sine,
    eval_basis,
    eval_basis_dx,
    eval_basis_dxx,
    eval_constraint_shape,
    gauss_legendre,
    gauss_legendre_panels,
    gaussian_rbf,
    hat_1d,
    shifted_legendre,
    sine_1d,
    tensor_sine_2d,
)


def test_sine_values():
    fam = sine_1d(5)
    assert eval_basis(fam, 1, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert eval_basis(fam, 3, 1.0 / 3.0) == pytest.approx(0.0, abs=1e-14)
    assert eval_basis(fam, 4, 0.0) == 0.0
    assert eval_basis(fam, 4, 1.0) == pytest.approx(0.0, abs=1e-13)


def test_clamped_beam_end_conditions():
    fam = clamped_beam_sine(6)
    for i in range(1, 7):
        assert eval_basis(fam, i, 0.0) == 0.0
        assert eval_basis_dxx(fam, i, 0.0) == 0.0
        assert eval_basis_dx(fam, i, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_tensor_sine_vanishes_on_boundary():
    fam = tensor_sine_2d(9)
    edge = [(0.0, 0.3), (1.0, 0.7), (0.2, 0.0), (0.9, 1.0)]
    for i in range(1, 10):
        for pt in edge:
            assert eval_basis(fam, i, pt) == pytest.approx(0.0, abs=1e-13)


def test_index_and_domain_errors():
    fam = sine_1d(3)
    with pytest.raises(IndexError):
        eval_basis(fam, 0, 0.5)
    with pytest.raises(IndexError):
        eval_basis(fam, 4, 0.5)
    with pytest.raises(ValueError):
        eval_basis(fam, 1, 1.5)
    with pytest.raises(ValueError):
        eval_constraint_shape(fam, 0.5, 0.5)


@pytest.mark.parametrize(
    "fam",
    [sine_1d(12), clamped_beam_sine(9), shifted_legendre(8)],
    ids=["sine", "beam", "legendre"],
)
def test_first_derivative_matches_finite_differences_1d(fam):
    rng = np.random.default_rng(7)
    x = rng.uniform(0.01, 0.99, size=100)
    h = 1e-6
    for i in range(1, fam.count + 1):
        fd = (eval_basis(fam, i, x + h) - eval_basis(fam, i, x - h)) / (2 * h)
        an = eval_basis_dx(fam, i, x)
        assert np.all(np.abs(fd - an) <= 1e-6 * (1.0 + np.abs(an)))


def test_first_derivative_matches_finite_differences_2d():
    fam = tensor_sine_2d(16)
    rng = np.random.default_rng(8)
    pts = rng.uniform(0.01, 0.99, size=(100, 2))
    h = 1e-6
    for axis in (0, 1):
        step = np.zeros(2)
        step[axis] = h
        for i in range(1, 17):
            fd = (eval_basis(fam, i, pts + step) - eval_basis(fam, i, pts - step)) / (2 * h)
            an = eval_basis_dx(fam, i, pts, axis=axis)
            assert np.all(np.abs(fd - an) <= 1e-6 * (1.0 + np.abs(an)))


@pytest.mark.parametrize("fam", [sine_1d(8), clamped_beam_sine(6), shifted_legendre(6)])
def test_second_derivative_matches_finite_differences(fam):
    rng = np.random.default_rng(9)
    x = rng.uniform(0.05, 0.95, size=50)
    h = 1e-4
    for i in range(1, fam.count + 1):
        fd = (eval_basis(fam, i, x + h) - 2 * eval_basis(fam, i, x) + eval_basis(fam, i, x - h)) / h**2
        an = eval_basis_dxx(fam, i, x)
        assert np.all(np.abs(fd - an) <= 1e-5 * (1.0 + np.abs(an)))


def test_shifted_legendre_orthogonality():
    fam = shifted_legendre(8)
    q = gauss_legendre(20, 1)
    for m in range(1, 9):
        for n in range(1, 9):
            val = np.sum(q.weights * eval_basis(fam, m, q.points) * eval_basis(fam, n, q.points))
            expect = 1.0 / (2 * (n - 1) + 1) if m == n else 0.0
            assert val == pytest.approx(expect, abs=1e-12)


def test_constraint_shape_values():
    rbf = gaussian_rbf(500.0)
    c = np.array([0.3, 0.7])
    assert eval_constraint_shape(rbf, c, c) == pytest.approx(500.0 / np.pi)
    hat = hat_1d(0.2)
    assert eval_constraint_shape(hat, 0.5, 0.5) == 1.0
    assert eval_constraint_shape(hat, 0.5, 0.8) == 0.0
    assert eval_constraint_shape(hat, 0.5, 0.6) == pytest.approx(0.5)


def test_gaussian_rbf_unit_mass_on_square():
    # Tail truncation is negligible for width >= 100 and a centered bump.
    for width in (100.0, 500.0):
        rbf = gaussian_rbf(width)
        q = gauss_legendre(220, 2)
        total = np.sum(q.weights * eval_constraint_shape(rbf, np.array([0.5, 0.5]), q.points))
        assert total == pytest.approx(1.0, abs=1e-6)


def test_quadrature_weight_sums():
    assert gauss_legendre(1, 1).weights.sum() == pytest.approx(1.0)
    assert gauss_legendre(7, 1).weights.sum() == pytest.approx(1.0)
    assert gauss_legendre(4, 2).weights.sum() == pytest.approx(1.0)


def test_quadrature_polynomial_exactness():
    q = gauss_legendre(2, 1)
    assert np.sum(q.weights * q.points**2) == pytest.approx(1.0 / 3.0, abs=1e-14)
    q = gauss_legendre(3, 1)
    for deg in range(6):  # exact through degree 2*3-1
        val = np.sum(q.weights * q.points**deg)
        assert val == pytest.approx(1.0 / (deg + 1), rel=1e-12)


def test_quadrature_sine_squared():
    # closed form: integral of sin(pi x)^2 over [0,1] is exactly 1/2
    q = gauss_legendre(5, 1)
    val = np.sum(q.weights * np.sin(np.pi * q.points) ** 2)
    assert val == pytest.approx(0.5, abs=2e-5)  # measured GL-5 truncation 1.5e-5
    q = gauss_legendre(8, 1)
    val = np.sum(q.weights * np.sin(np.pi * q.points) ** 2)
    assert val == pytest.approx(0.5, abs=1e-10)


def test_sine_gramian_is_half_identity():
    fam = sine_1d(50)
    q = gauss_legendre(2 * 50 + 16, 1)
    vals = np.stack([eval_basis(fam, i, q.points) for i in range(1, 51)])
    gram = (vals * q.weights) @ vals.T
    assert np.abs(gram - 0.5 * np.eye(50)).max() < 1e-10


def test_panel_rule_integrates_kinked_function_exactly():
    q = gauss_legendre_panels(6, [0.5])
    val = np.sum(q.weights * np.abs(q.points - 0.5))
    assert val == pytest.approx(0.25, abs=1e-14)
    ind = ((q.points >= 0.25) & (q.points <= 0.75)).astype(float)
    q2 = gauss_legendre_panels(6, [0.25, 0.75])
    ind2 = ((q2.points >= 0.25) & (q2.points <= 0.75)).astype(float)
    assert np.sum(q2.weights * ind2) == pytest.approx(0.5, abs=1e-14)


def test_unsupported_dimension():
    with pytest.raises(ValueError):
        gauss_legendre(3, 3)
