"""Spectral primitives: eigenvalues, Perron data, irreducibility, LU sign."""

import numpy as np
import pytest

from bivirus import spectral
from bivirus.errors import DegeneracyError, EigenSolverError, PreconditionError


def test_eigenvalues_identity():
    spec = spectral.eigenvalues(np.eye(2))
    np.testing.assert_allclose(sorted(spec.eigenvalues.real), [1, 1])
    assert spec.abscissa == pytest.approx(1.0)
    assert spec.radius == pytest.approx(1.0)


def test_eigenvalues_rotation():
    spec = spectral.eigenvalues([[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(sorted(spec.eigenvalues.imag), [-1, 1], atol=1e-12)
    assert spec.abscissa == pytest.approx(0.0, abs=1e-12)
    assert spec.radius == pytest.approx(1.0)


def test_eigenvalues_decoupled_block_at_healthy_state():
    # Diagonal infection matrices decouple the Jacobian into 2x2 blocks;
    # at the origin the block is diag(-1 + beta1, -1 + beta2).
    beta1, beta2 = 1.6, 2.1
    block = np.array([[-1 + beta1, 0.0], [0.0, -1 + beta2]])
    spec = spectral.eigenvalues(block)
    np.testing.assert_allclose(sorted(spec.eigenvalues.real), [0.6, 1.1])


def test_conjugate_pairs_for_real_input():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rng.normal(size=(6, 6))
        spec = spectral.eigenvalues(m)
        assert abs(float(np.sum(spec.eigenvalues.imag))) < 1e-9


def test_eigensolver_error_wrapping(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("Eigenvalues did not converge")

    monkeypatch.setattr(np.linalg, "eigvals", boom)
    with pytest.raises(EigenSolverError) as err:
        spectral.eigenvalues(np.eye(3))
    assert err.value.matrix.shape == (3, 3)


def test_spectral_radius_permutation():
    assert spectral.spectral_radius_nonneg([[0, 1], [1, 0]]) == pytest.approx(1.0)


def test_spectral_radius_symmetric():
    assert spectral.spectral_radius_nonneg(
        [[1.6, 1.0], [1.0, 1.6]]
    ) == pytest.approx(2.6)


def test_spectral_radius_vs_eigensolver_oracle(example1):
    # Cross-check the power-iteration route against the full decomposition.
    b1 = example1.virus1.b
    assert spectral.spectral_radius_nonneg(b1) == pytest.approx(
        spectral.eigenvalues(b1).radius, rel=1e-9
    )


def test_spectral_radius_matches_radius_randomized():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = rng.integers(2, 8)
        m = rng.uniform(0.05, 2.0, (n, n))
        assert spectral.spectral_radius_nonneg(m) == pytest.approx(
            spectral.eigenvalues(m).radius, rel=1e-9
        )


def test_spectral_radius_preconditions():
    with pytest.raises(PreconditionError):
        spectral.spectral_radius_nonneg([[1.0, -0.1], [1.0, 1.0]])
    with pytest.raises(PreconditionError):
        spectral.spectral_radius_nonneg([[1.0, 0.0], [1.0, 1.0]])


def test_perron_symmetric_zero_row_sum():
    value, right, left = spectral.perron_vectors([[-1.0, 1.0], [1.0, -1.0]])
    assert value == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(right, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(left, [0.5, 0.5], atol=1e-12)


def test_perron_shifted_matrix():
    m = -np.eye(2) + np.array([[1.6, 1.0], [1.0, 1.6]])
    value, right, _ = spectral.perron_vectors(m)
    assert value == pytest.approx(1.6)
    np.testing.assert_allclose(right, [0.5, 0.5], atol=1e-10)


def test_perron_positivity_random():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        b = rng.uniform(0.05, 2.0, (n, n))
        value, right, left = spectral.perron_vectors(b)
        assert np.all(right > 0) and np.all(left > 0)
        assert right.sum() == pytest.approx(1.0)
        # eigenpair consistency
        np.testing.assert_allclose(b @ right, value * right, atol=1e-9)
        np.testing.assert_allclose(left @ b, value * left, atol=1e-9)


def test_perron_value_equals_abscissa():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        m = rng.uniform(0.05, 2.0, (n, n)) - np.diag(rng.uniform(0.0, 3.0, n))
        value, _, _ = spectral.perron_vectors(m)
        assert value == pytest.approx(
            spectral.eigenvalues(m).abscissa, abs=1e-9
        )


def test_perron_degeneracy_error():
    # Nearly decoupled symmetric pair: dominant eigenvalues split by 2e-12.
    m = np.array([[1.0, 1e-12], [1e-12, 1.0]])
    with pytest.raises(DegeneracyError):
        spectral.perron_vectors(m)


def test_irreducible_cases(example1):
    assert spectral.irreducible([[0, 1], [1, 0]])
    assert not spectral.irreducible([[1, 0], [1, 1]])
    assert spectral.irreducible(example1.virus1.b)
    # weak couplings present but positive
    assert spectral.irreducible(np.array(example1.virus1.b) > 0)


def test_irreducible_requires_nonnegative():
    with pytest.raises(PreconditionError):
        spectral.irreducible([[0, -1], [1, 0]])


def test_sign_equivalence_sigma_rho():
    # sign(sigma(-D + A)) must match sign(rho(D^-1 A) - 1) exactly.
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        d = rng.uniform(0.2, 3.0, n)
        a = rng.uniform(0.01, 2.0, (n, n))
        sigma = spectral.eigenvalues(-np.diag(d) + a).abscissa
        rho = spectral.spectral_radius_nonneg(a / d[:, None])
        assert np.sign(sigma) == np.sign(rho - 1.0)


def test_det_sign_lu():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        m = rng.normal(size=(n, n))
        expected = int(np.sign(np.linalg.det(m)))
        assert spectral.det_sign_lu(m) == expected
    assert spectral.det_sign_lu(np.zeros((3, 3))) == 0
