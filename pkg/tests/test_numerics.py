import numpy as np
import pytest
from conftest import random_matrix
from hypothesis import given, settings
from hypothesis import strategies as st

from brachistochrone_tangle import numerics
from brachistochrone_tangle.exceptions import ConvergenceError, InvalidInputError
from brachistochrone_tangle.settings import Tolerances

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def cofactor_determinant(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n == 1:
        return complex(a[0, 0])
    return sum(
        (-1) ** j * a[0, j] * cofactor_determinant(np.delete(a[1:], j, axis=1))
        for j in range(n)
    )


def characteristic_polynomial(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(λI - a), highest power first, via Faddeev-LeVerrier"""
    n = a.shape[0]
    coefficients = [1 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coefficients[-1] * np.eye(n)
        coefficients.append(-np.trace(a @ m) / k)
    return np.array(coefficients)


def naive_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    result = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                result[i, j] += a[i, k] * b[k, j]
    return result


def test_matmul_matches_naive_product(rng):
    a = random_matrix(rng, 4)[:, :3]
    b = random_matrix(rng, 3)

    assert np.allclose(numerics.matmul(a, b), naive_product(a, b), atol=1e-14)


def test_matmul_rejects_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        numerics.matmul(np.eye(2), np.eye(3))


def test_inputs_with_nan_are_rejected():
    a = np.eye(2, dtype=complex)
    a[0, 1] = np.nan

    with pytest.raises(InvalidInputError):
        numerics.as_cmatrix(a)
    with pytest.raises(InvalidInputError):
        numerics.determinant(a)


def test_kron_orders_factors_from_most_significant():
    x = np.array([[0, 1], [1, 0]])

    # act
    result = numerics.kron(x, numerics.identity(2))

    # assert
    assert np.array_equal(result @ np.array([1, 0, 0, 0]), np.array([0, 0, 1, 0]))


def test_adjoint_of_stack():
    a = np.stack([np.array([[1, 2j], [3, 4]]), np.array([[0, 1], [1j, 0]])])

    result = numerics.adjoint(a)

    assert np.array_equal(result[0], np.array([[1, 3], [-2j, 4]]))
    assert np.array_equal(result[1], np.array([[0, -1j], [1, 0]]))


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.sampled_from([1, 2, 4, 8]))
def test_qr_decompose_is_unitary_triangular_and_exact(seed: int, n: int):
    a = random_matrix(np.random.default_rng(seed), n)

    # act
    q, r = numerics.qr_decompose(a)

    # assert
    assert numerics.unitarity_defect(q) < 1e-12
    assert np.allclose(np.tril(r, -1), 0)
    assert np.all(np.abs(np.diag(r).imag) == 0)
    assert np.all(np.diag(r).real >= 0)
    assert np.max(np.abs(q @ r - a)) < 1e-12


def test_qr_decompose_of_identity():
    q, r = numerics.qr_decompose(np.eye(4))

    assert np.allclose(q, np.eye(4), atol=1e-15)
    assert np.allclose(r, np.eye(4), atol=1e-15)


def test_qr_decompose_of_positive_diagonal():
    d = np.diag([3.0, 1.0, 4.0, 1.0])

    q, r = numerics.qr_decompose(d)

    assert np.allclose(q, np.eye(4), atol=1e-15)
    assert np.allclose(r, d, atol=1e-15)


def test_qr_decompose_tolerates_rank_deficiency(rng):
    a = random_matrix(rng, 4)
    a[:, 2] = 0

    # act
    q, r = numerics.qr_decompose(a)

    # assert
    assert numerics.unitarity_defect(q) < 1e-12
    assert abs(r[2, 2]) < 1e-12
    assert np.max(np.abs(q @ r - a)) < 1e-12


def test_qr_decompose_handles_stacks(rng):
    stack = np.stack([random_matrix(rng, 4) for _ in range(5)])

    q, r = numerics.qr_decompose(stack)

    assert q.shape == (5, 4, 4)
    for k in range(5):
        single_q, single_r = numerics.qr_decompose(stack[k])
        assert np.allclose(q[k], single_q, atol=1e-13)
        assert np.allclose(r[k], single_r, atol=1e-13)


@pytest.mark.parametrize("shape", [(3, 4), (9, 9), (4,)])
def test_qr_decompose_rejects_unsupported_shapes(shape):
    with pytest.raises(InvalidInputError):
        numerics.qr_decompose(np.ones(shape))


def test_hessenberg_preserves_spectrum(rng):
    a = random_matrix(rng, 6)

    h = numerics.hessenberg(a)

    assert np.allclose(np.tril(h, -2), 0)
    assert abs(np.trace(h) - np.trace(a)) < 1e-12
    assert abs(numerics.determinant(h) - numerics.determinant(a)) < 1e-10


def test_eigenvalues_of_diagonal_matrix():
    values = [3, -1j, 0.5, 2 + 2j]

    result = numerics.eigenvalues(np.diag(values))

    assert sorted(result, key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(values, key=lambda z: (complex(z).real, complex(z).imag))
    )


def test_eigenvalues_of_rotation_are_complex():
    result = numerics.eigenvalues(np.array([[0, -1], [1, 0]]))

    assert sorted(result, key=lambda z: z.imag) == pytest.approx([-1j, 1j], abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.sampled_from([2, 3, 4, 8]))
def test_eigenvalues_are_roots_of_the_characteristic_polynomial(seed: int, n: int):
    a = random_matrix(np.random.default_rng(seed), n)
    coefficients = characteristic_polynomial(a)

    # act
    spectrum = numerics.eigenvalues(a)

    # assert
    assert len(spectrum) == n
    for value in spectrum:
        scale = sum(abs(c) * abs(value) ** (n - k) for k, c in enumerate(coefficients))
        assert abs(np.polyval(coefficients, value)) <= 1e-10 * scale
    assert abs(sum(spectrum) - np.trace(a)) < 1e-10


def test_eigenvalues_match_reference_implementation(rng):
    a = random_matrix(rng, 8)

    spectrum = numerics.eigenvalues(a)

    for reference in np.linalg.eigvals(a):
        assert min(abs(value - reference) for value in spectrum) < 1e-9


def test_eigenvalues_of_hermitian_matrix_are_real(rng):
    a = random_matrix(rng, 4)
    hermitian = a + a.conj().T

    spectrum = numerics.eigenvalues(hermitian)

    assert max(abs(value.imag) for value in spectrum) < 1e-12


def test_eigenvalues_signal_non_convergence(rng):
    with pytest.raises(ConvergenceError):
        numerics.eigenvalues(random_matrix(rng, 8), Tolerances(eig_max_sweeps=1))


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_determinant_matches_cofactor_expansion(seed: int):
    a = random_matrix(np.random.default_rng(seed), 4)

    assert abs(numerics.determinant(a) - cofactor_determinant(a)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_determinant_is_multiplicative(seed: int):
    g = np.random.default_rng(seed)
    a, b = random_matrix(g, 4), random_matrix(g, 4)

    product = numerics.determinant(a @ b)

    assert product == pytest.approx(numerics.determinant(a) * numerics.determinant(b), rel=1e-10)


def test_determinant_of_singular_matrix():
    a = np.array([[1, 2], [2, 4]], dtype=complex)

    assert abs(numerics.determinant(a)) < 1e-15


def test_determinant_of_permutation_has_sign():
    assert numerics.determinant(np.array([[0, 1], [1, 0]])) == pytest.approx(-1)
    assert numerics.determinant(numerics.identity(8)) == 1


def test_pauli_y_is_hermitian_and_unitary():
    assert np.array_equal(numerics.PAULI_Y, numerics.adjoint(numerics.PAULI_Y))
    assert numerics.unitarity_defect(numerics.PAULI_Y) == 0
    assert numerics.determinant(numerics.PAULI_Y) == pytest.approx(-1)


def test_kron_of_pauli_y_squares_to_identity():
    flip = numerics.kron(numerics.PAULI_Y, numerics.PAULI_Y)

    assert np.allclose(numerics.matmul(flip, flip), numerics.identity(4), atol=1e-15)


def test_eigenvalues_of_identity():
    assert numerics.eigenvalues(numerics.identity(4)) == pytest.approx([1, 1, 1, 1])


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.sampled_from([2, 4, 8]))
def test_eigenvalues_multiply_to_the_determinant(seed: int, n: int):
    a = random_matrix(np.random.default_rng(seed), n)

    spectrum = numerics.eigenvalues(a)

    assert abs(np.prod(spectrum) - numerics.determinant(a)) < 1e-10 * max(1, abs(numerics.determinant(a)))
