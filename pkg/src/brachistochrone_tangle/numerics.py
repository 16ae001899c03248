"""
Small dense complex linear algebra for matrices of at most 8×8.

numpy provides the storage and the elementwise arithmetic but the factorizations used by this library (Householder QR,
Hessenberg reduction, shifted QR iteration and pivoted elimination) are implemented here so that their conventions are
fixed and documented:

- :func:`qr_decompose` always returns an ``r`` with a real nonnegative diagonal.
  Without this convention, QR of a Ginibre matrix does not produce Haar distributed unitaries.
- :func:`eigenvalues` signals non-convergence with a :class:`ConvergenceError` instead of returning garbage.

All functions are pure and never modify their inputs.
"""
import cmath
import functools
import logging
import math
from typing import Any, List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from brachistochrone_tangle.exceptions import ConvergenceError
from brachistochrone_tangle.settings import DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.utils import frozen_array, require

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]
"A two-dimensional complex matrix in row-major storage (or a stack of them where noted)."

Complex = complex

MAX_DIM = 8
"Largest matrix dimension that the factorizations of this module accept."

PAULI_Y: CMatrix = frozen_array([[0, -1j], [1j, 0]])
"The Pauli matrix σ_y."

_EPS = float(np.finfo(np.float64).eps)


def _checked(a: ArrayLike, stacked: bool = False) -> CMatrix:
    result = np.asarray(a, dtype=np.complex128)
    if stacked:
        require(result.ndim >= 2, f"expected a (stack of) matrices but got shape {result.shape}")
    else:
        require(result.ndim == 2, f"expected a matrix but got shape {result.shape}")
    require(bool(np.isfinite(result).all()), "matrix contains non-finite entries")
    return result


def _require_square(a: CMatrix, operation: str) -> None:
    rows, cols = a.shape[-2:]
    require(
        rows == cols, f"{operation} requires a square matrix but got shape {rows}×{cols}"
    )
    require(
        rows <= MAX_DIM,
        f"{operation} supports matrices up to {MAX_DIM}×{MAX_DIM} but got {rows}×{cols}",
    )


def _unit_phase(z: NDArray[Any]) -> NDArray[Any]:
    # z / |z| with the convention phase(0) = 1
    magnitude = np.abs(z)
    nonzero = magnitude > 0
    return np.where(nonzero, z / np.where(nonzero, magnitude, 1.0), 1.0)


def as_cmatrix(a: ArrayLike) -> CMatrix:
    """
    Convert the given value into a complex matrix.

    :raises InvalidInputError: If the value is not two-dimensional or contains NaN or Inf entries.
    """
    return _checked(a)


def identity(n: int) -> CMatrix:
    """
    The n×n identity matrix
    """
    return np.eye(n, dtype=np.complex128)


def adjoint(a: ArrayLike) -> CMatrix:
    """
    Conjugate transpose of a matrix or of every matrix in a stack.
    """
    return np.conj(np.swapaxes(_checked(a, stacked=True), -1, -2))


def matmul(a: ArrayLike, b: ArrayLike) -> CMatrix:
    """
    Standard matrix product ``a·b``.

    :raises InvalidInputError: If the number of columns of `a` does not equal the number of rows of `b`.
    """
    left = _checked(a)
    right = _checked(b)
    require(
        left.shape[1] == right.shape[0],
        f"cannot multiply a {left.shape[0]}×{left.shape[1]} matrix with a {right.shape[0]}×{right.shape[1]} matrix",
    )
    return left @ right


def kron(*matrices: ArrayLike) -> CMatrix:
    """
    Kronecker product of all given matrices, the first one being the most significant factor.
    """
    require(len(matrices) > 0, "kron needs at least one matrix")
    return functools.reduce(np.kron, (_checked(m) for m in matrices))


def unitarity_defect(q: ArrayLike) -> float:
    """
    ``max |q†q - I|`` over all entries (and over all matrices of a stack).
    """
    matrices = _checked(q, stacked=True)
    n = matrices.shape[-1]
    gram = np.conj(np.swapaxes(matrices, -1, -2)) @ matrices
    return float(np.max(np.abs(gram - np.eye(n))))


def qr_decompose(a: ArrayLike) -> Tuple[CMatrix, CMatrix]:
    """
    Householder QR factorization ``a = q·r`` of a square matrix or of every matrix in a stack ``(..., n, n)``.

    The diagonal of ``r`` is made real and nonnegative by absorbing its phases into ``q``.
    This makes the factorization unique for full-rank input.
    Rank deficient input is tolerated, the corresponding diagonal entries of ``r`` are then (close to) zero.

    :raises InvalidInputError: If the input is not square.
    :returns: The unitary ``q`` and the upper triangular ``r``.
    """
    r = _checked(a, stacked=True).copy()
    _require_square(r, "qr_decompose")
    n = r.shape[-1]
    q = np.broadcast_to(identity(n), r.shape).copy()

    for k in range(n - 1):
        x = r[..., k:, k]
        norm_x = np.sqrt(np.sum(np.abs(x) ** 2, axis=-1))
        alpha = -_unit_phase(x[..., 0]) * norm_x

        v = x.copy()
        v[..., 0] -= alpha
        norm_v = np.sqrt(np.sum(np.abs(v) ** 2, axis=-1))
        active = norm_v > 0
        v = np.where(active[..., None], v / np.where(active, norm_v, 1.0)[..., None], 0)

        # r <- (I - 2vv†) r and q <- q (I - 2vv†), restricted to the rows/columns k..n-1
        projection = np.einsum("...i,...ij->...j", np.conj(v), r[..., k:, :])
        r[..., k:, :] -= 2.0 * v[..., :, None] * projection[..., None, :]
        image = np.einsum("...ij,...j->...i", q[..., :, k:], v)
        q[..., :, k:] -= 2.0 * image[..., :, None] * np.conj(v)[..., None, :]

    r = np.triu(r)
    diagonal = np.diagonal(r, axis1=-2, axis2=-1)
    phases = _unit_phase(diagonal)
    q = q * phases[..., None, :]
    r = r * np.conj(phases)[..., :, None]
    index = np.arange(n)
    r[..., index, index] = np.abs(diagonal)
    return q, r


def hessenberg(a: ArrayLike) -> CMatrix:
    """
    Reduce a square matrix to upper Hessenberg form by a unitary similarity transformation.

    The result has the same eigenvalues as the input.
    """
    h = _checked(a).copy()
    _require_square(h, "hessenberg")
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        if np.all(x[1:] == 0):
            continue
        alpha = -_unit_phase(x[0]) * np.sqrt(np.sum(np.abs(x) ** 2))
        v = x.copy()
        v[0] -= alpha
        v /= np.sqrt(np.sum(np.abs(v) ** 2))
        h[k + 1 :, :] -= 2.0 * np.outer(v, np.conj(v) @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, np.conj(v))
        h[k + 2 :, k] = 0
    return h


def _wilkinson_shift(block: CMatrix) -> complex:
    # eigenvalue of the trailing 2×2 block that is closer to its last diagonal entry
    a, b = complex(block[-2, -2]), complex(block[-2, -1])
    c, d = complex(block[-1, -2]), complex(block[-1, -1])
    mean = (a + d) / 2
    root = cmath.sqrt(((a - d) / 2) ** 2 + b * c)
    return min(mean + root, mean - root, key=lambda mu: abs(mu - d))


def _shifted_qr_step(block: CMatrix, shift: complex) -> None:
    # one step block <- R·Q + shift where Q·R = block - shift, performed in place with Givens rotations
    m = block.shape[0]
    block[np.diag_indices(m)] -= shift
    rotations: List[Tuple[complex, complex]] = []
    for k in range(m - 1):
        top, bottom = complex(block[k, k]), complex(block[k + 1, k])
        radius = math.hypot(abs(top), abs(bottom))
        if radius == 0:
            cs, sn = 1 + 0j, 0j
        else:
            cs, sn = top / radius, bottom / radius
        givens = np.array([[cs.conjugate(), sn.conjugate()], [-sn, cs]])
        block[k : k + 2, :] = givens @ block[k : k + 2, :]
        rotations.append((cs, sn))
    for k, (cs, sn) in enumerate(rotations):
        givens_adjoint = np.array([[cs, -sn.conjugate()], [sn, cs.conjugate()]])
        block[:, k : k + 2] = block[:, k : k + 2] @ givens_adjoint
    block[np.diag_indices(m)] += shift


def eigenvalues(
    a: ArrayLike, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> List[Complex]:
    """
    All eigenvalues of a square matrix, repeated according to their algebraic multiplicity.

    The matrix is reduced to Hessenberg form and then iterated with Wilkinson-shifted QR steps, deflating converged
    eigenvalues from the bottom.
    Works for non-Hermitian input with complex spectra.

    :param a: A square matrix of size at most 8.
    :param tolerances: ``eig_max_sweeps`` limits the number of QR sweeps spent on a single eigenvalue.

    :raises InvalidInputError: If the input is not square or too large.
    :raises ConvergenceError: If an eigenvalue did not converge within the configured number of sweeps.
    :returns: The eigenvalues in no particular order.
    """
    h = hessenberg(a)
    n = h.shape[0]
    scale = float(np.max(np.abs(h))) if n > 0 else 0.0
    result: List[Complex] = []

    hi = n - 1
    sweeps = 0
    total_sweeps = 0
    while hi >= 0:
        # find the top of the unreduced block that ends in row hi
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if (
                sub <= _EPS * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1]))
                or sub <= _EPS * scale
            ):
                h[lo, lo - 1] = 0
                break
            lo -= 1

        if lo == hi:
            result.append(complex(h[hi, hi]))
            hi -= 1
            sweeps = 0
            continue

        sweeps += 1
        total_sweeps += 1
        if sweeps > tolerances.eig_max_sweeps:
            raise ConvergenceError(
                f"eigenvalue iteration did not converge within {tolerances.eig_max_sweeps} sweeps",
                n,
                hi,
            )

        block = h[lo : hi + 1, lo : hi + 1]
        if sweeps % 10 == 0:
            logger.warning(
                "using an exceptional shift after %d sweeps on a %d×%d block",
                sweeps,
                hi - lo + 1,
                hi - lo + 1,
            )
            shift = complex(block[-1, -1]) + 0.75 * abs(block[-1, -2])
        else:
            shift = _wilkinson_shift(block)
        _shifted_qr_step(block, shift)

    logger.debug("computed %d eigenvalues in %d sweeps", n, total_sweeps)
    return result


def determinant(a: ArrayLike) -> Complex:
    """
    Determinant of a square matrix by Gaussian elimination with partial pivoting.

    :raises InvalidInputError: If the input is not square or too large.
    """
    u = _checked(a).copy()
    _require_square(u, "determinant")
    n = u.shape[0]
    det = 1 + 0j
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(u[k:, k])))
        if u[pivot, k] == 0:
            return 0j
        if pivot != k:
            u[[k, pivot], :] = u[[pivot, k], :]
            det = -det
        det *= complex(u[k, k])
        u[k + 1 :, k:] -= np.outer(u[k + 1 :, k] / u[k, k], u[k, k:])
    return det
