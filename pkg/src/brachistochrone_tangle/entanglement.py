"""
Entanglement measures of three-qubit pure states.

Three independent code paths are implemented:

- the three-tangle τ from the closed form ``4|d1 - 2 d2 + 4 d3|`` over the amplitudes (a hyperdeterminant),
- the Wootters concurrence of two-qubit reductions from the eigenvalues of ``ρ (σy⊗σy) ρ* (σy⊗σy)``,
- the squared bipartition concurrence ``C²_A(BC) = 4 det ρ_A``.

They are tied together by the monogamy identity ``C²_A(BC) = C²_AB + C²_AC + τ`` which
:func:`tangle_decomposition` checks on every call.
"""
import logging
from dataclasses import dataclass
from typing import Any, Iterable, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from brachistochrone_tangle import numerics
from brachistochrone_tangle.exceptions import ConsistencyError
from brachistochrone_tangle.settings import DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import PureState3Q, Qubit
from brachistochrone_tangle.utils import frozen_array, require, validate_that

logger = logging.getLogger(__name__)

QubitSelector = Union[Qubit, Iterable[Qubit]]

SPIN_FLIP = frozen_array(numerics.kron(numerics.PAULI_Y, numerics.PAULI_Y))
"``σy ⊗ σy``"


def _selection(keep: QubitSelector) -> Tuple[Qubit, ...]:
    if isinstance(keep, (Qubit, int)):
        return (Qubit(keep),)
    return tuple(sorted({Qubit(q) for q in keep}))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A one- or two-qubit density matrix obtained as a reduction of a three-qubit state.

    Construction validates that the matrix is Hermitian, has unit trace and is positive semidefinite.
    """

    mat: numerics.CMatrix
    "The 2×2 or 4×4 matrix in the computational basis of :attr:`qubits`. The array is read-only."

    qubits: Tuple[Qubit, ...]
    "Which qubits this matrix describes, in ascending order (the first one being the most significant)."

    def __post_init__(self) -> None:
        self._validate(check_spectrum=True)

    @classmethod
    def _trusted(cls, mat: numerics.CMatrix, qubits: Tuple[Qubit, ...]) -> "DensityMatrix":
        # reductions of a normalized pure state are positive semidefinite by construction so only the cheap
        # invariants are rechecked
        instance = object.__new__(cls)
        object.__setattr__(instance, "mat", mat)
        object.__setattr__(instance, "qubits", qubits)
        instance._validate(check_spectrum=False)
        return instance

    def _validate(
        self, check_spectrum: bool, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> None:
        mat = numerics.as_cmatrix(self.mat)
        qubits = _selection(self.qubits)
        dim = 2 ** len(qubits)
        require(
            len(qubits) in (1, 2) and mat.shape == (dim, dim),
            f"a density matrix of {len(qubits)} qubits must be {dim}×{dim} but is {mat.shape}",
        )
        require(
            float(np.max(np.abs(mat - mat.conj().T))) <= tolerances.hermiticity,
            "density matrix is not Hermitian",
        )
        require(
            abs(complex(np.trace(mat)) - 1) <= tolerances.trace,
            "density matrix does not have unit trace",
        )
        if check_spectrum:
            spectrum = numerics.eigenvalues(mat, tolerances)
            require(
                min(v.real for v in spectrum) >= -tolerances.psd,
                "density matrix is not positive semidefinite",
            )
        object.__setattr__(self, "mat", frozen_array(mat))
        object.__setattr__(self, "qubits", qubits)


class TangleDecomposition(BaseModel):
    """
    The monogamy decomposition ``C²_cut(rest) = C²_pair1 + C²_pair2 + τ`` of a three-qubit pure state.

    For the cut at qubit A the pairs are AB and AC.
    For other cuts, :attr:`c2_ab` and :attr:`c2_ac` hold the pairs of the cut qubit with the two remaining qubits in
    their natural order (e.g. BA and BC for the cut at B).
    """

    model_config = ConfigDict(frozen=True)

    cut: Qubit = Qubit.A
    "The qubit that is separated from the other two."

    c2_bipartition: float
    "Squared concurrence between the cut qubit and the remaining pair."

    c2_ab: float
    "Squared concurrence between the cut qubit and the first remaining qubit."

    c2_ac: float
    "Squared concurrence between the cut qubit and the second remaining qubit."

    tau: float
    "The three-tangle."

    @property
    def residual(self) -> float:
        """
        ``|C²_cut(rest) - C²_pair1 - C²_pair2 - τ|``, which vanishes for exact arithmetic
        """
        return abs(self.c2_bipartition - self.c2_ab - self.c2_ac - self.tau)

    @model_validator(mode="after")
    def _check_range(self) -> "TangleDecomposition":
        tol = DEFAULT_TOLERANCES.measure_range
        for name in ("c2_bipartition", "c2_ab", "c2_ac", "tau"):
            value = getattr(self, name)
            validate_that(-tol <= value <= 1 + tol, f"{name}={value!r} is outside of [0, 1]")
        return self


def _clip_measure(
    values: NDArray[np.float64], name: str, tolerances: Tolerances
) -> NDArray[np.float64]:
    low = float(np.min(values)) if values.size else 0.0
    high = float(np.max(values)) if values.size else 0.0
    if low < -tolerances.measure_range or high > 1 + tolerances.measure_range:
        raise ConsistencyError(
            f"{name} left [0, 1] by more than the rounding tolerance", low, high
        )
    return np.clip(values, 0.0, 1.0)


def hyperdeterminant_batch(amplitudes: ArrayLike) -> NDArray[np.complex128]:
    """
    Cayley hyperdeterminant ``d1 - 2 d2 + 4 d3`` of every state in a stack of amplitude vectors ``(..., 8)``.

    The terms are written out over the amplitudes ``a_ijk``, no complex conjugation is involved.
    """
    a = np.asarray(amplitudes, dtype=np.complex128)
    require(a.shape[-1:] == (8,), f"expected amplitude vectors of size 8 but got {a.shape}")
    a000, a001, a010, a011, a100, a101, a110, a111 = np.moveaxis(a, -1, 0)

    d1 = (
        a000**2 * a111**2
        + a001**2 * a110**2
        + a010**2 * a101**2
        + a100**2 * a011**2
    )
    d2 = (
        a000 * a111 * a100 * a011
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a010 * a101 * a110 * a001
    )
    d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100

    return np.asarray(d1 - 2.0 * d2 + 4.0 * d3, dtype=np.complex128)


def three_tangle_batch(
    amplitudes: ArrayLike, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> NDArray[np.float64]:
    """
    Three-tangle ``τ = 4|d1 - 2 d2 + 4 d3|`` of every state in a stack of amplitude vectors ``(..., 8)``.

    :raises ConsistencyError: If a result lies outside [0, 1] by more than ``tolerances.measure_range``.
    """
    tau = 4.0 * np.abs(hyperdeterminant_batch(amplitudes))
    return _clip_measure(np.asarray(tau, dtype=np.float64), "three-tangle", tolerances)


def bipartition_concurrence_sq_batch(
    amplitudes: ArrayLike, cut: Qubit, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> NDArray[np.float64]:
    """
    ``C²_cut(rest) = 4 det ρ_cut`` of every state in a stack of amplitude vectors ``(..., 8)``.

    :raises ConsistencyError: If a result lies outside [0, 1] by more than ``tolerances.measure_range``.
    """
    a = np.asarray(amplitudes, dtype=np.complex128)
    require(a.shape[-1:] == (8,), f"expected amplitude vectors of size 8 but got {a.shape}")
    t = a.reshape(a.shape[:-1] + (2, 2, 2))
    rows = np.moveaxis(t, a.ndim - 1 + int(cut), -3).reshape(a.shape[:-1] + (2, 4))
    rho_00 = np.sum(np.abs(rows[..., 0, :]) ** 2, axis=-1)
    rho_11 = np.sum(np.abs(rows[..., 1, :]) ** 2, axis=-1)
    rho_01 = np.sum(rows[..., 0, :] * np.conj(rows[..., 1, :]), axis=-1)
    c2 = 4.0 * (rho_00 * rho_11 - np.abs(rho_01) ** 2)
    return _clip_measure(
        np.asarray(c2, dtype=np.float64), "bipartition concurrence", tolerances
    )


def reduced_density(s: PureState3Q, keep: QubitSelector) -> DensityMatrix:
    """
    Partial trace of ``|s⟩⟨s|`` over all qubits that are not kept.

    :param keep: One qubit or a collection of one or two qubits.
    :raises InvalidInputError: If no qubit or all three qubits are selected.
    """
    kept = _selection(keep)
    require(
        1 <= len(kept) <= 2,
        f"a reduction must keep one or two qubits but {len(kept)} were selected",
    )
    ket = "ijk"
    bra = list("lmn")
    for q in Qubit:
        if q not in kept:
            bra[q] = ket[q]
    out = "".join(ket[q] for q in kept) + "".join(bra[q] for q in kept)
    rho = np.einsum(f"{ket},{''.join(bra)}->{out}", s.tensor, np.conj(s.tensor))
    dim = 2 ** len(kept)
    return DensityMatrix._trusted(rho.reshape(dim, dim), kept)


def concurrence_pair(
    rho: DensityMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """
    Wootters concurrence ``max{0, λ1 - λ2 - λ3 - λ4}`` of a two-qubit density matrix.

    The λ are the square roots, in decreasing order, of the eigenvalues of the non-Hermitian matrix
    ``ρ (σy⊗σy) ρ* (σy⊗σy)``.
    Its spectrum is real and nonnegative, so imaginary parts below ``tolerances.imag_dust`` and negative values above
    ``-tolerances.eigenvalue_dust`` are rounding and are discarded.
    Eigenvalues below ``tolerances.spectral_floor`` times the largest one are structural zeros.

    :raises InvalidInputError: If `rho` does not describe two qubits.
    :raises ConsistencyError: If the spectrum is not real and nonnegative beyond rounding.
    """
    require(len(rho.qubits) == 2, "the pairwise concurrence needs a two-qubit density matrix")
    flipped = SPIN_FLIP @ np.conj(rho.mat) @ SPIN_FLIP
    spectrum = np.array(numerics.eigenvalues(rho.mat @ flipped, tolerances))

    worst_imag = float(np.max(np.abs(spectrum.imag)))
    if worst_imag > tolerances.imag_dust:
        raise ConsistencyError(
            "spin-flipped product has a complex eigenvalue", worst_imag
        )
    values = spectrum.real
    if float(np.min(values)) < -tolerances.eigenvalue_dust:
        raise ConsistencyError(
            "spin-flipped product has a negative eigenvalue", float(np.min(values))
        )
    values = np.clip(values, 0.0, None)
    values[values < tolerances.spectral_floor * float(np.max(values))] = 0.0

    lambdas = np.sort(np.sqrt(values))[::-1]
    concurrence = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]
    return float(_clip_measure(np.array([max(concurrence, 0.0)]), "concurrence", tolerances)[0])


def pair_concurrence_sq(
    s: PureState3Q,
    pair: Tuple[Qubit, Qubit],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Squared Wootters concurrence of the reduction of `s` to the given pair of qubits.
    """
    return concurrence_pair(reduced_density(s, pair), tolerances) ** 2


def concurrence_sq_bipartition(
    s: PureState3Q, cut: Qubit, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """
    Squared concurrence ``C²_cut(rest)`` between one qubit and the remaining two.

    For a pure global state this equals ``4 det ρ_cut``.
    """
    rho = reduced_density(s, cut)
    value = 4.0 * numerics.determinant(rho.mat).real
    return float(_clip_measure(np.array([value]), "bipartition concurrence", tolerances)[0])


def three_tangle(s: PureState3Q, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    The three-tangle τ of a three-qubit pure state.

    τ is invariant under relabeling of the qubits and under local unitaries.
    """
    return float(three_tangle_batch(s.amp, tolerances))


def tangle_decomposition(
    s: PureState3Q, cut: Qubit = Qubit.A, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> TangleDecomposition:
    """
    Compute all terms of the monogamy identity independently and check that they agree.

    :param cut: The qubit that is separated from the other two.
    :raises ConsistencyError: If the monogamy residual exceeds ``tolerances.monogamy``.
        This signals a numerical bug and never a user error.
    """
    cut = Qubit(cut)
    first, second = (q for q in Qubit if q != cut)
    values: Any = dict(
        cut=cut,
        c2_bipartition=concurrence_sq_bipartition(s, cut, tolerances),
        c2_ab=pair_concurrence_sq(s, (cut, first), tolerances),
        c2_ac=pair_concurrence_sq(s, (cut, second), tolerances),
        tau=three_tangle(s, tolerances),
    )
    residual = abs(
        values["c2_bipartition"] - values["c2_ab"] - values["c2_ac"] - values["tau"]
    )
    if residual > tolerances.monogamy:
        raise ConsistencyError(
            f"monogamy residual {residual!r} exceeds {tolerances.monogamy!r}", values
        )
    logger.debug("monogamy residual %.3g for cut %s", residual, cut.name)
    return TangleDecomposition(**values)
