"""
Three-qubit pure states in the full 8-dimensional computational basis and in the 4-dimensional permutation-symmetric
subspace.

Amplitudes are always stored in lexicographic order ``|000⟩, |001⟩, |010⟩, |011⟩, |100⟩, |101⟩, |110⟩, |111⟩`` with
qubit A as the most significant position, i.e. ``amp[4*i + 2*j + k] = a_ijk``.
All state types are immutable values and every operation returns a new value.
"""
import enum
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from brachistochrone_tangle.exceptions import InvalidInputError, StateParseError
from brachistochrone_tangle.settings import DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.utils import frozen_array, require

Amplitudes = NDArray[np.complex128]


class Qubit(enum.IntEnum):
    """
    Labels of the three qubits, valued by their position in the amplitude index
    """

    A = 0
    B = 1
    C = 2


def _checked_vector(values: ArrayLike, size: int, what: str) -> Amplitudes:
    amp = np.asarray(values, dtype=np.complex128).reshape(-1)
    require(amp.shape == (size,), f"{what} needs {size} amplitudes but got {amp.size}")
    require(bool(np.isfinite(amp).all()), f"{what} contains non-finite amplitudes")
    return amp


def _validate_norm(amp: Amplitudes, what: str, tolerances: Tolerances) -> None:
    norm = float(np.sqrt(np.sum(np.abs(amp) ** 2)))
    require(
        abs(norm - 1.0) <= tolerances.normalization,
        f"{what} is not normalized (norm {norm!r}), use normalize() first",
    )


@dataclass(frozen=True, eq=False)
class PureState3Q:
    """
    A normalized three-qubit pure state ``Σ a_ijk |ijk⟩``.

    Construction validates that the 8 amplitudes are finite and normalized.
    Use :func:`normalize` or :meth:`from_amplitudes` to construct a state from an unnormalized vector.
    """

    amp: Amplitudes
    "The 8 amplitudes in lexicographic order. The array is read-only."

    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)
    "Tolerances the normalization is validated with."

    def __post_init__(self) -> None:
        amp = _checked_vector(self.amp, 8, "a three-qubit state")
        _validate_norm(amp, "three-qubit state", self.tolerances)
        object.__setattr__(self, "amp", frozen_array(amp))

    @classmethod
    def from_amplitudes(
        cls, values: ArrayLike, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> "PureState3Q":
        """
        Create a state from possibly unnormalized amplitudes by normalizing them.

        :raises InvalidInputError: If the vector has (nearly) zero norm.
        """
        return normalize(values, tolerances)

    @property
    def tensor(self) -> Amplitudes:
        """
        The amplitudes as a 2×2×2 array indexed by ``[i, j, k]``
        """
        return self.amp.reshape(2, 2, 2)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2)))

    def __repr__(self) -> str:
        return f"PureState3Q({format_state_text(self)})"


@dataclass(frozen=True, eq=False)
class SymmetricCoeffs:
    """
    A normalized state of the permutation-symmetric subspace, given by its coefficients over the ordered basis
    ``|000⟩, (|001⟩+|010⟩+|100⟩)/√3, (|110⟩+|101⟩+|011⟩)/√3, |111⟩``.
    """

    c: Amplitudes
    "The 4 coefficients. The array is read-only."

    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)
    "Tolerances the normalization is validated with."

    def __post_init__(self) -> None:
        c = _checked_vector(self.c, 4, "a symmetric state")
        _validate_norm(c, "symmetric state", self.tolerances)
        object.__setattr__(self, "c", frozen_array(c))


def _symmetric_basis() -> NDArray[np.complex128]:
    basis = np.zeros((8, 4), dtype=np.complex128)
    basis[0b000, 0] = 1
    basis[[0b001, 0b010, 0b100], 1] = 1 / np.sqrt(3)
    basis[[0b110, 0b101, 0b011], 2] = 1 / np.sqrt(3)
    basis[0b111, 3] = 1
    basis.setflags(write=False)
    return basis


SYMMETRIC_BASIS = _symmetric_basis()
"8×4 isometry whose columns are the symmetric basis vectors in the computational basis."


def inner_product(a: PureState3Q, b: PureState3Q) -> complex:
    """
    ``⟨a|b⟩``, conjugate-linear in the first argument.
    """
    return complex(np.vdot(a.amp, b.amp))


def symmetric_inner_product(a: SymmetricCoeffs, b: SymmetricCoeffs) -> complex:
    """
    ``⟨a|b⟩`` computed directly from the symmetric coefficients
    """
    return complex(np.vdot(a.c, b.c))


def normalize(
    a: Union[PureState3Q, ArrayLike], tolerances: Tolerances = DEFAULT_TOLERANCES
) -> PureState3Q:
    """
    Scale a vector of 8 amplitudes to unit norm, preserving its direction.

    :param a: A state or any array of 8 (possibly unnormalized) amplitudes.
    :raises InvalidInputError: If the norm of the vector is below ``tolerances.normalize_floor``.
    """
    values = a.amp if isinstance(a, PureState3Q) else a
    amp = _checked_vector(values, 8, "a three-qubit state")
    norm = float(np.sqrt(np.sum(np.abs(amp) ** 2)))
    require(
        norm > tolerances.normalize_floor,
        f"cannot normalize a vector of norm {norm!r}",
    )
    return PureState3Q(amp / norm, tolerances)


def embed_symmetric(s: SymmetricCoeffs) -> PureState3Q:
    """
    Express a symmetric state in the full computational basis.

    This map is an isometry, norms and inner products are preserved.
    """
    return PureState3Q(SYMMETRIC_BASIS @ s.c, s.tolerances)


def basis_state(bits: Union[str, Sequence[int]]) -> PureState3Q:
    """
    The computational basis state ``|klm⟩``.

    :param bits: Either a string like ``"011"`` or a sequence of three integers in {0, 1}.
    """
    values = [int(b) for b in bits]
    require(
        len(values) == 3 and all(b in (0, 1) for b in values),
        f"expected three bits but got {bits!r}",
    )
    amp = np.zeros(8, dtype=np.complex128)
    amp[4 * values[0] + 2 * values[1] + values[2]] = 1
    return PureState3Q(amp)


def ghz() -> PureState3Q:
    """
    ``(|000⟩ + |111⟩)/√2``
    """
    amp = np.zeros(8, dtype=np.complex128)
    amp[[0b000, 0b111]] = 1 / np.sqrt(2)
    return PureState3Q(amp)


def w() -> PureState3Q:
    """
    ``(|001⟩ + |010⟩ + |100⟩)/√3``
    """
    return PureState3Q(SYMMETRIC_BASIS[:, 1])


def w_tilde() -> PureState3Q:
    """
    The spin-flipped W state ``(|110⟩ + |101⟩ + |011⟩)/√3``
    """
    return PureState3Q(SYMMETRIC_BASIS[:, 2])


def product_state(qubit: Qubit, single: ArrayLike, pair: ArrayLike) -> PureState3Q:
    """
    The product ``|single⟩_qubit ⊗ |pair⟩`` where `pair` describes the two remaining qubits in their natural order.

    :param qubit: The qubit carrying the single-qubit factor.
    :param single: 2 amplitudes of the single-qubit factor.
    :param pair: 4 amplitudes of the two-qubit factor.
    """
    one = _checked_vector(single, 2, "a single-qubit state")
    two = _checked_vector(pair, 4, "a two-qubit state").reshape(2, 2)
    subscripts = {
        Qubit.A: "i,jk->ijk",
        Qubit.B: "j,ik->ijk",
        Qubit.C: "k,ij->ijk",
    }[Qubit(qubit)]
    return normalize(np.einsum(subscripts, one, two).reshape(8))


def permute_qubits(s: PureState3Q, order: Tuple[int, int, int]) -> PureState3Q:
    """
    Relabel the qubits of a state.

    :param order: A permutation of ``(0, 1, 2)``; qubit ``n`` of the result is qubit ``order[n]`` of `s`.
    """
    require(
        sorted(order) == [0, 1, 2], f"{order!r} is not a permutation of the qubits"
    )
    return PureState3Q(np.transpose(s.tensor, order).reshape(8), s.tolerances)


def apply_local_unitaries(
    s: PureState3Q, ua: ArrayLike, ub: ArrayLike, uc: ArrayLike
) -> PureState3Q:
    """
    Apply ``ua ⊗ ub ⊗ uc`` to a state.
    """
    factors = [np.asarray(u, dtype=np.complex128) for u in (ua, ub, uc)]
    require(
        all(u.shape == (2, 2) for u in factors), "local unitaries must be 2×2 matrices"
    )
    result = np.einsum("ai,bj,ck,ijk->abc", *factors, s.tensor)
    return PureState3Q(result.reshape(8), s.tolerances)


_NAMED_STATES = {
    "ghz": ghz,
    "w": w,
    "wtilde": w_tilde,
}


def format_state_text(s: PureState3Q) -> str:
    """
    Serialize a state as 8 whitespace separated ``re,im`` pairs in lexicographic amplitude order.
    """
    return " ".join(f"{a.real:.17g},{a.imag:.17g}" for a in s.amp)


def parse_state_text(text: str, field: str = "state") -> PureState3Q:
    """
    Parse a state from either one of the names ``ghz``, ``w``, ``wtilde`` or from 8 whitespace separated ``re,im``
    pairs in lexicographic amplitude order.
    The parsed vector is normalized.

    :param field: Name of the input that is being parsed, used in error messages.
    :raises StateParseError: If the text cannot be parsed into a normalizable state.
    """
    stripped = text.strip()
    if stripped.lower() in _NAMED_STATES:
        return _NAMED_STATES[stripped.lower()]()

    tokens = stripped.split()
    if len(tokens) != 8:
        raise StateParseError(
            field, f"expected 8 're,im' pairs or a state name but got {len(tokens)} tokens"
        )
    amp = np.zeros(8, dtype=np.complex128)
    for index, token in enumerate(tokens):
        parts = token.split(",")
        try:
            if len(parts) != 2:
                raise ValueError(f"expected 're,im' but got {token!r}")
            amp[index] = complex(float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise StateParseError(f"{field}[{index}]", str(e)) from e
    try:
        return normalize(amp)
    except InvalidInputError as e:
        raise StateParseError(field, str(e)) from e
