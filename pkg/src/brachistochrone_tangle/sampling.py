"""
Haar-random unitaries and random evolution pairs with a prescribed overlap.

Randomness comes from counter-based Philox streams addressed by ``(seed, stream_id)`` so that any shard of a Monte Carlo
campaign can be regenerated independently of all others.
"""
import enum
import logging
import math
from typing import ClassVar, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from brachistochrone_tangle import numerics
from brachistochrone_tangle.evolution import EvolutionPair
from brachistochrone_tangle.exceptions import ConsistencyError
from brachistochrone_tangle.settings import DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import (
    SYMMETRIC_BASIS,
    Amplitudes,
    PureState3Q,
    SymmetricCoeffs,
    embed_symmetric,
)
from brachistochrone_tangle.utils import require

logger = logging.getLogger(__name__)

_UINT64_LIMIT = 2**64


class RngStream(BaseModel):
    """
    Address of an independent random stream.

    Equal ``(seed, stream_id)`` values always reproduce the same numbers bit for bit while different stream ids are
    statistically independent.
    """

    model_config = ConfigDict(frozen=True)

    ALGORITHM: ClassVar[str] = "philox4x64"
    "Name of the underlying bit generator as recorded in output metadata."

    seed: int = Field(ge=0, lt=_UINT64_LIMIT)
    stream_id: int = Field(default=0, ge=0, lt=_UINT64_LIMIT)

    def generator(self) -> np.random.Generator:
        """
        Create a fresh generator that starts at the beginning of this stream
        """
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(sequence))

    def spawn(self, offset: int) -> "RngStream":
        """
        The stream `offset` positions after this one, sharing the seed
        """
        return RngStream(seed=self.seed, stream_id=self.stream_id + offset)


RandomSource = Union[RngStream, np.random.Generator]


def _generator(rng: RandomSource) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


class Ensemble(str, enum.Enum):
    """
    Ensembles of random evolution pairs
    """

    SYMMETRIC = "symmetric"
    "Pairs drawn uniformly from the permutation-symmetric subspace."

    GENERAL = "general"
    "Pairs drawn uniformly from the full three-qubit state space."

    @property
    def dim(self) -> int:
        return 4 if self == Ensemble.SYMMETRIC else 8


def ginibre(
    dim: int, rng: RandomSource, count: Optional[int] = None
) -> numerics.CMatrix:
    """
    A dim×dim matrix (or a stack of `count` matrices) of independent standard complex normal entries
    ``(x + iy)/√2`` with x and y standard normal.
    """
    require(dim >= 1, f"dimension must be positive but is {dim}")
    shape: Tuple[int, ...] = (dim, dim) if count is None else (count, dim, dim)
    parts = _generator(rng).standard_normal(shape + (2,))
    return (parts[..., 0] + 1j * parts[..., 1]) / math.sqrt(2)


def haar_unitaries(
    dim: int,
    count: int,
    rng: RandomSource,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> numerics.CMatrix:
    """
    A stack of `count` independent Haar-distributed unitaries of shape ``(count, dim, dim)``.

    Uses the QR decomposition of Ginibre matrices with the phases of the diagonal of r absorbed into q.

    :param dim: Either 4 or 8.
    :raises InvalidInputError: If `dim` is not supported.
    :raises ConsistencyError: If a result is not unitary within ``tolerances.unitarity``.
    """
    require(dim in (4, 8), f"Haar unitaries are only sampled in dimension 4 or 8 but not {dim}")
    require(count >= 1, f"at least one unitary must be requested but got {count}")
    q, _ = numerics.qr_decompose(ginibre(dim, rng, count))
    defect = numerics.unitarity_defect(q)
    if defect > tolerances.unitarity:
        raise ConsistencyError("sampled matrix is not unitary", defect)
    return q


def haar_unitary(
    dim: int, rng: RandomSource, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> numerics.CMatrix:
    """
    A single Haar-distributed unitary of size dim×dim, see :func:`haar_unitaries`.

    Passing an :class:`RngStream` restarts that stream on every call and therefore always yields the same matrix.
    Pass a :class:`numpy.random.Generator` to draw a sequence.
    """
    return haar_unitaries(dim, 1, rng, tolerances)[0]


def _require_theta(theta: float) -> None:
    require(0 < theta <= math.pi, f"separation angle must be in (0, π] but is {theta!r}")


def sample_pair_symmetric(
    theta: float, rng: RandomSource, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> EvolutionPair:
    """
    A random pair of permutation-symmetric states with overlap ``cos(θ/2)``.

    A Haar unitary M of size 4 maps ``(1, 0, 0, 0)`` to the initial and ``(cos θ/2, sin θ/2, 0, 0)`` to the final
    coefficients over the symmetric basis.

    :raises InvalidInputError: If `theta` is not in ``(0, π]``.
    """
    _require_theta(theta)
    m = haar_unitary(4, rng, tolerances)
    initial = SymmetricCoeffs(m[:, 0], tolerances)
    final = SymmetricCoeffs(math.cos(theta / 2) * m[:, 0] + math.sin(theta / 2) * m[:, 1], tolerances)
    return EvolutionPair(embed_symmetric(initial), embed_symmetric(final), theta, tolerances)


def sample_pair_general(
    theta: float, rng: RandomSource, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> EvolutionPair:
    """
    A random pair of three-qubit states with overlap ``cos(θ/2)``, built like :func:`sample_pair_symmetric` but with a
    Haar unitary of size 8 acting on the full computational basis.

    :raises InvalidInputError: If `theta` is not in ``(0, π]``.
    """
    _require_theta(theta)
    m = haar_unitary(8, rng, tolerances)
    final = math.cos(theta / 2) * m[:, 0] + math.sin(theta / 2) * m[:, 1]
    return EvolutionPair(
        PureState3Q(m[:, 0], tolerances), PureState3Q(final, tolerances), theta, tolerances
    )


def sample_pairs(
    ensemble: Ensemble,
    theta: float,
    count: int,
    rng: RandomSource,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[Amplitudes, Amplitudes]:
    """
    Draw `count` pairs of the given ensemble at once.

    :returns: Initial and final amplitudes, each of shape ``(count, 8)``.
    """
    _require_theta(theta)
    ensemble = Ensemble(ensemble)
    m = haar_unitaries(ensemble.dim, count, rng, tolerances)
    initial = m[:, :, 0]
    final = math.cos(theta / 2) * m[:, :, 0] + math.sin(theta / 2) * m[:, :, 1]
    if ensemble == Ensemble.SYMMETRIC:
        initial = initial @ SYMMETRIC_BASIS.T
        final = final @ SYMMETRIC_BASIS.T
    logger.debug("sampled %d %s pairs at θ=%s", count, ensemble.value, theta)
    return initial, final
