"""
The time-optimal (brachistochrone) evolution between two prescribed pure states and time averages of entanglement
measures along it.

Natural units are used throughout (ħ = 1), so that the dimensionless time ``ξ = ωt`` runs over ``[0, θ/2]`` where θ
is the separation angle defined by ``⟨Ψ_I|Ψ_F⟩ = cos(θ/2)``.
"""
import enum
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from brachistochrone_tangle.entanglement import (
    bipartition_concurrence_sq_batch,
    hyperdeterminant_batch,
    pair_concurrence_sq,
    reduced_density,
    three_tangle_batch,
)
from brachistochrone_tangle.exceptions import ConsistencyError
from brachistochrone_tangle.settings import CAMPAIGN_DEFAULTS, DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import Amplitudes, PureState3Q, Qubit, inner_product, normalize
from brachistochrone_tangle.utils import require

logger = logging.getLogger(__name__)

MIN_NODES = 16
"Smallest accepted Gauss-Legendre node count."

KINK_GRID = 128
"Number of cells the ξ interval is scanned in for sign changes of the hyperdeterminant."

BISECTIONS = 60


@dataclass(frozen=True, eq=False)
class EvolutionPair:
    """
    An initial and a final state together with their separation angle θ.

    Construction validates that ``⟨initial|final⟩ = cos(θ/2)``, i.e. that the overlap is real and nonnegative.
    Use :meth:`from_states` to obtain a pair from two arbitrary states.
    """

    initial: PureState3Q
    final: PureState3Q
    theta: float
    "Separation angle in radians, in (0, π]."

    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)
    "Tolerances the overlap is validated with."

    def __post_init__(self) -> None:
        self._validate(self.tolerances)

    def _validate(self, tolerances: Tolerances) -> None:
        require(
            0 < self.theta <= math.pi,
            f"separation angle must be in (0, π] but is {self.theta!r}",
        )
        overlap = inner_product(self.initial, self.final)
        if (
            abs(overlap.imag) > tolerances.overlap
            or abs(overlap.real - math.cos(self.theta / 2)) > tolerances.overlap
        ):
            raise ConsistencyError(
                f"overlap {overlap!r} does not match cos(θ/2) = {math.cos(self.theta / 2)!r}",
                self.theta,
            )

    @classmethod
    def from_states(
        cls,
        initial: PureState3Q,
        final: PureState3Q,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> "EvolutionPair":
        """
        Build a pair from two arbitrary states.

        Both states are normalized and the global phase of `final` is rotated so that the overlap becomes real and
        nonnegative. θ is then derived from the overlap magnitude.

        :raises InvalidInputError: If both states are the same up to a global phase.
            Such a pair does not evolve at all, see :func:`classify_states`.
        """
        initial = normalize(initial, tolerances)
        final = normalize(final, tolerances)
        overlap = inner_product(initial, final)
        magnitude = abs(overlap)
        require(
            magnitude <= 1 - tolerances.identical,
            "initial and final state are identical up to a global phase",
        )
        if magnitude > 0:
            phase = overlap / magnitude
            logger.debug("rotating the final state by the phase %s", np.conj(phase))
            final = PureState3Q(final.amp * np.conj(phase), tolerances)
        return cls(initial, final, 2 * math.acos(min(magnitude, 1.0)), tolerances)


class EvolutionParams(BaseModel):
    """
    Physical and numerical parameters of an evolution
    """

    model_config = ConfigDict(frozen=True)

    omega: float = Field(default=1.0, gt=0)
    "The energy bound ω in natural units."

    nodes: int = Field(default=CAMPAIGN_DEFAULTS.nodes, ge=MIN_NODES)
    "Gauss-Legendre node count used for time averages."


Kernel = Callable[..., NDArray[np.float64]]
Breakpoints = Callable[[Amplitudes, Amplitudes, float, Tolerances], NDArray[np.float64]]


def _state_function_kernel(
    fn: Callable[[PureState3Q], float], amplitudes: ArrayLike, tolerances: Tolerances
) -> NDArray[np.float64]:
    amps = np.asarray(amplitudes, dtype=np.complex128)
    values = [fn(PureState3Q(a, tolerances)) for a in amps.reshape(-1, 8)]
    return np.asarray(values, dtype=np.float64).reshape(amps.shape[:-1])


def _pairwise_kernel(
    pair: Tuple[Qubit, Qubit], amplitudes: ArrayLike, tolerances: Tolerances
) -> NDArray[np.float64]:
    amps = np.asarray(amplitudes, dtype=np.complex128)
    values = [
        pair_concurrence_sq(PureState3Q(a, tolerances), pair, tolerances) for a in amps.reshape(-1, 8)
    ]
    return np.asarray(values, dtype=np.float64).reshape(amps.shape[:-1])


@dataclass(frozen=True)
class Measure:
    """
    An entanglement measure that can be evaluated on whole stacks of amplitude vectors at once.

    Measures are plain picklable values so that they can be shipped to worker processes.
    """

    name: str
    kernel: Kernel
    "Called as ``kernel(amplitudes, tolerances=...)`` with an array of shape ``(..., 8)``."

    breakpoints: Optional[Breakpoints] = None
    """
    Called as ``breakpoints(initial, final, theta, tolerances)`` with amplitude arrays of shape ``(m, 8)``.
    Returns the points of ``(0, θ/2)`` at which the measure is not smooth along each evolution as an array of shape
    ``(m, k)``, ascending per row and padded with ``θ/2``. Time averages integrate piecewise between them.
    """

    def evaluate(
        self, amplitudes: ArrayLike, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> NDArray[np.float64]:
        return self.kernel(amplitudes, tolerances=tolerances)

    def __call__(
        self, s: PureState3Q, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> float:
        return float(self.evaluate(s.amp, tolerances))

    @classmethod
    def from_state_function(
        cls, name: str, fn: Callable[[PureState3Q], float]
    ) -> "Measure":
        """
        Wrap an arbitrary functional of states.

        The functional is called once per state so this is much slower than the built-in measures.
        For use in multi-process campaigns, `fn` must be picklable (i.e. a module level function).
        """
        return cls(name, functools.partial(_state_function_kernel, fn))


def _geodesic_coefficients(
    theta: float, xis: NDArray[np.float64]
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    half = theta / 2
    initial = np.cos(xis) - math.cos(half) / math.sin(half) * np.sin(xis)
    final = np.sin(xis) / math.sin(half)
    return initial, final


def _tangle_kinks(
    initial: Amplitudes, final: Amplitudes, theta: float, tolerances: Tolerances
) -> NDArray[np.float64]:
    """
    Kinks of ``τ = 4|hdet|`` along every evolution.

    τ can only have a kink where the hyperdeterminant vanishes while changing sign, which requires it to be real up to
    a constant phase along the whole evolution (e.g. for real amplitudes). Sign changes are bracketed on a uniform
    grid and refined by bisection.
    """
    m = initial.shape[0]
    half = theta / 2
    grid = half * np.concatenate([[0.0], (np.arange(KINK_GRID) + 0.5) / KINK_GRID, [1.0]])
    ci, cf = _geodesic_coefficients(theta, grid)
    values = hyperdeterminant_batch(
        ci[None, :, None] * initial[:, None, :] + cf[None, :, None] * final[:, None, :]
    )

    reference = values[np.arange(m), np.argmax(np.abs(values), axis=1)]
    magnitude = np.abs(reference)
    phase = np.where(magnitude > 0, reference / np.where(magnitude > 0, magnitude, 1.0), 1.0)
    rotated = values * np.conj(phase)[:, None]
    is_real = np.max(np.abs(rotated.imag), axis=1) <= tolerances.real_path * magnitude
    signs = np.sign(rotated.real)
    rows, cells = np.nonzero((signs[:, :-1] * signs[:, 1:] < 0) & is_real[:, None])
    if rows.size == 0:
        return np.empty((m, 0), dtype=np.float64)

    lower, upper = grid[cells], grid[cells + 1]
    lower_sign = signs[rows, cells]
    for _ in range(BISECTIONS):
        middle = 0.5 * (lower + upper)
        ci, cf = _geodesic_coefficients(theta, middle)
        value = np.real(
            hyperdeterminant_batch(ci[:, None] * initial[rows] + cf[:, None] * final[rows])
            * np.conj(phase[rows])
        )
        same = np.sign(value) == lower_sign
        lower = np.where(same, middle, lower)
        upper = np.where(same, upper, middle)

    counts = np.bincount(rows, minlength=m)
    logger.debug("found %d kinks of the three-tangle in %d evolutions", rows.size, int(np.count_nonzero(counts)))
    kinks = np.full((m, int(counts.max())), half)
    # np.nonzero is row-major, so the kinks of every row come out ascending
    first = np.cumsum(counts) - counts
    kinks[rows, np.arange(rows.size) - first[rows]] = 0.5 * (lower + upper)
    return kinks


TAU = Measure("tau", three_tangle_batch, _tangle_kinks)
C2_BIPARTITION = Measure(
    "c2_a(bc)", functools.partial(bipartition_concurrence_sq_batch, cut=Qubit.A)
)
C2_AB = Measure("c2_ab", functools.partial(_pairwise_kernel, (Qubit.A, Qubit.B)))
C2_AC = Measure("c2_ac", functools.partial(_pairwise_kernel, (Qubit.A, Qubit.C)))
C2_BC = Measure("c2_bc", functools.partial(_pairwise_kernel, (Qubit.B, Qubit.C)))


def geodesic_amplitudes(pair: EvolutionPair, xis: ArrayLike) -> Amplitudes:
    """
    Amplitudes of the evolved state at every given ξ as an array of shape ``(len(xis), 8)``.

    :raises InvalidInputError: If any ξ lies outside ``[0, θ/2]``.
    """
    points = np.atleast_1d(np.asarray(xis, dtype=np.float64))
    require(
        bool(np.all((points >= 0) & (points <= pair.theta / 2))),
        f"evolution parameters must lie in [0, {pair.theta / 2!r}]",
    )
    ci, cf = _geodesic_coefficients(pair.theta, points)
    return ci[:, None] * pair.initial.amp[None, :] + cf[:, None] * pair.final.amp[None, :]


def geodesic_state(pair: EvolutionPair, xi: float) -> PureState3Q:
    """
    The state reached after evolving along the brachistochrone for the dimensionless time ``ξ = ωt``.

    ``Ψ(ξ) = [cos ξ - cot(θ/2) sin ξ] Ψ_I + [sin ξ / sin(θ/2)] Ψ_F``

    :param xi: A value in ``[0, θ/2]``. ``ξ = 0`` yields the initial and ``ξ = θ/2`` the final state.
    :raises InvalidInputError: If `xi` lies outside ``[0, θ/2]``.
    """
    return PureState3Q(geodesic_amplitudes(pair, [xi])[0], pair.tolerances)


def duration(pair: EvolutionPair, params: EvolutionParams = EvolutionParams()) -> float:
    """
    Time ``T = θ/(2ω)`` the evolution takes in natural units
    """
    return pair.theta / (2 * params.omega)


@functools.lru_cache(maxsize=16)
def _legendre(nodes: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(nodes: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Gauss-Legendre nodes and weights on ``[-1, 1]``.

    :raises InvalidInputError: If fewer than 16 nodes are requested.
    """
    require(nodes >= MIN_NODES, f"at least {MIN_NODES} quadrature nodes are required but got {nodes}")
    return _legendre(nodes)


def time_average_batch(
    initial: ArrayLike,
    final: ArrayLike,
    theta: float,
    measure: Measure,
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> NDArray[np.float64]:
    """
    Time averages of a measure along many evolutions that share the same θ.

    :param initial: Initial amplitudes of shape ``(m, 8)``.
    :param final: Final amplitudes of shape ``(m, 8)``, each having the real overlap ``cos(θ/2)`` with its initial
        state.
    :returns: The m averages, each in [0, 1].

    If the measure has :attr:`Measure.breakpoints`, ``[0, θ/2]`` is split at them and every piece gets its own
    `nodes`-point rule.
    """
    x, w = gauss_legendre(nodes)
    start = np.asarray(initial, dtype=np.complex128)
    end = np.asarray(final, dtype=np.complex128)
    require(
        start.shape == end.shape and start.shape[-1:] == (8,),
        f"initial and final amplitudes must have the same shape (m, 8) but got {start.shape} and {end.shape}",
    )
    leading = start.shape[:-1]
    start, end = start.reshape(-1, 8), end.reshape(-1, 8)
    m = start.shape[0]

    half = theta / 2
    kinks = (
        measure.breakpoints(start, end, theta, tolerances)
        if measure.breakpoints is not None
        else np.empty((m, 0), dtype=np.float64)
    )
    edges = np.concatenate([np.zeros((m, 1)), kinks, np.full((m, 1), half)], axis=1)
    lower, upper = edges[:, :-1, None], edges[:, 1:, None]
    xis = 0.5 * (lower + upper) + 0.5 * (upper - lower) * x
    weights = 0.5 * (upper - lower) * w

    ci, cf = _geodesic_coefficients(theta, xis)
    amps = ci[..., None] * start[:, None, None, :] + cf[..., None] * end[:, None, None, :]
    values = measure.evaluate(amps, tolerances)

    # (2/θ)·∫ f dξ over [0, θ/2]
    averages = (np.sum(values * weights, axis=(1, 2)) / half).reshape(leading)
    low, high = float(np.min(averages)), float(np.max(averages))
    if low < -tolerances.measure_range or high > 1 + tolerances.measure_range:
        raise ConsistencyError(
            f"time average of {measure.name} left [0, 1]", low, high
        )
    return np.asarray(np.clip(averages, 0.0, 1.0), dtype=np.float64)


def time_average(
    pair: EvolutionPair,
    measure: Measure = TAU,
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    ``(2/θ) ∫ measure(Ψ(ξ)) dξ`` over ``[0, θ/2]`` computed with Gauss-Legendre quadrature.

    :raises InvalidInputError: If fewer than 16 nodes are requested.
    """
    logger.debug("averaging %s over %d nodes", measure.name, nodes)
    return float(
        time_average_batch(
            pair.initial.amp[None, :],
            pair.final.amp[None, :],
            pair.theta,
            measure,
            nodes,
            tolerances,
        )[0]
    )


class TrivialKind(str, enum.Enum):
    IDENTICAL = "identical"
    SPECTATOR = "spectator"
    GENUINE = "genuine"


class TrivialityVerdict(BaseModel):
    """
    Whether an evolution is trivial from the point of view of three-qubit entanglement.

    - ``identical``: initial and final state coincide up to a global phase, nothing evolves.
    - ``spectator``: both states factor as the same single-qubit state on :attr:`qubit` times a two-qubit state, so
      only two qubits take part in the evolution.
    - ``genuine``: anything else.
    """

    model_config = ConfigDict(frozen=True)

    kind: TrivialKind
    qubit: Optional[Qubit] = None

    @property
    def is_trivial(self) -> bool:
        return self.kind != TrivialKind.GENUINE

    def __str__(self) -> str:
        if self.kind == TrivialKind.SPECTATOR and self.qubit is not None:
            return f"spectator({self.qubit.name})"
        return self.kind.value


def _pure_factor_fidelity(
    initial: PureState3Q, final: PureState3Q, qubit: Qubit, tolerances: Tolerances
) -> Optional[float]:
    # fidelity of the two single-qubit factors, or None if one of the marginals is mixed
    rho_i = reduced_density(initial, qubit).mat
    rho_f = reduced_density(final, qubit).mat
    purity_i = float(np.real(np.trace(rho_i @ rho_i)))
    purity_f = float(np.real(np.trace(rho_f @ rho_f)))
    if min(purity_i, purity_f) <= 1 - tolerances.spectator_purity:
        return None
    return float(np.real(np.trace(rho_i @ rho_f)))


def classify_states(
    initial: PureState3Q, final: PureState3Q, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> TrivialityVerdict:
    """
    Classify the evolution between two arbitrary states, see :class:`TrivialityVerdict`.

    Unlike :func:`classify_trivial`, this also accepts two identical states.
    """
    if abs(inner_product(initial, final)) > 1 - tolerances.identical:
        return TrivialityVerdict(kind=TrivialKind.IDENTICAL)
    for qubit in Qubit:
        fidelity = _pure_factor_fidelity(initial, final, qubit, tolerances)
        if fidelity is not None and fidelity > 1 - tolerances.identical:
            return TrivialityVerdict(kind=TrivialKind.SPECTATOR, qubit=qubit)
    return TrivialityVerdict(kind=TrivialKind.GENUINE)


def classify_trivial(
    pair: EvolutionPair, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> TrivialityVerdict:
    """
    Classify the evolution of a pair, see :class:`TrivialityVerdict`
    """
    return classify_states(pair.initial, pair.final, tolerances)
