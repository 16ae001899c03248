"""
Families of evolutions whose entanglement can be worked out by hand.

- the orthogonal evolution from ``W̃`` to ``cos α |GHZ⟩ + sin α |W⟩`` whose three-tangle has a closed form,
- evolutions between GHZ-like states with relative phases along which the three-tangle stays 1 and every pairwise
  concurrence vanishes.

They serve both as reproduction targets and as oracles for the generic pipeline.
"""
import logging
import math
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from brachistochrone_tangle.evolution import TAU, EvolutionPair, time_average
from brachistochrone_tangle.exceptions import ConsistencyError
from brachistochrone_tangle.settings import CAMPAIGN_DEFAULTS, DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import PureState3Q, basis_state, ghz, inner_product, w, w_tilde
from brachistochrone_tangle.utils import require

logger = logging.getLogger(__name__)

_QUARTER_TURN = math.pi / 2


def _require_angle(value: float, name: str) -> None:
    require(0 <= value <= _QUARTER_TURN, f"{name} must lie in [0, π/2] but is {value!r}")


def _case1_final(alpha: float) -> PureState3Q:
    return PureState3Q(math.cos(alpha) * ghz().amp + math.sin(alpha) * w().amp)


def case1_tangle_closed_form(xi: float, alpha: float) -> float:
    """
    Three-tangle along the evolution of :func:`case1_pair`, evaluated from its closed form

    ``τ(ξ, α) = 4 |¼ s⁴ cα⁴ - ⅓ s² c² sα² - s³ c sα cα² + (4/3√6) s c³ cα + (4/3√6) s⁴ sα³ cα|``

    with ``s = sin ξ``, ``c = cos ξ``, ``sα = sin α`` and ``cα = cos α``.

    :raises InvalidInputError: If `xi` or `alpha` lie outside of ``[0, π/2]``.
    """
    _require_angle(xi, "xi")
    _require_angle(alpha, "alpha")
    s, c = math.sin(xi), math.cos(xi)
    sa, ca = math.sin(alpha), math.cos(alpha)
    k = 4 / (3 * math.sqrt(6))
    return 4 * abs(
        s**4 * ca**4 / 4
        - s**2 * c**2 * sa**2 / 3
        - s**3 * c * sa * ca**2
        + k * s * c**3 * ca
        + k * s**4 * sa**3 * ca
    )


def case1_pair(alpha: float) -> EvolutionPair:
    """
    The orthogonal pair ``W̃ → cos α |GHZ⟩ + sin α |W⟩``.

    :raises InvalidInputError: If `alpha` lies outside of ``[0, π/2]``.
    """
    _require_angle(alpha, "alpha")
    return EvolutionPair(w_tilde(), _case1_final(alpha), math.pi)


def case1_state(xi: float, alpha: float) -> PureState3Q:
    """
    The state ``cos ξ |W̃⟩ + sin ξ (cos α |GHZ⟩ + sin α |W⟩)`` written out directly instead of going through
    :func:`~brachistochrone_tangle.evolution.geodesic_state`
    """
    _require_angle(xi, "xi")
    _require_angle(alpha, "alpha")
    return PureState3Q(math.cos(xi) * w_tilde().amp + math.sin(xi) * _case1_final(alpha).amp)


def case2_pair() -> EvolutionPair:
    """
    ``(|000⟩ - i|111⟩)/√2 → (i|000⟩ - |111⟩)/√2``, along which ``τ = 1`` holds at all times
    """
    return ghz_phase_family(0.0, _QUARTER_TURN, "000")


def ghz_phase_family(
    phi_a: float, phi_b: float, klm: Union[str, Sequence[int]]
) -> EvolutionPair:
    """
    The orthogonal pair

    ``(e^{iφ_A}|klm⟩ - e^{iφ_B}|k̄l̄m̄⟩)/√2 → i(e^{iφ_A}|klm⟩ + e^{iφ_B}|k̄l̄m̄⟩)/√2``

    where ``k̄ = 1 - k``. Every state along this evolution has ``τ = C²_A(BC) = 1`` and no pairwise entanglement.

    :param klm: Three bits given as a string like ``"010"`` or a sequence of integers.
    """
    bits = [int(b) for b in klm]
    word = basis_state(bits).amp
    flipped = basis_state([1 - b for b in bits]).amp
    a, b = np.exp(1j * phi_a), np.exp(1j * phi_b)
    initial = PureState3Q((a * word - b * flipped) / math.sqrt(2))
    final = PureState3Q(1j * (a * word + b * flipped) / math.sqrt(2))
    return EvolutionPair(initial, final, math.pi)


def alpha_grid(points: int = CAMPAIGN_DEFAULTS.alpha_points) -> NDArray[np.float64]:
    """
    A uniform grid of `points` values on ``[0, π/2]``, both ends included
    """
    require(points >= 2, f"an α grid needs at least 2 points but got {points}")
    return np.linspace(0.0, _QUARTER_TURN, points)


def alpha_scan(
    alphas: Iterable[float],
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> List[Tuple[float, float]]:
    """
    The time averaged three-tangle along :func:`case1_pair` for every given α.

    :raises InvalidInputError: If any α lies outside of ``[0, π/2]``.
    :returns: ``(α, ⟨τ⟩)`` tuples in the order of `alphas`.
    """
    result = []
    for alpha in alphas:
        pair = case1_pair(float(alpha))
        overlap = abs(inner_product(pair.initial, pair.final))
        if overlap > tolerances.overlap:
            raise ConsistencyError(f"pair at α={alpha!r} is not orthogonal", overlap)
        result.append((float(alpha), time_average(pair, TAU, nodes, tolerances)))
    logger.debug("scanned %d values of α with %d nodes", len(result), nodes)
    return result
