import logging
import math
from typing import Callable

import numpy as np
import pytest

from brachistochrone_tangle.sampling import RngStream
from brachistochrone_tangle.states import PureState3Q, normalize

logger = logging.getLogger(__name__)

ORACLE_THETAS = (math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)
"Separation angles θ for which θ/2 is π/8, π/4, 3π/8 and π/2."


def random_state(g: np.random.Generator) -> PureState3Q:
    """A state drawn uniformly from the unit sphere of three-qubit states"""
    return normalize(g.standard_normal(8) + 1j * g.standard_normal(8))


def random_matrix(g: np.random.Generator, n: int) -> np.ndarray:
    return (g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))) / math.sqrt(2)


@pytest.fixture
def rng() -> np.random.Generator:
    """A generator with a fixed seed so that every test run sees the same numbers"""
    return RngStream(seed=20091106, stream_id=7).generator()


@pytest.fixture
def state_factory(rng) -> Callable[[], PureState3Q]:
    """
    Produce a new random state on every call
    """
    return lambda: random_state(rng)
