"""
Self-check suites which exercise the invariants of every module on random input.

Each suite reports the worst residual it observed together with the threshold it was held to.
"""
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pydantic
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict

from brachistochrone_tangle import numerics
from brachistochrone_tangle.casestudies import alpha_scan, case1_state, case1_tangle_closed_form
from brachistochrone_tangle.entanglement import tangle_decomposition, three_tangle
from brachistochrone_tangle.evolution import geodesic_amplitudes
from brachistochrone_tangle.exceptions import BrachistochroneError
from brachistochrone_tangle.sampling import (
    Ensemble,
    RngStream,
    haar_unitaries,
    sample_pair_general,
    sample_pairs,
)
from brachistochrone_tangle.settings import CAMPAIGN_DEFAULTS, DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import (
    SymmetricCoeffs,
    embed_symmetric,
    inner_product,
    normalize,
    symmetric_inner_product,
)
from brachistochrone_tangle.statistics import CampaignMeasure, estimate_pdf, run_campaign_samples

logger = logging.getLogger(__name__)

ALPHA_ZERO_AVERAGE = 0.7215
ALPHA_QUARTER_TURN_AVERAGE = 0.1667
REPRODUCTION_TOLERANCE = 5e-4


class SuiteResult(BaseModel):
    """
    Outcome of a single verification suite
    """

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    worst_residual: Optional[float]
    "None if the suite raised before it could measure anything."

    threshold: float
    detail: str = ""

    def report_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = "n/a" if self.worst_residual is None else f"{self.worst_residual:.3g}"
        return (
            f"{self.name:<13} {status} worst={worst} threshold={self.threshold:.3g}"
            + (f" {self.detail}" if self.detail else "")
        )


def _sizes(quick: bool) -> Dict[str, int]:
    if quick:
        return {"matrices": 30, "states": 200, "pairs": 10, "grid": 10, "unitaries": 50, "samples": 100}
    return {"matrices": 1_000, "states": 10_000, "pairs": 250, "grid": 50, "unitaries": 1_000, "samples": 1_000}


def _unit_vector(g: np.random.Generator, size: int) -> NDArray[np.complex128]:
    v = g.standard_normal(size) + 1j * g.standard_normal(size)
    return np.asarray(v / np.sqrt(np.sum(np.abs(v) ** 2)), dtype=np.complex128)


MATRIX_DIMENSIONS = (2, 4, 8)


def _random_matrix(g: np.random.Generator, rows: int, cols: int) -> NDArray[np.complex128]:
    return np.asarray(
        (g.standard_normal((rows, cols)) + 1j * g.standard_normal((rows, cols))) / math.sqrt(2),
        dtype=np.complex128,
    )


def _psd_violation(spectrum: NDArray[Any]) -> float:
    """
    How far the spectrum of a Hermitian positive semidefinite matrix leaves the nonnegative real axis
    """
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    return float(max(np.max(np.abs(spectrum.imag)), np.max(np.maximum(0.0, -spectrum.real))))


def _check_numerics(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    worst = 0.0
    for k in range(sizes["matrices"]):
        n = MATRIX_DIMENSIONS[k % len(MATRIX_DIMENSIONS)]
        a = _random_matrix(g, n, n)
        spectrum = numerics.eigenvalues(a, tolerances)
        det = numerics.determinant(a)
        q, r = numerics.qr_decompose(a)

        # rank deficient density matrix
        b = _random_matrix(g, n, max(1, n // 2))
        rho = b @ b.conj().T
        rho = rho / np.trace(rho).real
        psd_spectrum = np.asarray(numerics.eigenvalues(rho, tolerances), dtype=np.complex128)
        worst = max(
            worst,
            abs(sum(spectrum) - complex(np.trace(a))),
            abs(complex(np.prod(spectrum)) - det) / max(1.0, abs(det)),
            float(np.max(np.abs(q @ r - a))),
            _psd_violation(psd_spectrum),
            abs(complex(np.sum(psd_spectrum)) - 1),
        )
    dims = "/".join(str(n) for n in MATRIX_DIMENSIONS)
    return worst, (
        f"trace, determinant, qr and psd spectra of {sizes['matrices']} random matrices of dimension {dims}"
    )


def _check_states(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    worst = 0.0
    for _ in range(sizes["states"] // 10):
        a, b = (
            SymmetricCoeffs(_unit_vector(g, 4), tolerances)
            for _ in range(2)
        )
        worst = max(
            worst,
            abs(inner_product(embed_symmetric(a), embed_symmetric(b)) - symmetric_inner_product(a, b)),
        )
    return worst, "symmetric embedding preserves inner products"


def _check_entanglement(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    worst = 0.0
    for _ in range(sizes["states"]):
        s = normalize(g.standard_normal(8) + 1j * g.standard_normal(8), tolerances)
        worst = max(worst, tangle_decomposition(s, tolerances=tolerances).residual)
    return worst, f"monogamy residual over {sizes['states']} random states"


def _check_evolution(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    worst = 0.0
    for theta in (math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi):
        for _ in range(sizes["pairs"]):
            pair = sample_pair_general(theta, g, tolerances)
            amps = geodesic_amplitudes(pair, np.linspace(0, theta / 2, 100))
            norms = np.sqrt(np.sum(np.abs(amps) ** 2, axis=-1))
            worst = max(
                worst,
                float(np.max(np.abs(norms - 1))),
                float(np.max(np.abs(amps[0] - pair.initial.amp))),
                float(np.max(np.abs(amps[-1] - pair.final.amp))),
            )
    return worst, "geodesic norm and endpoints"


def _check_casestudies(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    grid = np.linspace(0, math.pi / 2, sizes["grid"])
    worst = max(
        abs(case1_tangle_closed_form(xi, alpha) - three_tangle(case1_state(xi, alpha), tolerances))
        for xi in grid
        for alpha in grid
    )
    (_, at_zero), (_, at_quarter_turn) = alpha_scan([0.0, math.pi / 2], sizes["nodes"], tolerances)
    deviation = max(
        abs(at_zero - ALPHA_ZERO_AVERAGE), abs(at_quarter_turn - ALPHA_QUARTER_TURN_AVERAGE)
    )
    if deviation > REPRODUCTION_TOLERANCE:
        raise BrachistochroneError(
            f"time averages {at_zero:.6f} and {at_quarter_turn:.6f} deviate from the reference values"
        )
    return worst, f"closed form on a {sizes['grid']}×{sizes['grid']} grid, ⟨τ(0)⟩={at_zero:.4f}"


def _check_sampling(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    worst = max(
        numerics.unitarity_defect(haar_unitaries(dim, sizes["unitaries"], g, tolerances)) for dim in (4, 8)
    )
    for ensemble in Ensemble:
        initial, final = sample_pairs(ensemble, math.pi / 3, sizes["unitaries"], g, tolerances)
        overlaps = np.sum(np.conj(initial) * final, axis=-1)
        worst = max(worst, float(np.max(np.abs(overlaps - math.cos(math.pi / 6)))))
    return worst, "Haar unitarity and pair overlaps"


def _check_statistics(g: np.random.Generator, sizes: Dict[str, int], tolerances: Tolerances) -> Tuple[float, str]:
    seed = int(g.integers(0, 2**63))
    result = run_campaign_samples(
        Ensemble.SYMMETRIC,
        math.pi,
        sizes["samples"],
        CampaignMeasure.TAU,
        RngStream(seed=seed),
        nodes=sizes["nodes"],
        tolerances=tolerances,
    )
    if float(np.min(result.values)) <= 0:
        raise BrachistochroneError("a time averaged three-tangle vanished")
    pdf = estimate_pdf(result.values, CAMPAIGN_DEFAULTS.bins)
    return abs(pdf.integral - 1), f"histogram integral over {sizes['samples']} samples"


Check = Callable[[np.random.Generator, Dict[str, int], Tolerances], Tuple[float, str]]

SUITES: List[Tuple[str, Check, Callable[[Tolerances], float]]] = [
    ("numerics", _check_numerics, lambda t: 1e-10),
    ("states", _check_states, lambda t: 1e-12),
    ("entanglement", _check_entanglement, lambda t: t.monogamy),
    ("evolution", _check_evolution, lambda t: t.normalization),
    ("casestudies", _check_casestudies, lambda t: 1e-12),
    ("sampling", _check_sampling, lambda t: t.unitarity),
    ("statistics", _check_statistics, lambda t: t.histogram_integral),
]


def run_suites(
    seed: int = CAMPAIGN_DEFAULTS.seed,
    quick: bool = False,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    stream_base: int = CAMPAIGN_DEFAULTS.stream_base,
) -> List[SuiteResult]:
    """
    Run every verification suite.

    A suite that raises a library error or rejects a generated value fails with no residual; the remaining suites
    still run.

    :param seed: Suite ``k`` draws from the random stream ``(seed, stream_base + k)``.
    :param quick: Use much smaller sample sizes for a fast smoke run.
    :param nodes: Gauss-Legendre node count of the time averages computed by the suites.
    """
    sizes = dict(_sizes(quick), nodes=nodes)
    results = []
    for k, (name, check, threshold_of) in enumerate(SUITES):
        threshold = threshold_of(tolerances)
        try:
            g = RngStream(seed=seed, stream_id=stream_base + k).generator()
            worst, detail = check(g, sizes, tolerances)
            result = SuiteResult(
                name=name, passed=worst <= threshold, worst_residual=worst, threshold=threshold, detail=detail
            )
        except (BrachistochroneError, pydantic.ValidationError) as e:
            logger.error("suite %s failed", name, exc_info=True)
            result = SuiteResult(
                name=name, passed=False, worst_residual=None, threshold=threshold, detail=" ".join(str(e).split())
            )
        logger.info(result.report_line())
        results.append(result)
    return results
