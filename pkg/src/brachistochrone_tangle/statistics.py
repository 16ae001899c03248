"""
Probability densities of time averaged entanglement over random evolutions.

A campaign draws evolution pairs from an :class:`~brachistochrone_tangle.sampling.Ensemble`, averages an entanglement
measure along each brachistochrone and summarizes the averages in a histogram density.
Work is split into shards of consecutive sample indices where shard ``k`` always uses the random stream
``stream_base + k``. The result therefore does not depend on how many worker processes evaluate the shards or in which
order they finish.
"""
import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from brachistochrone_tangle.entanglement import bipartition_concurrence_sq_batch
from brachistochrone_tangle.evolution import (
    C2_BIPARTITION,
    TAU,
    EvolutionPair,
    Measure,
    classify_states,
    time_average,
    time_average_batch,
)
from brachistochrone_tangle.exceptions import BrachistochroneError, SampleError
from brachistochrone_tangle.sampling import Ensemble, RngStream, sample_pairs
from brachistochrone_tangle.settings import CAMPAIGN_DEFAULTS, DEFAULT_TOLERANCES, Tolerances
from brachistochrone_tangle.states import Amplitudes, PureState3Q, Qubit
from brachistochrone_tangle.utils import require, validate_that

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100
MIN_BINS = 10


class CampaignMeasure(str, enum.Enum):
    """
    Measures that a campaign can average
    """

    TAU = "tau"
    "The three-tangle."

    C2 = "c2"
    "The squared concurrence between qubit A and the pair BC."

    @property
    def measure(self) -> Measure:
        return TAU if self == CampaignMeasure.TAU else C2_BIPARTITION


class PdfMetadata(BaseModel):
    """
    Provenance of a density estimate, sufficient to reproduce it
    """

    model_config = ConfigDict(frozen=True)

    ensemble: Optional[Ensemble] = None
    measure: Optional[CampaignMeasure] = None
    theta: Optional[float] = None
    seed: Optional[int] = None
    stream_base: Optional[int] = None
    nodes: Optional[int] = None
    shard_size: Optional[int] = None
    rng_algorithm: str = RngStream.ALGORITHM

    trivial_count: int = 0
    "Number of sampled evolutions that were classified as trivial."


class PdfEstimate(BaseModel):
    """
    A histogram density on [0, 1]
    """

    model_config = ConfigDict(frozen=True)

    bin_edges: Tuple[float, ...]
    "Ascending bin edges, starting at 0 and ending at 1."

    densities: Tuple[float, ...]
    "Nonnegative probability density of every bin, so that ``Σ densities[i] · width[i] = 1``."

    n_samples: int
    metadata: PdfMetadata = PdfMetadata()

    @model_validator(mode="after")
    def _check_histogram(self) -> "PdfEstimate":
        edges = np.asarray(self.bin_edges)
        validate_that(
            len(self.densities) == len(self.bin_edges) - 1,
            "there must be exactly one density per bin",
        )
        validate_that(bool(np.all(np.diff(edges) > 0)), "bin edges must be ascending")
        validate_that(min(self.densities) >= 0, "densities must not be negative")
        validate_that(self.n_samples > 0, "a density estimate needs at least one sample")
        validate_that(
            abs(self.integral - 1) <= DEFAULT_TOLERANCES.histogram_integral,
            f"density integrates to {self.integral!r} instead of 1",
        )
        return self

    @property
    def bin_widths(self) -> NDArray[np.float64]:
        return np.diff(np.asarray(self.bin_edges, dtype=np.float64))

    @property
    def bin_midpoints(self) -> NDArray[np.float64]:
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        return (edges[:-1] + edges[1:]) / 2

    @property
    def integral(self) -> float:
        return float(np.sum(np.asarray(self.densities) * self.bin_widths))

    @property
    def mean(self) -> float:
        """
        Mean of the binned distribution, taking every sample to sit at its bin midpoint
        """
        return float(np.sum(self.bin_midpoints * np.asarray(self.densities) * self.bin_widths))


def estimate_pdf(
    samples: ArrayLike,
    bins: int = CAMPAIGN_DEFAULTS.bins,
    metadata: Optional[PdfMetadata] = None,
) -> PdfEstimate:
    """
    Equal-width histogram density of samples from [0, 1].

    :raises InvalidInputError: If there are fewer than 100 samples, fewer than 10 bins or samples outside of [0, 1].
    """
    values = np.asarray(samples, dtype=np.float64).reshape(-1)
    require(
        values.size >= MIN_SAMPLES,
        f"a density estimate needs at least {MIN_SAMPLES} samples but got {values.size}",
    )
    require(bins >= MIN_BINS, f"at least {MIN_BINS} bins are required but got {bins}")
    require(
        bool(np.all((values >= 0) & (values <= 1))),
        "samples must lie in [0, 1]",
    )
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    # equal-width bins, so every bin has the nominal width 1/bins
    densities = counts * bins / values.size
    return PdfEstimate(
        bin_edges=tuple(edges.tolist()),
        densities=tuple(densities.tolist()),
        n_samples=values.size,
        metadata=metadata or PdfMetadata(),
    )


def mode_of(pdf: PdfEstimate) -> float:
    """
    Midpoint of the bin with the largest density.
    Of several equally dense bins, the lowest one wins.
    """
    return float(pdf.bin_midpoints[int(np.argmax(pdf.densities))])


def histogram_entropy(pdf: PdfEstimate) -> float:
    """
    Shannon entropy of the bin probabilities, normalized by ``log(bins)`` so that a uniform histogram has entropy 1
    and a single occupied bin has entropy 0
    """
    p = np.asarray(pdf.densities) * pdf.bin_widths
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)) / math.log(len(pdf.densities)))


@dataclass(frozen=True)
class CampaignSamples:
    """
    Raw result of a campaign
    """

    values: NDArray[np.float64]
    "The time averaged measure of every sample, ordered by sample index."

    trivial_count: int


class _ShardTask(NamedTuple):
    index: int
    start: int
    count: int
    ensemble: Ensemble
    theta: float
    measure: CampaignMeasure
    seed: int
    stream_id: int
    nodes: int
    tolerances: Tolerances


def _count_trivial(
    initial: Amplitudes, final: Amplitudes, tolerances: Tolerances
) -> int:
    # a spectator needs a pure marginal, i.e. a vanishing bipartition concurrence, at both ends
    threshold = 2 * tolerances.spectator_purity
    candidates = np.zeros(initial.shape[0], dtype=bool)
    for qubit in Qubit:
        candidates |= (bipartition_concurrence_sq_batch(initial, qubit, tolerances) < threshold) & (
            bipartition_concurrence_sq_batch(final, qubit, tolerances) < threshold
        )
    overlaps = np.abs(np.sum(np.conj(initial) * final, axis=-1))
    candidates |= overlaps > 1 - tolerances.identical
    return sum(
        classify_states(
            PureState3Q(initial[i], tolerances), PureState3Q(final[i], tolerances), tolerances
        ).is_trivial
        for i in np.flatnonzero(candidates)
    )


def _evaluate_shard(task: _ShardTask) -> Tuple[int, NDArray[np.float64], int]:
    logger.debug("starting shard %d with %d samples", task.index, task.count)
    rng = RngStream(seed=task.seed, stream_id=task.stream_id).generator()
    initial, final = sample_pairs(task.ensemble, task.theta, task.count, rng, task.tolerances)
    measure = task.measure.measure
    try:
        values = time_average_batch(
            initial, final, task.theta, measure, task.nodes, task.tolerances
        )
    except BrachistochroneError as batch_error:
        # find the offending sample
        for offset in range(task.count):
            try:
                pair = EvolutionPair(
                    PureState3Q(initial[offset], task.tolerances),
                    PureState3Q(final[offset], task.tolerances),
                    task.theta,
                    task.tolerances,
                )
                time_average(pair, measure, task.nodes, task.tolerances)
            except BrachistochroneError as e:
                raise SampleError(task.start + offset, e) from e
        raise SampleError(task.start, batch_error) from batch_error
    trivial = _count_trivial(initial, final, task.tolerances)
    logger.debug("finished shard %d", task.index)
    return task.index, values, trivial


def _shard_tasks(
    ensemble: Ensemble,
    theta: float,
    n: int,
    measure: CampaignMeasure,
    rng: RngStream,
    nodes: int,
    shard_size: int,
    tolerances: Tolerances,
) -> Iterable[_ShardTask]:
    for index, start in enumerate(range(0, n, shard_size)):
        yield _ShardTask(
            index=index,
            start=start,
            count=min(shard_size, n - start),
            ensemble=ensemble,
            theta=theta,
            measure=measure,
            seed=rng.seed,
            stream_id=rng.stream_id + index,
            nodes=nodes,
            tolerances=tolerances,
        )


def run_campaign_samples(
    ensemble: Ensemble,
    theta: float,
    n: int,
    measure: CampaignMeasure,
    rng: RngStream,
    workers: int = 1,
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    shard_size: int = CAMPAIGN_DEFAULTS.shard_size,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CampaignSamples:
    """
    Draw `n` evolution pairs and compute the time average of `measure` along each of them.

    :param rng: Shard ``k`` uses the stream ``rng.stream_id + k``.
    :param workers: Number of worker processes. With a single worker everything runs in the calling process.
    :raises InvalidInputError: If `n` is below 100 or any other parameter is out of range.
    :raises SampleError: If evaluating a sample failed, naming the offending sample index.
    """
    ensemble = Ensemble(ensemble)
    measure = CampaignMeasure(measure)
    require(n >= MIN_SAMPLES, f"a campaign needs at least {MIN_SAMPLES} samples but got {n}")
    require(workers >= 1, f"at least one worker is required but got {workers}")
    require(shard_size >= 1, f"shards must contain at least one sample but got {shard_size}")
    require(0 < theta <= math.pi, f"separation angle must be in (0, π] but is {theta!r}")

    tasks = list(_shard_tasks(ensemble, theta, n, measure, rng, nodes, shard_size, tolerances))
    logger.info(
        "running campaign ensemble=%s θ=%s n=%d measure=%s with %d shards on %d workers",
        ensemble.value,
        theta,
        n,
        measure.value,
        len(tasks),
        workers,
    )
    results: List[Tuple[int, NDArray[np.float64], int]]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_evaluate_shard, tasks))
    else:
        results = [_evaluate_shard(task) for task in tasks]

    results.sort(key=lambda result: result[0])
    values = np.concatenate([result[1] for result in results])
    trivial_count = sum(result[2] for result in results)
    if trivial_count > 0:
        logger.warning("%d of %d sampled evolutions are trivial", trivial_count, n)
    logger.info("campaign finished")
    return CampaignSamples(values=values, trivial_count=trivial_count)


def run_campaign(
    ensemble: Ensemble,
    theta: float,
    n: int,
    measure: CampaignMeasure,
    rng: RngStream,
    workers: int = 1,
    bins: int = CAMPAIGN_DEFAULTS.bins,
    nodes: int = CAMPAIGN_DEFAULTS.nodes,
    shard_size: int = CAMPAIGN_DEFAULTS.shard_size,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PdfEstimate:
    """
    Run a campaign (see :func:`run_campaign_samples`) and estimate the density of its results.

    The estimate is bit-identical for any number of workers as long as `rng` and `shard_size` stay the same.
    """
    require(bins >= MIN_BINS, f"at least {MIN_BINS} bins are required but got {bins}")
    result = run_campaign_samples(
        ensemble, theta, n, measure, rng, workers, nodes, shard_size, tolerances
    )
    metadata = PdfMetadata(
        ensemble=Ensemble(ensemble),
        measure=CampaignMeasure(measure),
        theta=theta,
        seed=rng.seed,
        stream_base=rng.stream_id,
        nodes=nodes,
        shard_size=shard_size,
        trivial_count=result.trivial_count,
    )
    return estimate_pdf(result.values, bins, metadata)
