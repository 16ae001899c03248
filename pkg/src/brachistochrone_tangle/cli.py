"""
Command line interface.

Every subcommand writes one table (see :mod:`brachistochrone_tangle.serialization`) whose metadata is sufficient to
reproduce it. Exit codes are 0 on success, 1 if a verification or computation failed, 2 on I/O errors and 3 if the
input could not be parsed or is out of range.
"""
import argparse
import enum
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence, Tuple

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field, field_validator

from brachistochrone_tangle import __version__
from brachistochrone_tangle.casestudies import alpha_grid, alpha_scan
from brachistochrone_tangle.entanglement import pair_concurrence_sq, tangle_decomposition
from brachistochrone_tangle.evolution import (
    EvolutionPair,
    EvolutionParams,
    TrivialKind,
    classify_states,
    duration,
    geodesic_state,
)
from brachistochrone_tangle.exceptions import BrachistochroneError, InvalidInputError
from brachistochrone_tangle.sampling import Ensemble, RngStream
from brachistochrone_tangle.serialization import OutputFormat, Table, write_table
from brachistochrone_tangle.settings import CAMPAIGN_DEFAULTS
from brachistochrone_tangle.states import Qubit, format_state_text, parse_state_text
from brachistochrone_tangle.statistics import CampaignMeasure, mode_of, run_campaign
from brachistochrone_tangle.verification import run_suites

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO_ERROR = 2
EXIT_INPUT_ERROR = 3

DEFAULT_THETA_HALF = (0.125, 0.25, 0.375, 0.5)
"Default θ/2 values in multiples of π."


class Command(str, enum.Enum):
    SCAN_ALPHA = "scan-alpha"
    PDF = "pdf"
    EVOLVE = "evolve"
    VERIFY = "verify"


class PdfMeasure(str, enum.Enum):
    TAU = "tau"
    C2 = "c2"
    BOTH = "both"

    @property
    def campaign_measures(self) -> List[CampaignMeasure]:
        if self == PdfMeasure.BOTH:
            return [CampaignMeasure.TAU, CampaignMeasure.C2]
        return [CampaignMeasure(self.value)]


class RunConfig(BaseModel):
    """
    Validated configuration of a single command line invocation
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    theta_half: List[float] = Field(default=list(DEFAULT_THETA_HALF), min_length=1)
    "Half separation angles in multiples of π, each in (0, 1/2]."

    ensemble: Ensemble = Ensemble.SYMMETRIC
    measure: PdfMeasure = PdfMeasure.BOTH
    samples: int = Field(default=CAMPAIGN_DEFAULTS.samples, ge=100)
    bins: int = Field(default=CAMPAIGN_DEFAULTS.bins, ge=10)
    nodes: int = Field(default=CAMPAIGN_DEFAULTS.nodes, ge=16)
    seed: int = Field(default=CAMPAIGN_DEFAULTS.seed, ge=0, lt=2**64)
    stream_base: int = Field(default=CAMPAIGN_DEFAULTS.stream_base, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    shard_size: int = Field(default=CAMPAIGN_DEFAULTS.shard_size, ge=1)
    alpha_points: int = Field(default=CAMPAIGN_DEFAULTS.alpha_points, ge=2)
    points: int = Field(default=CAMPAIGN_DEFAULTS.evolve_points, ge=2)
    omega: float = Field(default=1.0, gt=0)
    quick: bool = False
    initial: Optional[str] = None
    final: Optional[str] = None
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV

    @field_validator("theta_half")
    @classmethod
    def _check_theta_half(cls, value: List[float]) -> List[float]:
        for h in value:
            if not 0 < h <= 0.5:
                raise ValueError(f"θ/2 must be in (0, 1/2] multiples of π but is {h!r}")
        return value

    @property
    def thetas(self) -> List[float]:
        """
        The separation angles θ in radians
        """
        return [2 * math.pi * h for h in self.theta_half]

    def provenance(self) -> Dict[str, Any]:
        """
        Metadata common to every output file. Sample and bin counts are None for commands that do not sample.
        """
        return {
            "command": self.command.value,
            "version": __version__,
            "seed": self.seed,
            "stream_base": self.stream_base,
            "rng": RngStream.ALGORITHM,
            "nodes": self.nodes,
            "n": self.samples if self.command == Command.PDF else None,
            "bins": self.bins if self.command == Command.PDF else None,
        }


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # report usage errors through the exit code of main() instead of exiting with argparse's status 2
    def error(self, message: str) -> NoReturn:
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="brachistochrone-tangle",
        description="Entanglement along time-optimal three-qubit evolutions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log more (repeat for debug output)"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")

    common = _ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="output file (default: standard output)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--nodes", type=int, help="Gauss-Legendre node count")

    campaign = _ArgumentParser(add_help=False)
    campaign.add_argument("--seed", type=int)
    campaign.add_argument("--stream-base", dest="stream_base", type=int)

    subparsers = parser.add_subparsers(dest="command", required=True)

    scan = subparsers.add_parser(
        Command.SCAN_ALPHA.value, parents=[common], help="time averaged three-tangle over α"
    )
    scan.add_argument("--alpha-points", dest="alpha_points", type=int)

    pdf = subparsers.add_parser(
        Command.PDF.value, parents=[common, campaign], help="densities of time averaged entanglement"
    )
    pdf.add_argument("--theta-half", dest="theta_half", type=float, nargs="+", help="θ/2 in multiples of π")
    pdf.add_argument("--ensemble", choices=[e.value for e in Ensemble])
    pdf.add_argument("--measure", choices=[m.value for m in PdfMeasure])
    pdf.add_argument("--samples", type=int)
    pdf.add_argument("--bins", type=int)
    pdf.add_argument("--workers", type=int)
    pdf.add_argument("--shard-size", dest="shard_size", type=int)

    evolve = subparsers.add_parser(
        Command.EVOLVE.value, parents=[common], help="entanglement along a single evolution"
    )
    evolve.add_argument("--initial", required=True, help="ghz, w, wtilde or 8 're,im' pairs")
    evolve.add_argument("--final", required=True, help="ghz, w, wtilde or 8 're,im' pairs")
    evolve.add_argument("--points", type=int, help="size of the ξ grid")
    evolve.add_argument("--omega", type=float, help="energy bound ω")

    verify = subparsers.add_parser(
        Command.VERIFY.value, parents=[common, campaign], help="run the self-check suites"
    )
    verify.add_argument("--quick", action="store_true", default=None, help="use small sample sizes")

    return parser


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def cmd_scan_alpha(config: RunConfig) -> Tuple[Table, int]:
    alphas = alpha_grid(config.alpha_points)
    rows = alpha_scan(alphas, config.nodes)
    metadata = config.provenance()
    metadata["alpha_points"] = config.alpha_points
    return Table.build(metadata, ["alpha", "avg_tangle"], rows), EXIT_OK


def cmd_pdf(config: RunConfig) -> Tuple[Table, int]:
    rng = RngStream(seed=config.seed, stream_id=config.stream_base)
    rows = []
    metadata = config.provenance()
    metadata.update(
        ensemble=config.ensemble.value,
        shard_size=config.shard_size,
    )
    trivial_count = 0
    for theta_half, theta in zip(config.theta_half, config.thetas):
        for measure in config.measure.campaign_measures:
            pdf = run_campaign(
                config.ensemble,
                theta,
                config.samples,
                measure,
                rng,
                workers=config.workers,
                bins=config.bins,
                nodes=config.nodes,
                shard_size=config.shard_size,
            )
            trivial_count += pdf.metadata.trivial_count
            metadata[f"mode[{theta_half:g},{measure.value}]"] = mode_of(pdf)
            for left, right, density in zip(pdf.bin_edges[:-1], pdf.bin_edges[1:], pdf.densities):
                rows.append((theta_half, measure.value, left, right, density))
    metadata["trivial_count"] = trivial_count
    return (
        Table.build(metadata, ["theta_half", "measure", "bin_left", "bin_right", "density"], rows),
        EXIT_OK,
    )


def cmd_evolve(config: RunConfig) -> Tuple[Table, int]:
    initial = parse_state_text(config.initial or "", field="initial")
    final = parse_state_text(config.final or "", field="final")
    verdict = classify_states(initial, final)
    metadata = config.provenance()
    metadata.update(
        initial=format_state_text(initial),
        final=format_state_text(final),
        verdict=str(verdict),
    )

    rows = []
    if verdict.kind != TrivialKind.IDENTICAL:
        pair = EvolutionPair.from_states(initial, final)
        metadata.update(
            theta=pair.theta,
            omega=config.omega,
            duration=duration(pair, EvolutionParams(omega=config.omega, nodes=config.nodes)),
        )
        for xi in np.linspace(0.0, pair.theta / 2, config.points):
            state = geodesic_state(pair, float(xi))
            decomposition = tangle_decomposition(state, Qubit.A)
            rows.append(
                (
                    float(xi),
                    decomposition.tau,
                    decomposition.c2_bipartition,
                    decomposition.c2_ab,
                    decomposition.c2_ac,
                    pair_concurrence_sq(state, (Qubit.B, Qubit.C)),
                    decomposition.residual,
                )
            )
    columns = ["xi", "tau", "c2_a_bc", "c2_ab", "c2_ac", "c2_bc", "monogamy_residual"]
    return Table.build(metadata, columns, rows), EXIT_OK


def cmd_verify(config: RunConfig) -> Tuple[Table, int]:
    results = run_suites(
        seed=config.seed, quick=config.quick, nodes=config.nodes, stream_base=config.stream_base
    )
    metadata = config.provenance()
    metadata["quick"] = config.quick
    rows = [
        (result.name, "pass" if result.passed else "fail", result.worst_residual, result.threshold, result.detail)
        for result in results
    ]
    code = EXIT_OK if all(result.passed for result in results) else EXIT_FAILURE
    return Table.build(metadata, ["suite", "status", "worst_residual", "threshold", "detail"], rows), code


COMMANDS = {
    Command.SCAN_ALPHA: cmd_scan_alpha,
    Command.PDF: cmd_pdf,
    Command.EVOLVE: cmd_evolve,
    Command.VERIFY: cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface and return its exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_INPUT_ERROR

    _configure_logging(args.verbose, args.quiet)
    options = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in ("verbose", "quiet")
    }
    try:
        config = RunConfig.model_validate(options)
    except pydantic.ValidationError as e:
        print(f"invalid arguments: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        table, code = COMMANDS[config.command](config)
    except InvalidInputError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except BrachistochroneError as e:
        logger.error("computation failed", exc_info=True)
        print(f"computation failed: {e}", file=sys.stderr)
        return EXIT_FAILURE

    try:
        write_table(config.out if config.out is not None else sys.stdout, table, config.format)
    except OSError as e:
        print(f"cannot write output: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    return code
