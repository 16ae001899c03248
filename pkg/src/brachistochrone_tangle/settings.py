"""
Configuration records which bundle every tolerance and default of this library in one place
"""
from pydantic import BaseModel, ConfigDict, Field


class Tolerances(BaseModel):
    """
    Numerical tolerances used by the operations of this library.

    All operations accept an instance of this model and fall back to :data:`DEFAULT_TOLERANCES` so that a
    reproducibility audit has exactly one knob to turn.
    """

    model_config = ConfigDict(frozen=True)

    unitarity: float = Field(default=1e-12, gt=0)
    "Maximum entry of ``Q†Q - I`` for every unitary produced by this library."

    normalization: float = Field(default=1e-10, gt=0)
    "Maximum deviation of a state norm from 1."

    normalize_floor: float = Field(default=1e-14, gt=0)
    "Vectors with a norm below this value cannot be normalized."

    hermiticity: float = Field(default=1e-12, gt=0)
    "Maximum entry of ``ρ - ρ†`` for a density matrix."

    trace: float = Field(default=1e-10, gt=0)
    "Maximum deviation of a density matrix trace from 1."

    psd: float = Field(default=1e-10, gt=0)
    "Density matrix eigenvalues may be negative by at most this amount."

    imag_dust: float = Field(default=1e-10, gt=0)
    "Imaginary parts of provably real eigenvalues are discarded below this magnitude."

    eigenvalue_dust: float = Field(default=1e-10, gt=0)
    "Negative eigenvalues of the spin-flipped product above ``-eigenvalue_dust`` are clipped to 0."

    spectral_floor: float = Field(default=1e-14, gt=0)
    "Eigenvalues of the spin-flipped product below this fraction of the largest one are structural zeros."

    overlap: float = Field(default=1e-10, gt=0)
    "Maximum mismatch between a pair overlap and ``cos(θ/2)``."

    monogamy: float = Field(default=1e-8, gt=0)
    "Maximum residual of ``C²_A(BC) - C²_AB - C²_AC - τ``."

    measure_range: float = Field(default=1e-8, gt=0)
    "Squared measures may leave [0, 1] by this amount before they are treated as a bug."

    identical: float = Field(default=1e-10, gt=0)
    "Two states whose overlap magnitude exceeds ``1 - identical`` are the same state."

    spectator_purity: float = Field(default=1e-10, gt=0)
    "A single-qubit marginal is pure when its purity exceeds ``1 - spectator_purity``."

    real_path: float = Field(default=1e-9, gt=0)
    """
    The hyperdeterminant along an evolution counts as real up to a constant phase when its imaginary part stays below
    this fraction of its largest magnitude. Its sign changes then mark kinks of the three-tangle.
    """

    histogram_integral: float = Field(default=1e-9, gt=0)
    "Maximum deviation of a density estimate's integral from 1."

    eig_max_sweeps: int = Field(default=500, ge=1)
    "Number of QR sweeps allowed per eigenvalue before the iteration is declared divergent."


DEFAULT_TOLERANCES = Tolerances()


class CampaignDefaults(BaseModel):
    """
    Defaults for Monte Carlo campaigns and figure reproduction.

    None of these are prescribed by the underlying physics; they produce smooth curves at interactive runtimes.
    """

    model_config = ConfigDict(frozen=True)

    bins: int = 50
    "Number of equal-width histogram bins on [0, 1]."

    samples: int = 100_000
    "Number of sampled evolution pairs per campaign."

    nodes: int = 64
    "Gauss-Legendre node count used for time averages."

    shard_size: int = 1_000
    "Number of consecutive samples that share one random stream."

    alpha_points: int = 101
    "Size of the uniform α grid on [0, π/2]."

    evolve_points: int = 101
    "Size of the uniform ξ grid on [0, θ/2] used when inspecting a single evolution."

    seed: int = 20091106
    "Seed used when none is given."

    stream_base: int = 0
    "Stream id of the first shard."


CAMPAIGN_DEFAULTS = CampaignDefaults()
