import math
from typing import List, Optional, Sequence, Tuple, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings

Backend = Literal["direct", "fourier", "both"]
OutputFormat = Literal["csv", "json"]

# Tolerance on |psi0| = 1
COIN_NORM_TOL = 1e-12


class WalkParams(BaseModel):
    """
    Parameters of one walk on the N-cycle: cycle length, decoherence rate p,
    coin angle beta and the initial coin state psi0 (launched from position 0).

    psi0 is stored as (a_re, a_im, b_re, b_im) so the model stays hashable and
    serialisable; `coin_state` gives the complex 2-vector.
    """
    model_config = ConfigDict(frozen=True)

    n_sites: int = Field(..., ge=2, description="Cycle length N")
    decoherence_rate: float = Field(..., ge=0.0, le=1.0, description="Probability p of a coin measurement per step")
    coin_angle: float = Field(settings.DEFAULT_COIN_ANGLE, gt=0.0, lt=math.pi / 2, description="Coin angle beta")
    initial_coin: Tuple[float, float, float, float] = Field((1.0, 0.0, 0.0, 0.0), description="psi0 as (a_re, a_im, b_re, b_im)")

    @field_validator("initial_coin")
    @classmethod
    def _unit_norm(cls, value: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
        norm = math.sqrt(sum(c * c for c in value))
        if abs(norm - 1.0) > COIN_NORM_TOL:
            raise ValueError(f"initial_coin must have unit norm, got {norm!r}")
        return value

    @property
    def coin_state(self) -> np.ndarray:
        a_re, a_im, b_re, b_im = self.initial_coin
        return np.array([a_re + 1j * a_im, b_re + 1j * b_im], dtype=np.complex128)

    @classmethod
    def from_coin_vector(cls, n_sites: int, decoherence_rate: float, coin_angle: float,
                         coin: Sequence[complex], normalize: bool = False) -> "WalkParams":
        """Build params from a complex coin vector, optionally normalising it first."""
        vec = np.asarray(coin, dtype=np.complex128).reshape(2)
        if normalize:
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ValueError("initial coin vector is zero")
            vec = vec / norm
        return cls(
            n_sites=n_sites,
            decoherence_rate=decoherence_rate,
            coin_angle=coin_angle,
            initial_coin=(float(vec[0].real), float(vec[0].imag), float(vec[1].real), float(vec[1].imag)),
        )


class ExperimentSpec(BaseModel):
    """One trajectory / decoherence-time experiment."""
    model_config = ConfigDict(frozen=True)

    params: WalkParams
    t_max: int = Field(settings.DEFAULT_T_MAX, ge=0)
    record_every: int = Field(settings.DEFAULT_RECORD_EVERY, ge=1)
    backend: Backend = "fourier"
    epsilon: float = Field(settings.DEFAULT_EPSILON, gt=0.0)
    output_path: Optional[str] = settings.DEFAULT_OUTPUT_PATH
    output_format: OutputFormat = "csv"

    def recorded_times(self) -> List[int]:
        """Times at which a row is recorded; t_max is always included."""
        times = list(range(0, self.t_max + 1, self.record_every))
        if times[-1] != self.t_max:
            times.append(self.t_max)
        return times


class EntropyRecord(BaseModel):
    """Entropies (bits) of the joint state and both marginals at one time."""
    time: int
    s_total: float
    s_coin: float
    s_walker: float
    mutual_info: float
    purity: Optional[float] = None

    @model_validator(mode="after")
    def _mutual_info_identity(self) -> "EntropyRecord":
        expected = self.s_coin + self.s_walker - self.s_total
        if abs(self.mutual_info - expected) > 1e-12:
            raise ValueError(f"mutual_info {self.mutual_info!r} != s_coin + s_walker - s_total ({expected!r})")
        return self


class TrajectoryRow(BaseModel):
    t: int
    probabilities: List[float]
    entropy: EntropyRecord
    trace_distance: float
    backend_discrepancy: Optional[float] = None


class DecoherenceTimeResult(BaseModel):
    """
    D(eps): the smallest recorded tau after which every recorded distance to the
    stationary operator stays below eps. `d_epsilon` is None when not reached.
    """
    epsilon: float
    t_max: int
    d_epsilon: Optional[int] = None
    distance_curve: List[Tuple[int, float]] = Field(default_factory=list)
    spectral_estimate: Optional[int] = None

    @property
    def reached(self) -> bool:
        return self.d_epsilon is not None


class DensityReport(BaseModel):
    hermitian_residual: float
    trace_error: float
    min_eigenvalue: float
    is_valid: bool


class UnitalCheck(BaseModel):
    is_unital: bool
    residual: float


class ContractionReport(BaseModel):
    trials: int
    max_ratio: float
    min_ratio: float
    is_contraction: bool
    is_isometry: bool


class SweepConfig(BaseModel):
    """Grid axes plus the per-point experiment settings of a sweep."""
    n_values: List[int] = Field(..., min_length=1)
    p_values: List[float] = Field(..., min_length=1)
    beta_values: List[float] = Field(default_factory=lambda: [settings.DEFAULT_COIN_ANGLE], min_length=1)
    initial_coin: Tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)
    t_max: int = Field(settings.DEFAULT_T_MAX, ge=0)
    record_every: int = Field(settings.DEFAULT_RECORD_EVERY, ge=1)
    backend: Backend = "fourier"
    epsilon: float = Field(settings.DEFAULT_EPSILON, gt=0.0)
    output_path: Optional[str] = None
    output_format: OutputFormat = "csv"
    workers: int = Field(settings.SWEEP_WORKERS, ge=1)


class SweepRow(BaseModel):
    n_sites: int
    decoherence_rate: float
    coin_angle: float
    s_total: Optional[float] = None
    s_coin: Optional[float] = None
    s_walker: Optional[float] = None
    mutual_info: Optional[float] = None
    s_total_limit_gap: Optional[float] = None
    d_epsilon: Optional[int] = None
    spectral_gap_min: Optional[float] = None
    relaxation_gap_min: Optional[float] = None
    error: Optional[str] = None
