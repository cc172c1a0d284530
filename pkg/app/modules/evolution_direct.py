"""
Direct Evolution Backend
========================
Reference backend: evolves the full 2N x 2N density matrix
rho(t+1) = sum_n U (I (x) A_n) rho(t) (I (x) A_n)^dagger U^dagger
with dense matrices. Slow, but independent of the momentum decomposition,
so it serves as the oracle for the Fourier backend.

Basis ordering (shared by every module): |x> (x) |j> -> index 2x + (j-1).
"""

from typing import Iterator, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import WalkDomainError, DimensionError, InvalidDensityError
from app.core.logger import logger
from app.models.walk import WalkParams, DensityReport
from app.modules.walk_core import coin_operator, kraus_operators, coin_projector, CoinBlock

DensityMatrix = np.ndarray
EvolutionOperator = np.ndarray


def shift_operator(n_sites: int) -> EvolutionOperator:
    """Conditional shift: |x,1> -> |x+1 mod N, 1>, |x,2> -> |x-1 mod N, 2>. A permutation matrix."""
    if n_sites < 2:
        raise WalkDomainError(f"n_sites must be >= 2, got {n_sites!r}")
    dim = 2 * n_sites
    shift = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(n_sites):
        shift[2 * ((x + 1) % n_sites), 2 * x] = 1.0
        shift[2 * ((x - 1) % n_sites) + 1, 2 * x + 1] = 1.0
    return shift


def evolution_operator(params: WalkParams) -> EvolutionOperator:
    """U = S (I_N (x) U_c(beta)). The decoherence rate plays no role here."""
    coin = np.kron(np.eye(params.n_sites, dtype=np.complex128), coin_operator(params.coin_angle))
    return shift_operator(params.n_sites) @ coin


def initial_density(params: WalkParams) -> DensityMatrix:
    """rho(0) = |0><0| (x) |psi0><psi0|."""
    origin = np.zeros((params.n_sites, params.n_sites), dtype=np.complex128)
    origin[0, 0] = 1.0
    return np.kron(origin, coin_projector(params.coin_state))


def step(rho: DensityMatrix, u: EvolutionOperator, kraus: Sequence[CoinBlock]) -> DensityMatrix:
    """One decoherent step; each Kraus operator acts on the coin factor only."""
    rho = np.asarray(rho, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2:
        raise DimensionError(f"density matrix must be square with even dimension, got {rho.shape}")
    if u.shape != rho.shape:
        raise DimensionError(f"evolution operator shape {u.shape} does not match density {rho.shape}")
    n_sites = rho.shape[0] // 2
    identity = np.eye(n_sites, dtype=np.complex128)

    out = np.zeros_like(rho)
    for op in kraus:
        lifted = np.kron(identity, op)
        out += lifted @ rho @ lifted.conj().T
    return u @ out @ u.conj().T


def iter_density(params: WalkParams, t_max: int) -> Iterator[DensityMatrix]:
    """Yields rho(0), rho(1), ..., rho(t_max)."""
    if t_max < 0:
        raise WalkDomainError(f"t must be nonnegative, got {t_max!r}")
    u = evolution_operator(params)
    kraus = kraus_operators(params.decoherence_rate)
    rho = initial_density(params)
    yield rho
    for _ in range(t_max):
        rho = step(rho, u, kraus)
        yield rho


def evolve(params: WalkParams, t: int) -> DensityMatrix:
    rho = None
    for rho in iter_density(params, t):
        pass
    logger.debug(f"Direct evolution finished: N={params.n_sites}, p={params.decoherence_rate}, t={t}")
    return rho


def position_distribution(rho: DensityMatrix) -> np.ndarray:
    """P(x) = rho[2x, 2x] + rho[2x+1, 2x+1]."""
    diag = np.real(np.diagonal(np.asarray(rho)))
    if diag.size % 2:
        raise DimensionError(f"density matrix dimension must be even, got {diag.size}")
    return diag[0::2] + diag[1::2]


def check_density_matrix(rho: DensityMatrix, tol: float = None, psd_tol: float = None,
                         raise_on_error: bool = False) -> DensityReport:
    """Hermiticity, unit trace and positivity of a density matrix."""
    tol = settings.DENSITY_TOL if tol is None else tol
    psd_tol = settings.PSD_TOL if psd_tol is None else psd_tol
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got {rho.shape}")

    hermitian_residual = float(np.linalg.norm(rho - rho.conj().T))
    trace_error = float(abs(np.trace(rho) - 1.0))
    min_eigenvalue = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)[0])
    report = DensityReport(
        hermitian_residual=hermitian_residual,
        trace_error=trace_error,
        min_eigenvalue=min_eigenvalue,
        is_valid=hermitian_residual < tol and trace_error < tol and min_eigenvalue >= -psd_tol,
    )
    if raise_on_error and not report.is_valid:
        raise InvalidDensityError(
            f"invalid density matrix: hermitian_residual={hermitian_residual:.3e}, "
            f"trace_error={trace_error:.3e}, min_eigenvalue={min_eigenvalue:.3e}"
        )
    return report
