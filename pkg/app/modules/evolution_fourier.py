"""
Fourier Evolution Backend
=========================
Fast backend. With |k> = N^{-1/2} sum_x exp(2 pi i x k/N) |x>, the density operator splits into
rho(t) = (1/N) sum_{k,k'} |k><k'| (x) A(t,k,k'), and each 2x2 block evolves independently
under the 4x4 superoperator L_{kk'} acting on its Pauli coefficients:

    A(t+1,k,k') = sum_n U_c(k) A_n A(t,k,k') A_n^dagger U_c(k')^dagger.

All (k,k') pairs are advanced together as one stacked (N, N, 4, 4) x (N, N, 4) product,
so the summation order is fixed and runs are reproducible.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import WalkDomainError, DimensionError
from app.core.logger import logger
from app.models.walk import WalkParams, ContractionReport
from app.modules.walk_core import (
    PAULI_BASIS,
    coin_operator_fourier,
    coin_projector,
    from_pauli,
    kraus_operators,
    to_pauli,
    validate_momentum,
)
from app.modules.evolution_direct import DensityMatrix


@dataclass(frozen=True)
class SuperOp:
    """L_{kk'} in the Pauli basis (sigma0, sigmax, sigmay, sigmaz)."""
    k: int
    k_prime: int
    matrix: np.ndarray


@dataclass(frozen=True)
class BlockField:
    """A(t,k,k') for every momentum pair; blocks has shape (N, N, 2, 2) indexed [k, k', j, l]."""
    blocks: np.ndarray
    time: int

    @property
    def n_sites(self) -> int:
        return self.blocks.shape[0]


def _superoperator_entries(k, k_prime, n_sites: int, params: WalkParams) -> np.ndarray:
    """Closed form of L_{kk'}; k and k_prime may be integer arrays of equal shape."""
    q = 1.0 - params.decoherence_rate
    cos2b = math.cos(2.0 * params.coin_angle)
    sin2b = math.sin(2.0 * params.coin_angle)
    k = np.asarray(k, dtype=np.float64)
    k_prime = np.asarray(k_prime, dtype=np.float64)
    c_plus = np.cos(2.0 * np.pi * (k_prime + k) / n_sites)
    s_plus = np.sin(2.0 * np.pi * (k_prime + k) / n_sites)
    c_minus = np.cos(2.0 * np.pi * (k_prime - k) / n_sites)
    s_minus = np.sin(2.0 * np.pi * (k_prime - k) / n_sites)
    zero = np.zeros_like(c_plus)

    rows = [
        [c_minus, 1j * q * s_minus * sin2b, zero, 1j * s_minus * cos2b],
        [zero, -q * c_plus * cos2b, q * s_plus, c_plus * sin2b],
        [zero, -q * s_plus * cos2b, -q * c_plus, s_plus * sin2b],
        [1j * s_minus, q * c_minus * sin2b, zero, c_minus * cos2b],
    ]
    matrix = np.array(rows, dtype=np.complex128)
    # (4, 4, ...) -> (..., 4, 4)
    return np.moveaxis(matrix, (0, 1), (-2, -1))


def superoperator_matrix(k: int, k_prime: int, params: WalkParams) -> SuperOp:
    """
    4x4 matrix of L_{kk'} with q = 1 - p, c+- = cos 2 pi (k' +- k)/N, s+- = sin 2 pi (k' +- k)/N.
    Real except for the i s- entries of the first and last rows.
    """
    n = params.n_sites
    validate_momentum(k, n)
    validate_momentum(k_prime, n)
    return SuperOp(k=int(k), k_prime=int(k_prime), matrix=_superoperator_entries(k, k_prime, n, params))


def superoperator_by_action(k: int, k_prime: int, params: WalkParams) -> np.ndarray:
    """
    L_{kk'} read off column by column from its definition
    B -> sum_n U_c(k) A_n B A_n^dagger U_c(k')^dagger applied to the Pauli basis.
    """
    left = coin_operator_fourier(params.coin_angle, k, params.n_sites)
    right = coin_operator_fourier(params.coin_angle, k_prime, params.n_sites).conj().T
    kraus = kraus_operators(params.decoherence_rate)
    columns = []
    for basis in PAULI_BASIS:
        image = sum(left @ op @ basis @ op.conj().T @ right for op in kraus)
        columns.append(to_pauli(image))
    return np.stack(columns, axis=1)


def superoperator_stack(params: WalkParams) -> np.ndarray:
    """L_{kk'} for all pairs, shape (N, N, 4, 4) indexed [k, k']."""
    n = params.n_sites
    k, k_prime = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return _superoperator_entries(k, k_prime, n, params)


def initial_block_field(params: WalkParams) -> BlockField:
    """Every block starts as |psi0><psi0|."""
    n = params.n_sites
    blocks = np.broadcast_to(coin_projector(params.coin_state), (n, n, 2, 2)).copy()
    return BlockField(blocks=blocks, time=0)


def iter_block_fields(params: WalkParams, t_max: int) -> Iterator[BlockField]:
    """Yields the block field at t = 0, 1, ..., t_max by repeated matrix-vector products."""
    if t_max < 0:
        raise WalkDomainError(f"t must be nonnegative, got {t_max!r}")
    stack = superoperator_stack(params)
    field = initial_block_field(params)
    coeffs = to_pauli(field.blocks)
    yield field
    for t in range(1, t_max + 1):
        coeffs = np.einsum("abij,abj->abi", stack, coeffs)
        yield BlockField(blocks=from_pauli(coeffs), time=t)


def evolve_blocks(params: WalkParams, t: int) -> BlockField:
    field = None
    for field in iter_block_fields(params, t):
        pass
    logger.debug(f"Fourier block evolution finished: N={params.n_sites}, p={params.decoherence_rate}, t={t}")
    return field


def _fourier_kernel(n_sites: int) -> np.ndarray:
    """F[x, k] = exp(2 pi i x k / N)."""
    x = np.arange(n_sites)
    return np.exp(2j * np.pi * np.outer(x, x) / n_sites)


def reconstruct_density(field: BlockField) -> DensityMatrix:
    """
    P_{xyjl} = (1/N^2) sum_{k,k'} exp(2 pi i (x k - y k')/N) A_jl(t,k,k'),
    laid out at [2x + j, 2y + l] and symmetrised to absorb rounding asymmetry.
    """
    n = field.n_sites
    kernel = _fourier_kernel(n)
    entries = np.einsum("xa,abjl,yb->xjyl", kernel, field.blocks, kernel.conj()) / (n * n)
    rho = entries.reshape(2 * n, 2 * n)
    return (rho + rho.conj().T) / 2.0


def position_distribution_fourier(field: BlockField) -> np.ndarray:
    """P(x) = (1/N^2) sum_{k,k'} exp(2 pi i x (k - k')/N) [A11 + A22](t,k,k')."""
    n = field.n_sites
    kernel = _fourier_kernel(n)
    traces = field.blocks[..., 0, 0] + field.blocks[..., 1, 1]
    values = np.einsum("xa,ab,xb->x", kernel, traces, kernel.conj()) / (n * n)
    return np.real(values)


def block_field_residuals(field: BlockField) -> Tuple[float, float]:
    """
    (Hermitian pairing residual, total probability error):
    max |A(k,k') - A(k',k)^dagger| and |(1/N) sum_k tr A(k,k) - 1|.
    """
    blocks = field.blocks
    paired = np.conj(np.transpose(blocks, (1, 0, 3, 2)))
    pairing = float(np.max(np.abs(blocks - paired)))
    diagonal = np.einsum("kkjj->", blocks)
    probability = float(abs(diagonal / field.n_sites - 1.0))
    return pairing, probability


def limiting_block(k: int, k_prime: int, n_sites: int, t: int) -> np.ndarray:
    """Long-time limit of A(t,k,k') for 0 < p < 1: I/2 on the diagonal pairs, (-1)^t I/2 at |k-k'| = N/2, else 0."""
    validate_momentum(k, n_sites)
    validate_momentum(k_prime, n_sites)
    if k == k_prime:
        return 0.5 * np.eye(2, dtype=np.complex128)
    if 2 * abs(k - k_prime) == n_sites:
        return ((-1) ** t) * 0.5 * np.eye(2, dtype=np.complex128)
    return np.zeros((2, 2), dtype=np.complex128)


def contraction_check(s: SuperOp, trials: int, rng: Optional[np.random.Generator] = None,
                      tol: float = None) -> ContractionReport:
    """
    Hilbert-Schmidt contraction <SB, SB> <= <B, B> over random complex 2x2 matrices B.
    Equality for every B (an isometry) holds exactly when p = 0.
    """
    if trials < 1:
        raise WalkDomainError(f"trials must be >= 1, got {trials!r}")
    tol = settings.CONTRACTION_TOL if tol is None else tol
    rng = rng if rng is not None else np.random.default_rng(settings.RANDOM_SEED)
    matrix = np.asarray(s.matrix, dtype=np.complex128)
    if matrix.shape != (4, 4):
        raise DimensionError(f"superoperator must be 4x4, got {matrix.shape}")

    samples = rng.standard_normal((trials, 2, 2)) + 1j * rng.standard_normal((trials, 2, 2))
    images = from_pauli(np.einsum("ij,tj->ti", matrix, to_pauli(samples)))
    before = np.sum(np.abs(samples) ** 2, axis=(1, 2))
    after = np.sum(np.abs(images) ** 2, axis=(1, 2))
    nonzero = before > 0
    ratios = np.ones(trials)
    ratios[nonzero] = after[nonzero] / before[nonzero]

    max_ratio, min_ratio = float(ratios.max()), float(ratios.min())
    return ContractionReport(
        trials=trials,
        max_ratio=max_ratio,
        min_ratio=min_ratio,
        is_contraction=max_ratio <= 1.0 + tol,
        is_isometry=abs(max_ratio - 1.0) <= tol and abs(min_ratio - 1.0) <= tol,
    )
