"""
Entropy analytics for the coin (x) walker state: von Neumann entropy in bits,
partial traces in the shared 2x + (j-1) ordering, mutual information, purity
and the trace norm used for convergence distances.
"""

import math
from typing import Tuple

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from app.core.config import settings
from app.core.errors import DimensionError, InvalidDensityError
from app.core.logger import logger
from app.models.walk import EntropyRecord


def _as_square(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    return rho


def _split(rho: np.ndarray) -> np.ndarray:
    """View a 2N x 2N matrix as [x, j, y, l]."""
    rho = _as_square(rho)
    if rho.shape[0] % 2:
        raise DimensionError(f"walk density matrix must have even dimension, got {rho.shape[0]}")
    n = rho.shape[0] // 2
    return rho.reshape(n, 2, n, 2)


def von_neumann_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    """
    -sum_i l_i log l_i over the eigenvalues of rho, with 0 log 0 = 0.
    Eigenvalues below ENTROPY_EIG_CUTOFF count as zero; eigenvalues below -PSD_TOL raise.
    """
    rho = _as_square(rho)
    tol = settings.PSD_TOL
    asymmetry = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    if asymmetry > tol:
        raise InvalidDensityError(f"matrix is not Hermitian (max asymmetry {asymmetry:.3e})")
    trace_error = abs(np.trace(rho) - 1.0)
    if trace_error > tol:
        raise InvalidDensityError(f"trace deviates from 1 by {trace_error:.3e}")

    eigenvalues = linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if eigenvalues[0] < -tol:
        raise InvalidDensityError(f"matrix has a negative eigenvalue {eigenvalues[0]:.3e}")
    eigenvalues = np.where(eigenvalues < settings.ENTROPY_EIG_CUTOFF, 0.0, eigenvalues)
    entropy = -float(np.sum(xlogy(eigenvalues, eigenvalues))) / math.log(base)
    # -0.0 and rounding below zero for pure states
    return max(entropy, 0.0)


def partial_trace_walker(rho: np.ndarray) -> np.ndarray:
    """Coin reduced matrix: rho_c[j, l] = sum_x rho[2x + j, 2x + l]."""
    return np.einsum("xjxl->jl", _split(rho))


def partial_trace_coin(rho: np.ndarray) -> np.ndarray:
    """Walker reduced matrix: rho_w[x, y] = sum_j rho[2x + j, 2y + j]."""
    return np.einsum("xjyj->xy", _split(rho))


def purity(rho: np.ndarray) -> float:
    """Tr rho^2."""
    rho = _as_square(rho)
    return float(np.real(np.sum(rho * rho.T)))


def mutual_information(rho: np.ndarray, time: int = 0) -> EntropyRecord:
    """S(coin) + S(walker) - S(total), all in bits."""
    s_total = von_neumann_entropy(rho)
    s_coin = von_neumann_entropy(partial_trace_walker(rho))
    s_walker = von_neumann_entropy(partial_trace_coin(rho))
    mutual = s_coin + s_walker - s_total
    if mutual < -settings.PSD_TOL:
        logger.warning(f"Negative mutual information {mutual:.3e} at t={time}")
    return EntropyRecord(
        time=time,
        s_total=s_total,
        s_coin=s_coin,
        s_walker=s_walker,
        mutual_info=mutual,
        purity=purity(rho),
    )


def trace_norm(m: np.ndarray) -> float:
    """Schatten 1-norm: the sum of singular values."""
    return float(np.sum(linalg.svdvals(_as_square(m))))


def limiting_entropies(n_sites: int) -> Tuple[float, float, float]:
    """(S_total, S_coin, S_walker) in bits in the long-time limit of a walk with p > 0."""
    if n_sites % 2:
        return 1.0 + math.log2(n_sites), 1.0, math.log2(n_sites)
    return math.log2(n_sites), 1.0, math.log2(n_sites / 2)
