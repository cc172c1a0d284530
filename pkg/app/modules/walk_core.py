"""
Walk Core
=========
Coin operator and its Fourier dual, the coin-measurement Kraus family, and the
Pauli-basis (Bloch) conversion of 2x2 coin blocks shared by both backends.

Conventions:
- All arrays are complex128.
- A CoinBlock is a (2, 2) array; a BlochVec is a length-4 array
  (alpha1, alpha2, alpha3, alpha4) with B = a1*s0 + a2*sx + a3*sy + a4*sz.
  `to_pauli` / `from_pauli` also accept stacks (..., 2, 2) <-> (..., 4).
"""

import math
from typing import Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import WalkDomainError, DimensionError
from app.models.walk import UnitalCheck

CoinBlock = np.ndarray
BlochVec = np.ndarray
KrausFamily = Tuple[CoinBlock, CoinBlock, CoinBlock]

SIGMA_0 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI_BASIS = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)


def _check_coin_angle(coin_angle: float) -> float:
    beta = float(coin_angle)
    if not (0.0 < beta < math.pi / 2):
        raise WalkDomainError(f"coin_angle must lie in the open interval (0, pi/2), got {beta!r}")
    return beta


def _check_rate(decoherence_rate: float) -> float:
    p = float(decoherence_rate)
    if not (0.0 <= p <= 1.0):
        raise WalkDomainError(f"decoherence_rate must lie in [0, 1], got {p!r}")
    return p


def validate_momentum(k: int, n_sites: int) -> int:
    if n_sites < 2:
        raise WalkDomainError(f"n_sites must be >= 2, got {n_sites!r}")
    if not (0 <= k < n_sites):
        raise WalkDomainError(f"momentum index k={k!r} outside [0, {n_sites})")
    return int(k)


def coin_operator(coin_angle: float) -> CoinBlock:
    """U_c(beta) = [[cos b, sin b], [sin b, -cos b]]; unitary and Hermitian. beta = pi/4 is Hadamard."""
    beta = _check_coin_angle(coin_angle)
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, s], [s, -c]], dtype=np.complex128)


def momentum_phase(k: int, n_sites: int) -> CoinBlock:
    """diag(e^{-2 pi i k/N}, e^{+2 pi i k/N}): the shift operator seen from momentum k."""
    k = validate_momentum(k, n_sites)
    theta = 2.0 * math.pi * k / n_sites
    return np.diag([np.exp(-1j * theta), np.exp(1j * theta)]).astype(np.complex128)


def coin_operator_fourier(coin_angle: float, k: int, n_sites: int) -> CoinBlock:
    """Fourier dual U_c(beta, k) = diag(e^{-2 pi i k/N}, e^{2 pi i k/N}) . U_c(beta)."""
    return momentum_phase(k, n_sites) @ coin_operator(coin_angle)


def kraus_operators(decoherence_rate: float) -> KrausFamily:
    """
    Coin-measurement channel with rate p:
    A0 = sqrt(1-p) s0, A1 = sqrt(p)/2 (s0 + sz), A2 = sqrt(p)/2 (s0 - sz).
    """
    p = _check_rate(decoherence_rate)
    a0 = math.sqrt(1.0 - p) * SIGMA_0
    a1 = (math.sqrt(p) / 2.0) * (SIGMA_0 + SIGMA_Z)
    a2 = (math.sqrt(p) / 2.0) * (SIGMA_0 - SIGMA_Z)
    return a0, a1, a2


def check_unital(kraus: Sequence[CoinBlock], tol: float = None) -> UnitalCheck:
    """Checks sum_n A_n^dagger A_n = I; the residual is the spectral norm of the difference."""
    tol = settings.UNITAL_TOL if tol is None else tol
    total = np.zeros((2, 2), dtype=np.complex128)
    for op in kraus:
        op = np.asarray(op, dtype=np.complex128)
        if op.shape != (2, 2):
            raise DimensionError(f"Kraus operator must be 2x2, got shape {op.shape}")
        total += op.conj().T @ op
    residual = float(np.linalg.norm(total - SIGMA_0, 2))
    return UnitalCheck(is_unital=residual < tol, residual=residual)


def to_pauli(block: np.ndarray) -> BlochVec:
    """
    Pauli coefficients of a 2x2 block (or a stack of them):
    a1 = (B11 + B22)/2, a4 = (B11 - B22)/2, a2 = (B12 + B21)/2, a3 = (B21 - B12)/(2i).
    """
    b = np.asarray(block, dtype=np.complex128)
    if b.shape[-2:] != (2, 2):
        raise DimensionError(f"expected trailing shape (2, 2), got {b.shape}")
    b11, b12 = b[..., 0, 0], b[..., 0, 1]
    b21, b22 = b[..., 1, 0], b[..., 1, 1]
    return np.stack(
        [(b11 + b22) / 2.0, (b12 + b21) / 2.0, (b21 - b12) / 2.0j, (b11 - b22) / 2.0],
        axis=-1,
    )


def from_pauli(coeffs: np.ndarray) -> CoinBlock:
    """Inverse of to_pauli: A11 = a1+a4, A22 = a1-a4, A12 = a2-i a3, A21 = a2+i a3."""
    v = np.asarray(coeffs, dtype=np.complex128)
    if v.shape[-1] != 4:
        raise DimensionError(f"expected trailing length 4, got {v.shape}")
    a1, a2, a3, a4 = v[..., 0], v[..., 1], v[..., 2], v[..., 3]
    top = np.stack([a1 + a4, a2 - 1j * a3], axis=-1)
    bottom = np.stack([a2 + 1j * a3, a1 - a4], axis=-1)
    return np.stack([top, bottom], axis=-2)


def coin_projector(coin_state: np.ndarray) -> CoinBlock:
    """|psi><psi| for a coin vector."""
    psi = np.asarray(coin_state, dtype=np.complex128).reshape(2)
    return np.outer(psi, psi.conj())
