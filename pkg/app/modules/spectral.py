"""
Spectral analysis of the momentum-pair superoperator L_{kk'}.

Eigenvalues come from a dense general eigensolver; the closed-form characteristic
quartic is kept as an independent residual check.
"""

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.core.errors import WalkDomainError
from app.models.walk import WalkParams
from app.modules.evolution_direct import DensityMatrix
from app.modules.evolution_fourier import superoperator_matrix, superoperator_stack
from app.modules.walk_core import validate_momentum


@dataclass(frozen=True)
class QuarticCoeffs:
    """f(lambda) = c4 l^4 + c3 l^3 + c2 l^2 + c1 l + c0, monic with c0 = q^2."""
    c4: complex
    c3: complex
    c2: complex
    c1: complex
    c0: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c4, self.c3, self.c2, self.c1, self.c0], dtype=np.complex128)

    def evaluate(self, lam):
        return np.polyval(self.as_array(), lam)


@dataclass(frozen=True)
class SpectrumReport:
    k: int
    k_prime: int
    eigenvalues: np.ndarray
    max_modulus: float
    unit_eigenvalues: List[Tuple[complex, int]]
    spectral_gap: float
    relaxation_gap: float
    max_residual: float
    classified: bool = field(default=False)


def characteristic_coeffs(k: int, k_prime: int, params: WalkParams) -> QuarticCoeffs:
    n = params.n_sites
    validate_momentum(k, n)
    validate_momentum(k_prime, n)
    q = 1.0 - params.decoherence_rate
    cos2b = math.cos(2.0 * params.coin_angle)
    c_plus = math.cos(2.0 * math.pi * (k_prime + k) / n)
    c_minus = math.cos(2.0 * math.pi * (k_prime - k) / n)
    return QuarticCoeffs(
        c4=1.0 + 0j,
        c3=complex((1.0 + cos2b) * (q * c_plus - c_minus)),
        c2=complex((1.0 + q * q) * cos2b - 2.0 * q * c_plus * c_minus * (1.0 + cos2b)),
        c1=complex(q * (1.0 + cos2b) * (c_plus - q * c_minus)),
        c0=complex(q * q),
    )


def _sort_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    """Descending modulus, ties (to 1e-12) by ascending phase."""
    modulus = np.round(np.abs(eigenvalues), 12)
    phase = np.angle(eigenvalues)
    order = np.lexsort((phase, -modulus))
    return eigenvalues[order]


def _unit_eigenvalues(eigenvalues: np.ndarray, radius: float) -> List[Tuple[complex, int]]:
    found = []
    for target in (1.0, -1.0):
        count = int(np.sum(np.abs(eigenvalues - target) < radius))
        if count:
            found.append((complex(target), count))
    return found


def spectrum(k: int, k_prime: int, params: WalkParams, radius: float = None) -> SpectrumReport:
    """
    Eigenvalues of L_{kk'} plus the unit-eigenvalue classification. The classification
    is meaningful only for 0 < p < 1 (`classified` is False otherwise).
    """
    radius = settings.UNIT_EIGENVALUE_RADIUS if radius is None else radius
    matrix = superoperator_matrix(k, k_prime, params).matrix
    eigenvalues = _sort_spectrum(linalg.eigvals(matrix))
    moduli = np.abs(eigenvalues)

    unit_mask = (np.abs(eigenvalues - 1.0) < radius) | (np.abs(eigenvalues + 1.0) < radius)
    rest = moduli[~unit_mask]
    residual = np.abs(characteristic_coeffs(k, k_prime, params).evaluate(eigenvalues))

    return SpectrumReport(
        k=int(k),
        k_prime=int(k_prime),
        eigenvalues=eigenvalues,
        max_modulus=float(moduli[0]),
        unit_eigenvalues=_unit_eigenvalues(eigenvalues, radius),
        spectral_gap=float(1.0 - moduli[1]),
        relaxation_gap=float(1.0 - rest.max()) if rest.size else 0.0,
        max_residual=float(residual.max()),
        classified=0.0 < params.decoherence_rate < 1.0,
    )


def has_expected_unit_eigenvalues(report: SpectrumReport, n_sites: int) -> bool:
    """lambda = 1 (simple) iff k = k', lambda = -1 (simple) iff |k - k'| = N/2, nothing else on the unit circle."""
    found = dict((value.real, count) for value, count in report.unit_eigenvalues)
    expect_plus = report.k == report.k_prime
    expect_minus = 2 * abs(report.k - report.k_prime) == n_sites
    if expect_plus != (1.0 in found) or expect_minus != (-1.0 in found):
        return False
    if any(count != 1 for count in found.values()):
        return False
    # any other eigenvalue must sit strictly inside the unit disc
    return report.relaxation_gap > 0.0


def spectrum_grid(params: WalkParams) -> List[SpectrumReport]:
    """Reports for every (k, k') pair in lexicographic order."""
    n = params.n_sites
    return [spectrum(k, kp, params) for k in range(n) for kp in range(n)]


def walk_relaxation_rate(params: WalkParams, radius: float = None) -> float:
    """Largest eigenvalue modulus over all pairs after discarding the unit eigenvalues."""
    radius = settings.UNIT_EIGENVALUE_RADIUS if radius is None else radius
    eigenvalues = np.linalg.eigvals(superoperator_stack(params)).ravel()
    keep = (np.abs(eigenvalues - 1.0) >= radius) & (np.abs(eigenvalues + 1.0) >= radius)
    return float(np.abs(eigenvalues[keep]).max()) if np.any(keep) else 0.0


def block_q0(k: int, params: WalkParams) -> np.ndarray:
    """
    3x3 block Q0 with L_{kk} = [[1, 0], [0, Q0]]. Taken from L_{kk} itself, so its
    top-left entry is -q cos(4 pi k/N) cos 2beta.
    """
    return superoperator_matrix(k, k, params).matrix[1:, 1:].copy()


def block_q1(k: int, k_prime: int, params: WalkParams) -> np.ndarray:
    """Lower-right 3x3 block of L_{kk'} for |k - k'| = N/2, where L_{kk'} = [[-1, 0], [0, Q1]]."""
    if 2 * abs(k - k_prime) != params.n_sites:
        raise WalkDomainError(f"block_q1 needs |k - k'| = N/2, got k={k}, k'={k_prime}, N={params.n_sites}")
    return superoperator_matrix(k, k_prime, params).matrix[1:, 1:].copy()


def spectral_radius(matrix: np.ndarray) -> float:
    return float(np.abs(linalg.eigvals(matrix)).max())


def stationary_density(n_sites: int, t_parity: int = 0) -> DensityMatrix:
    """
    Long-time limit of rho(t) for p > 0. Odd N: I/(2N). Even N: 1/N on both coin slots
    of every x with x = t_parity (mod 2), 0 elsewhere.
    """
    if n_sites < 2:
        raise WalkDomainError(f"n_sites must be >= 2, got {n_sites!r}")
    if t_parity not in (0, 1):
        raise WalkDomainError(f"t_parity must be 0 or 1, got {t_parity!r}")
    if n_sites % 2:
        return np.eye(2 * n_sites, dtype=np.complex128) / (2 * n_sites)
    diag = np.zeros(2 * n_sites)
    for x in range(t_parity, n_sites, 2):
        diag[2 * x] = diag[2 * x + 1] = 1.0 / n_sites
    return np.diag(diag).astype(np.complex128)
