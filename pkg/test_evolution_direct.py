import math

import numpy as np
import pytest

from app.core.errors import DimensionError, WalkDomainError
from app.models.walk import WalkParams
from app.modules.entropy import purity
from app.modules.evolution_direct import (
    check_density_matrix,
    evolution_operator,
    evolve,
    initial_density,
    iter_density,
    position_distribution,
    shift_operator,
    step,
)
from app.modules.walk_core import kraus_operators
from conftest import COHERENT_COIN, random_density


def classical_walk(n_sites: int, t_max: int):
    """Symmetric random walk on the cycle: 1/2 left, 1/2 right."""
    dist = np.zeros(n_sites)
    dist[0] = 1.0
    yield dist
    for _ in range(t_max):
        dist = 0.5 * np.roll(dist, 1) + 0.5 * np.roll(dist, -1)
        yield dist


class TestShiftOperator:
    def test_two_cycle_swaps_positions(self):
        s = shift_operator(2)
        expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
        np.testing.assert_array_equal(s, expected)
        np.testing.assert_array_equal(s @ s, np.eye(4))

    @pytest.mark.parametrize("n", [2, 3, 4, 7])
    def test_permutation_is_unitary(self, n):
        s = shift_operator(n)
        np.testing.assert_array_equal(s @ s.conj().T, np.eye(2 * n))
        assert set(np.unique(s.real)) == {0.0, 1.0}

    def test_coin_one_moves_forward(self):
        s = shift_operator(4)
        basis = np.zeros(8)
        basis[0] = 1.0  # x=0, j=1
        np.testing.assert_array_equal(s @ basis, np.eye(8)[2])  # x=1, j=1

    def test_coin_two_moves_backward(self):
        s = shift_operator(4)
        np.testing.assert_array_equal(s @ np.eye(8)[1], np.eye(8)[7])  # x=0,j=2 -> x=3,j=2

    def test_rejects_short_cycle(self):
        with pytest.raises(WalkDomainError):
            shift_operator(1)


class TestEvolutionOperator:
    def test_unitary(self):
        for n in (2, 3, 6):
            u = evolution_operator(WalkParams(n_sites=n, decoherence_rate=0.4, coin_angle=0.9))
            assert np.linalg.norm(u @ u.conj().T - np.eye(2 * n)) < 1e-13

    def test_two_cycle_hadamard_by_hand(self):
        h = 1 / math.sqrt(2)
        expected = h * np.array([[0, 0, 1, 1], [0, 0, 1, -1], [1, 1, 0, 0], [1, -1, 0, 0]])
        u = evolution_operator(WalkParams(n_sites=2, decoherence_rate=0.0, coin_angle=math.pi / 4))
        np.testing.assert_allclose(u, expected, atol=1e-15)

    def test_independent_of_decoherence_rate(self):
        a = evolution_operator(WalkParams(n_sites=4, decoherence_rate=0.0))
        b = evolution_operator(WalkParams(n_sites=4, decoherence_rate=0.9))
        np.testing.assert_array_equal(a, b)


class TestStep:
    def test_coherent_step_is_unitary_conjugation(self, rng):
        params = WalkParams(n_sites=4, decoherence_rate=0.0, coin_angle=0.6)
        u = evolution_operator(params)
        rho = random_density(rng, 8)
        np.testing.assert_allclose(step(rho, u, kraus_operators(0.0)), u @ rho @ u.conj().T, atol=1e-14)

    def test_one_step_by_hand(self):
        # psi0 = (1, i)/sqrt2, p = 1/2: the Kraus step halves the coherence -> 1/2 s0 + 1/4 sy,
        # the Hadamard flips sy, then coin 1 moves to x=1 (index 2) and coin 2 to x=2 (index 5).
        params = WalkParams(n_sites=3, decoherence_rate=0.5, coin_angle=math.pi / 4, initial_coin=COHERENT_COIN)
        rho = step(initial_density(params), evolution_operator(params), kraus_operators(0.5))
        expected = np.zeros((6, 6), dtype=complex)
        expected[2, 2] = expected[5, 5] = 0.5
        expected[2, 5] = 0.25j
        expected[5, 2] = -0.25j
        np.testing.assert_allclose(rho, expected, atol=1e-15)

    def test_preserves_density_invariants(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 5))
            params = WalkParams(n_sites=n, decoherence_rate=float(rng.uniform()),
                                coin_angle=float(rng.uniform(0.05, 1.5)))
            rho = random_density(rng, 2 * n)
            out = step(rho, evolution_operator(params), kraus_operators(params.decoherence_rate))
            assert abs(np.trace(out) - np.trace(rho)) < 1e-13
            assert check_density_matrix(out).is_valid

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            step(np.eye(6) / 6, np.eye(8), kraus_operators(0.1))


class TestEvolve:
    def test_initial_state_is_pure(self):
        rho = evolve(WalkParams(n_sites=5, decoherence_rate=0.5), 0)
        assert purity(rho) == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(position_distribution(rho), [1, 0, 0, 0, 0])

    def test_coherent_walk_stays_pure(self):
        rho = evolve(WalkParams(n_sites=5, decoherence_rate=0.0, coin_angle=0.8, initial_coin=COHERENT_COIN), 30)
        assert abs(purity(rho) - 1.0) < 1e-10

    def test_purity_strictly_decreases_early(self):
        params = WalkParams(n_sites=4, decoherence_rate=0.3, coin_angle=math.pi / 4, initial_coin=COHERENT_COIN)
        purities = [purity(rho) for rho in iter_density(params, 10)]
        assert np.all(np.diff(purities) < 0.0)

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
    def test_full_measurement_is_classical_walk(self, n):
        params = WalkParams(n_sites=n, decoherence_rate=1.0, coin_angle=math.pi / 4)
        for rho, expected in zip(iter_density(params, 50), classical_walk(n, 50)):
            np.testing.assert_allclose(position_distribution(rho), expected, atol=1e-12)


class TestPositionDistribution:
    def test_one_step_support(self):
        for n in (3, 5, 8):
            dist = position_distribution(evolve(WalkParams(n_sites=n, decoherence_rate=0.4, coin_angle=1.1), 1))
            support = set(np.flatnonzero(dist > 1e-15))
            assert support <= {1, n - 1}
            assert dist.sum() == pytest.approx(1.0, abs=1e-12)

    def test_even_cycle_parity(self):
        params = WalkParams(n_sites=6, decoherence_rate=0.3, coin_angle=0.7)
        for t, rho in enumerate(iter_density(params, 25)):
            dist = position_distribution(rho)
            off_parity = [x for x in range(6) if (t - x) % 2]
            assert np.all(np.abs(dist[off_parity]) < 1e-12)
            assert np.all(dist >= -1e-12)
