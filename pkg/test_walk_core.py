import math

import numpy as np
import pytest

from app.core.errors import WalkDomainError
from app.modules.walk_core import (
    SIGMA_0,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    check_unital,
    coin_operator,
    coin_operator_fourier,
    coin_projector,
    from_pauli,
    kraus_operators,
    to_pauli,
)
from conftest import random_unit_coin


class TestCoinOperator:
    def test_hadamard_at_quarter_pi(self):
        expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        np.testing.assert_allclose(coin_operator(math.pi / 4), expected, atol=1e-15)

    def test_third_pi_entries(self):
        expected = np.array([[0.5, math.sqrt(3) / 2], [math.sqrt(3) / 2, -0.5]])
        np.testing.assert_allclose(coin_operator(math.pi / 3), expected, atol=1e-15)

    def test_unitary_and_hermitian(self, rng):
        for beta in rng.uniform(1e-3, math.pi / 2 - 1e-3, size=50):
            u = coin_operator(beta)
            assert np.linalg.norm(u @ u.conj().T - np.eye(2)) < 1e-14
            np.testing.assert_array_equal(u, u.conj().T)

    @pytest.mark.parametrize("beta", [0.0, math.pi / 2, -0.1, 2.0])
    def test_rejects_angles_outside_open_interval(self, beta):
        with pytest.raises(WalkDomainError):
            coin_operator(beta)


class TestCoinOperatorFourier:
    def test_zero_momentum_is_plain_coin(self):
        np.testing.assert_allclose(coin_operator_fourier(0.7, 0, 6), coin_operator(0.7), atol=1e-15)

    def test_half_cycle_momentum_negates_coin(self):
        np.testing.assert_allclose(coin_operator_fourier(0.7, 3, 6), -coin_operator(0.7), atol=1e-15)

    def test_every_dual_is_unitary(self, rng):
        n = 7
        for beta in rng.uniform(1e-3, math.pi / 2 - 1e-3, size=50):
            for k in range(n):
                u = coin_operator_fourier(beta, k, n)
                assert np.linalg.norm(u @ u.conj().T - np.eye(2)) < 1e-14

    def test_phase_rows(self):
        n, k, beta = 5, 2, math.pi / 6
        phase = np.exp(-2j * math.pi * k / n)
        u = coin_operator_fourier(beta, k, n)
        np.testing.assert_allclose(u[0], phase * coin_operator(beta)[0], atol=1e-15)
        np.testing.assert_allclose(u[1], np.conj(phase) * coin_operator(beta)[1], atol=1e-15)

    @pytest.mark.parametrize("k", [-1, 5, 9])
    def test_rejects_momentum_out_of_range(self, k):
        with pytest.raises(WalkDomainError):
            coin_operator_fourier(math.pi / 4, k, 5)


class TestKrausOperators:
    def test_coherent_limit(self):
        a0, a1, a2 = kraus_operators(0.0)
        np.testing.assert_array_equal(a0, np.eye(2))
        assert not a1.any() and not a2.any()

    def test_full_measurement(self):
        a0, a1, a2 = kraus_operators(1.0)
        assert not a0.any()
        np.testing.assert_array_equal(a1, np.diag([1, 0]))
        np.testing.assert_array_equal(a2, np.diag([0, 1]))

    def test_intermediate_rate(self):
        a0, a1, a2 = kraus_operators(0.36)
        np.testing.assert_allclose(a0, 0.8 * np.eye(2), atol=1e-15)
        np.testing.assert_allclose(a1, np.diag([0.6, 0]), atol=1e-15)
        np.testing.assert_allclose(a2, np.diag([0, 0.6]), atol=1e-15)

    @pytest.mark.parametrize("p", [-0.01, 1.01])
    def test_rejects_rate_outside_unit_interval(self, p):
        with pytest.raises(WalkDomainError):
            kraus_operators(p)

    def test_family_is_unital_on_grid(self):
        for p in np.linspace(0.0, 1.0, 11):
            check = check_unital(kraus_operators(p))
            assert check.is_unital
            assert check.residual < 1e-14


class TestCheckUnital:
    def test_doubled_identity_fails(self):
        check = check_unital([np.eye(2), np.eye(2), np.zeros((2, 2))])
        assert not check.is_unital
        assert check.residual == pytest.approx(1.0)

    def test_partial_family_fails(self):
        a0, _, _ = kraus_operators(0.5)
        check = check_unital([a0, np.zeros((2, 2)), np.zeros((2, 2))])
        assert not check.is_unital
        assert check.residual == pytest.approx(0.5)


class TestPauliConversion:
    def test_basis_elements(self):
        for i, sigma in enumerate((SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)):
            expected = np.zeros(4)
            expected[i] = 1.0
            np.testing.assert_allclose(to_pauli(sigma), expected, atol=1e-15)

    def test_entrywise_relations(self):
        a = np.array([0.3 + 0.1j, -0.2 + 0.5j, 0.7 - 0.4j, 0.05 + 0.2j])
        b = from_pauli(a)
        assert b[0, 0] == pytest.approx(a[0] + a[3])
        assert b[1, 1] == pytest.approx(a[0] - a[3])
        assert b[0, 1] == pytest.approx(a[1] - 1j * a[2])
        assert b[1, 0] == pytest.approx(a[1] + 1j * a[2])

    def test_projector_has_half_identity_weight(self, rng):
        for _ in range(100):
            alpha = to_pauli(coin_projector(random_unit_coin(rng)))
            assert abs(alpha[0] - 0.5) < 1e-14
            # Hermitian input gives real coefficients
            assert np.max(np.abs(alpha.imag)) < 1e-15

    def test_round_trip_on_random_blocks(self, rng):
        blocks = rng.standard_normal((100, 2, 2)) + 1j * rng.standard_normal((100, 2, 2))
        restored = from_pauli(to_pauli(blocks))
        assert np.max(np.abs(restored - blocks)) < 1e-13
