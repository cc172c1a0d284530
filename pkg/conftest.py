import math
import os

# keep test runs from writing rotating log files
os.environ.setdefault("LOG_TO_FILE", "false")

import numpy as np
import pytest

from app.models.walk import WalkParams

SQRT_HALF = 1.0 / math.sqrt(2.0)
# (1, i)/sqrt(2): a coin state with coherence, so the very first Kraus step already mixes
COHERENT_COIN = (SQRT_HALF, 0.0, 0.0, SQRT_HALF)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return rho / np.trace(rho).real


def random_unit_coin(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def hadamard_params():
    return WalkParams(n_sites=5, decoherence_rate=0.2, coin_angle=math.pi / 4)


@pytest.fixture
def coherent_coin_params():
    return WalkParams(n_sites=5, decoherence_rate=0.3, coin_angle=math.pi / 4, initial_coin=COHERENT_COIN)


@pytest.fixture
def output_dir(tmp_path):
    path = tmp_path / "results"
    path.mkdir()
    return path
