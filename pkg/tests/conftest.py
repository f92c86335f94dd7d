from pathlib import Path

import numpy as np
import pytest

from logicaltensor.dynamics_examples import LineConfig
from logicaltensor.graph_core import Basis, Universe, graph_from_tokens


@pytest.fixture
def data_dir() -> Path:
    """Return the path to the test_data directory."""
    return Path(__file__).parent / "test_data"


@pytest.fixture
def u2s2() -> Universe:
    """Two vertices u, v and two states b, w: 9 graphs."""
    return Universe(("u", "v"), ("b", "w"))


@pytest.fixture
def u3s2() -> Universe:
    return Universe(("u", "v", "x"), ("b", "w"))


@pytest.fixture
def line2() -> LineConfig:
    return LineConfig(2)


@pytest.fixture
def line3() -> LineConfig:
    return LineConfig(3)


@pytest.fixture
def basis2(u2s2) -> Basis:
    return Basis.of(u2s2)


def G(*tokens):
    """Shorthand for a graph written as its tokens."""
    return graph_from_tokens(tokens)


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = b.conj().T @ b
    return rho / np.trace(rho).real
