import numpy as np
import pytest

from energynet.comparison import random_pair
from energynet.graph_core import Network, VertexFunction, random_connected_network


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_networks(seed: int, count: int, max_size: int = 12, min_size: int = 2):
    rng = np.random.default_rng(seed)
    return [random_connected_network(rng, int(rng.integers(min_size, max_size + 1))) for _ in range(count)]


def random_pairs(seed: int, count: int, max_size: int = 10, min_size: int = 3):
    rng = np.random.default_rng(seed)
    return [random_pair(rng, int(rng.integers(min_size, max_size + 1))) for _ in range(count)]


def random_function(rng, network: Network) -> VertexFunction:
    return VertexFunction(network, rng.uniform(-1.0, 1.0, len(network.vertices)))


def pinv_dipole(network: Network, x: str, y: str) -> np.ndarray:
    """Dipole from the Moore-Penrose pseudo-inverse, grounded at the origin."""
    lap = np.diag(network.weight_matrix.sum(axis=1)) - network.weight_matrix
    rhs = np.zeros(len(network.vertices))
    rhs[network.index[x]] += 1.0
    rhs[network.index[y]] -= 1.0
    v = np.linalg.pinv(lap) @ rhs
    return v - v[network.origin_index]


def pinv_resistance(network: Network, x: str, y: str) -> float:
    lap = np.diag(network.weight_matrix.sum(axis=1)) - network.weight_matrix
    p = np.linalg.pinv(lap)
    i, j = network.index[x], network.index[y]
    return float(p[i, i] + p[j, j] - 2 * p[i, j])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
