"""
Shared fixtures: the four-station shuttle multiplex and a random multiplex factory.
"""

from pathlib import Path

import numpy as np
import pytest

from multiplex_efficiency.network import MultiplexNetwork

REPO_ROOT = Path(__file__).resolve().parent.parent
DATASETS = REPO_ROOT / "datasets"

INF = np.inf

# (layer, src, dst, weight), 1-based like the edge files
SHUTTLE_EDGES = [
    (1, 1, 2, 1.0), (1, 1, 3, 1.0), (1, 2, 3, 1.0), (1, 3, 1, 1.0), (1, 3, 4, 1.0),
    (1, 4, 2, 0.5),
    (2, 1, 2, 0.5), (2, 1, 3, 0.5), (2, 2, 1, 0.5), (2, 3, 1, 0.5), (2, 3, 4, 1.0),
    (2, 4, 2, 1.0),
    (3, 2, 1, 1.0), (3, 4, 1, 1.5), (3, 4, 2, 1.0), (3, 4, 3, 0.5),
]


def shuttle_network() -> MultiplexNetwork:
    return MultiplexNetwork.from_edges(
        4, 3, [(ell - 1, i - 1, j - 1, w) for ell, i, j, w in SHUTTLE_EDGES])


@pytest.fixture
def shuttle():
    return shuttle_network()


@pytest.fixture
def shuttle_file(tmp_path):
    path = tmp_path / "shuttles.edges"
    lines = ["# layer src dst weight"] + [f"{ell} {i} {j} {w}" for ell, i, j, w in SHUTTLE_EDGES]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def make_random_multiplex(rng: np.random.Generator, n_vertices: int, n_layers: int,
                          density: float = 0.35, strongly_connected: bool = False,
                          undirected_layers: bool = False) -> MultiplexNetwork:
    """
    Random weights drawn from a few dyadic values so that ties are exact in floating point.
    """
    values = np.array([0.5, 1.0, 1.5, 2.0, 3.0])
    layers = []
    for ell in range(n_layers):
        mask = rng.random((n_vertices, n_vertices)) < density
        np.fill_diagonal(mask, False)
        weights = np.where(mask, rng.choice(values, size=(n_vertices, n_vertices)), 0.0)
        if undirected_layers and ell % 2 == 1:
            upper = np.triu(weights, 1)
            weights = upper + upper.T
        layers.append(weights)
    if strongly_connected and n_vertices > 1:
        cycle = np.zeros((n_vertices, n_vertices))
        for v in range(n_vertices):
            cycle[v, (v + 1) % n_vertices] = 3.0
        layers[0] = np.where(layers[0] > 0, layers[0], cycle)
    return MultiplexNetwork.from_dense(layers)


@pytest.fixture
def random_multiplex():
    return make_random_multiplex


def random_instances(count: int, seed: int, max_vertices: int = 8, max_layers: int = 4):
    """(seed, n, L) triples for parametrized property suites"""
    rng = np.random.default_rng(seed)
    return [(seed * 1000 + i, int(rng.integers(1, max_vertices + 1)),
             int(rng.integers(1, max_layers + 1))) for i in range(count)]


def dataset_path(name: str) -> Path:
    path = DATASETS / name
    if not path.exists():
        pytest.skip(f"dataset {name} not present under datasets/")
    return path
