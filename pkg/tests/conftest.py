import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).parent.parent))

from widthkit.ffla import FieldSpec, LinearMap, Subspace
from widthkit.fullset import SubspaceArrangement, from_configuration
from widthkit.graph import Graph
from widthkit.matroid import GF2, Configuration

DATA_DIR = Path(__file__).parent.parent / "data"

GF3 = FieldSpec(3)


def random_configuration(rng: np.random.Generator, field: FieldSpec, dim: int, size: int) -> Configuration:
    cols = rng.integers(0, field.q, size=(dim, size))
    return Configuration.from_columns(field, cols)


def random_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def random_arrangement(rng: np.random.Generator, field: FieldSpec, dim: int, size: int,
                       prefix: str = "e", zero_rows: tuple[int, ...] = ()) -> SubspaceArrangement:
    """Lines through random vectors; coordinates in zero_rows stay 0."""
    cols = rng.integers(0, field.q, size=(dim, size))
    if zero_rows:
        cols[list(zero_rows), :] = 0
    labels = [f"{prefix}{i}" for i in range(size)]
    return from_configuration(Configuration.from_columns(field, cols, labels))


def with_zero(v: SubspaceArrangement, label: str = "z") -> SubspaceArrangement:
    return SubspaceArrangement(v.field, v.dim, v.labels + (label,), v.spaces + (Subspace.zero(v.field, v.dim),))


def random_injective_map(rng: np.random.Generator, field: FieldSpec, source: int, target: int) -> LinearMap:
    while True:
        phi = LinearMap.from_array(field, rng.integers(0, field.q, size=(target, source)), source)
        if phi.kernel().dim == 0:
            return phi


@pytest.fixture
def rng():
    return np.random.default_rng(20211)


@pytest.fixture
def u24():
    """U_{2,4} over GF(3): any two of a, b, c, d span the plane."""
    return Configuration.from_columns(GF3, [[1, 0, 1, 1], [0, 1, 1, 2]], ["a", "b", "c", "d"])


@pytest.fixture
def parallel6():
    return Configuration.from_columns(GF2, [[1] * 6])


@pytest.fixture
def p4():
    return path_graph(4)


@pytest.fixture
def data_dir():
    return DATA_DIR
