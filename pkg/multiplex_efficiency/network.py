"""
Multiplex Network Model
Layer adjacencies, the path tensor, the supra-adjacency matrix and the structural
derivations (aggregation, transposition) every other module builds on.

Indices are 0-based throughout the Python API; reports and files are 1-based.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import InvalidNetworkError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, int, float]


@dataclass(frozen=True)
class SwitchCost:
    """Cost of one change of layer between consecutive intra-layer edges"""

    gamma: float = 0.0

    def __post_init__(self):
        try:
            value = float(self.gamma)
        except (TypeError, ValueError):
            raise InvalidNetworkError(f"switch cost must be a real number, got {self.gamma!r}")
        if not math.isfinite(value) or value < 0:
            raise InvalidNetworkError(f"switch cost must be finite and >= 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", value)

    def __float__(self):
        return self.gamma


def as_gamma(value) -> float:
    """Accept a SwitchCost or a plain number and return the validated float"""
    if isinstance(value, SwitchCost):
        return value.gamma
    return SwitchCost(value).gamma


def _is_symmetric(matrix: sp.csr_matrix) -> bool:
    return (matrix != matrix.T).nnz == 0


class MultiplexNetwork:
    """
    N vertices shared by L layers, each layer a weighted directed graph.

    Layers are stored as ``scipy.sparse.csr_matrix``; a weight of 0 means "no edge".
    Instances are treated as immutable: every modifier returns a new network.
    """

    def __init__(self,
                 layers: Sequence,
                 vertex_labels: Optional[Sequence[str]] = None,
                 layer_labels: Optional[Sequence[str]] = None):
        if len(layers) == 0:
            raise InvalidNetworkError("a multiplex needs at least one layer")

        matrices = []
        n_vertices = None
        for ell, layer in enumerate(layers):
            matrix = sp.csr_matrix(layer, dtype=float, copy=True)
            rows, cols = matrix.shape
            if rows != cols:
                raise InvalidNetworkError(f"layer {ell + 1} is not square: {matrix.shape}")
            if n_vertices is None:
                n_vertices = rows
            elif rows != n_vertices:
                raise InvalidNetworkError(
                    f"layer {ell + 1} has {rows} vertices, expected {n_vertices}")

            matrix.sum_duplicates()
            matrix.eliminate_zeros()
            if not np.all(np.isfinite(matrix.data)):
                raise InvalidNetworkError(f"layer {ell + 1} has non-finite weights")
            if (matrix.data < 0).any():
                raise InvalidNetworkError(f"layer {ell + 1} has negative weights")
            if matrix.diagonal().any():
                raise InvalidNetworkError(f"layer {ell + 1} has a self loop")
            matrix.sort_indices()
            matrices.append(matrix)

        if n_vertices < 1:
            raise InvalidNetworkError("a multiplex needs at least one vertex")

        self._layers = tuple(matrices)
        self._n = n_vertices
        self._undirected = tuple(_is_symmetric(m) for m in matrices)
        self._vertex_labels = self._check_labels(vertex_labels, n_vertices, "vertex")
        self._layer_labels = self._check_labels(layer_labels, len(matrices), "layer")

    @staticmethod
    def _check_labels(labels, expected: int, kind: str) -> Tuple[str, ...]:
        if labels is None:
            return tuple(str(i + 1) for i in range(expected))
        labels = tuple(str(label) for label in labels)
        if len(labels) != expected:
            raise InvalidNetworkError(f"expected {expected} {kind} labels, got {len(labels)}")
        return labels

    # ------------------------------------------------------------------ factories

    @classmethod
    def from_dense(cls, matrices: Sequence, **labels) -> "MultiplexNetwork":
        """Build from a list of dense N×N arrays (one per layer)"""
        return cls([np.asarray(m, dtype=float) for m in matrices], **labels)

    @classmethod
    def from_edges(cls, n_vertices: int, n_layers: int, edges: Iterable[Edge],
                   **labels) -> "MultiplexNetwork":
        """Build from (layer, src, dst, weight) tuples, 0-based"""
        buckets: List[Dict[Tuple[int, int], float]] = [dict() for _ in range(n_layers)]
        for ell, src, dst, weight in edges:
            if not (0 <= ell < n_layers and 0 <= src < n_vertices and 0 <= dst < n_vertices):
                raise InvalidNetworkError(f"edge ({ell}, {src}, {dst}) out of bounds")
            previous = buckets[ell].get((src, dst))
            if previous is not None and previous != weight:
                raise InvalidNetworkError(
                    f"conflicting weights {previous} and {weight} for edge "
                    f"{src + 1}->{dst + 1} in layer {ell + 1}")
            buckets[ell][(src, dst)] = float(weight)

        layers = []
        for bucket in buckets:
            if bucket:
                (rows, cols), data = zip(*bucket.keys()), list(bucket.values())
            else:
                rows, cols, data = (), (), []
            layers.append(sp.csr_matrix((data, (rows, cols)), shape=(n_vertices, n_vertices)))
        return cls(layers, **labels)

    # ----------------------------------------------------------------- accessors

    @property
    def n_vertices(self) -> int:
        return self._n

    @property
    def n_layers(self) -> int:
        return len(self._layers)

    @property
    def layers(self) -> Tuple[sp.csr_matrix, ...]:
        return self._layers

    @property
    def undirected(self) -> Tuple[bool, ...]:
        return self._undirected

    @property
    def vertex_labels(self) -> Tuple[str, ...]:
        return self._vertex_labels

    @property
    def layer_labels(self) -> Tuple[str, ...]:
        return self._layer_labels

    def layer(self, ell: int) -> sp.csr_matrix:
        return self._layers[ell]

    def dense_layer(self, ell: int) -> np.ndarray:
        return self._layers[ell].toarray()

    def weight(self, i: int, j: int, ell: int) -> float:
        return float(self._layers[ell][i, j])

    def edge_arrays(self, ell: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, dst, weight) arrays of one layer"""
        coo = self._layers[ell].tocoo()
        return coo.row.astype(np.intp), coo.col.astype(np.intp), coo.data.copy()

    def edges(self, ell: Optional[int] = None) -> Iterator[Edge]:
        layers = range(self.n_layers) if ell is None else (ell,)
        for layer in layers:
            src, dst, weights = self.edge_arrays(layer)
            for i, j, w in zip(src, dst, weights):
                yield layer, int(i), int(j), float(w)

    def edge_counts(self) -> List[int]:
        """Number of directed arcs per layer"""
        return [int(m.nnz) for m in self._layers]

    def edge_total(self) -> int:
        """Edges counted once per undirected pair in undirected layers"""
        total = 0
        for matrix, undirected in zip(self._layers, self._undirected):
            total += matrix.nnz // 2 if undirected else matrix.nnz
        return total

    # ----------------------------------------------------------------- modifiers

    def with_weights(self, updates: Iterable[Edge]) -> "MultiplexNetwork":
        """New network with (layer, i, j, weight) entries overwritten; weight 0 removes"""
        layers = [m.tolil(copy=True) for m in self._layers]
        for ell, i, j, weight in updates:
            if i == j:
                raise InvalidNetworkError("self loops are not allowed")
            layers[ell][i, j] = float(weight)
        return MultiplexNetwork(layers, vertex_labels=self._vertex_labels,
                                layer_labels=self._layer_labels)

    def without_edges(self, edges: Iterable[Tuple[int, int, int]]) -> "MultiplexNetwork":
        return self.with_weights((ell, i, j, 0.0) for ell, i, j in edges)

    def subnetwork(self, vertices: Sequence[int]) -> "MultiplexNetwork":
        """Induced multiplex on the given vertices (in the given order), labels kept"""
        vertices = np.asarray(vertices, dtype=np.intp)
        layers = [m[vertices][:, vertices] for m in self._layers]
        labels = [self._vertex_labels[v] for v in vertices]
        return MultiplexNetwork(layers, vertex_labels=labels, layer_labels=self._layer_labels)

    # -------------------------------------------------------------------- dunder

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiplexNetwork):
            return NotImplemented
        if (self.n_vertices, self.n_layers) != (other.n_vertices, other.n_layers):
            return False
        if self._vertex_labels != other._vertex_labels or self._layer_labels != other._layer_labels:
            return False
        return all((a != b).nnz == 0 for a, b in zip(self._layers, other._layers))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"MultiplexNetwork(n_vertices={self.n_vertices}, n_layers={self.n_layers}, "
                f"arcs={sum(self.edge_counts())})")


@dataclass(frozen=True)
class PathTensor:
    """Layer weights with absent edges set to +inf and a zero diagonal, shape (N, N, L)"""

    values: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.values.shape[0]

    @property
    def n_layers(self) -> int:
        return self.values.shape[2]

    def layer(self, ell: int) -> np.ndarray:
        return self.values[:, :, ell]


@dataclass(frozen=True)
class SupraMatrix:
    """B(gamma): layer adjacencies on the diagonal blocks, gamma*I elsewhere"""

    matrix: sp.csr_matrix
    n_vertices: int
    n_layers: int
    gamma: float

    def block(self, a: int, b: int) -> np.ndarray:
        n = self.n_vertices
        return self.matrix[a * n:(a + 1) * n, b * n:(b + 1) * n].toarray()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True)
class AggregateStructure:
    """A_plus = sum of the layer adjacencies and its support S_plus"""

    total: np.ndarray
    support: np.ndarray


def build_path_tensor(net: MultiplexNetwork) -> PathTensor:
    n, n_layers = net.n_vertices, net.n_layers
    values = np.full((n, n, n_layers), np.inf)
    for ell in range(n_layers):
        src, dst, weights = net.edge_arrays(ell)
        values[src, dst, ell] = weights
    diag = np.arange(n)
    values[diag, diag, :] = 0.0
    values.setflags(write=False)
    return PathTensor(values)


def supra_matrix(net: MultiplexNetwork, gamma=0.0,
                 keep_zero_coupling: bool = False) -> SupraMatrix:
    """
    Supra-adjacency matrix of the multiplex.

    With ``keep_zero_coupling`` the inter-layer arcs are stored even when gamma == 0
    (explicit zeros), which is what graph searches over B need.
    """
    gamma = as_gamma(gamma)
    n, n_layers = net.n_vertices, net.n_layers
    blocks = sp.block_diag(net.layers, format="coo")

    rows, cols, data = [blocks.row], [blocks.col], [blocks.data]
    if n_layers > 1:
        pattern = sp.csr_matrix(np.ones((n_layers, n_layers)) - np.eye(n_layers))
        coupling = sp.kron(pattern, sp.identity(n), format="coo")
        rows.append(coupling.row)
        cols.append(coupling.col)
        data.append(gamma * coupling.data)

    size = n * n_layers
    matrix = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(size, size))
    if not keep_zero_coupling:
        matrix.eliminate_zeros()
    return SupraMatrix(matrix=matrix, n_vertices=n, n_layers=n_layers, gamma=gamma)


def aggregate(net: MultiplexNetwork) -> AggregateStructure:
    total = np.zeros((net.n_vertices, net.n_vertices))
    for matrix in net.layers:
        total += matrix.toarray()
    support = total > 0
    total.setflags(write=False)
    support.setflags(write=False)
    return AggregateStructure(total=total, support=support)


def transpose_network(net: MultiplexNetwork) -> MultiplexNetwork:
    return MultiplexNetwork([m.transpose().tocsr() for m in net.layers],
                            vertex_labels=net.vertex_labels,
                            layer_labels=net.layer_labels)
