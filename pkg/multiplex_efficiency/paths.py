"""
Multiplex K-Path Length Matrices
Min-plus powers for gamma == 0, the layer-state dynamic program for gamma >= 0,
arrival/start layer sets, the fixed point P, the diameter and the supra-graph
Dijkstra oracle used to cross-check everything.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import InvalidNetworkError
from .network import (MultiplexNetwork, PathTensor, as_gamma, build_path_tensor,
                      supra_matrix, transpose_network)

logger = logging.getLogger(__name__)

# relative tolerance used to decide that two path lengths are tied
TIE_RTOL = 1e-12


def _ties(values: np.ndarray, best: np.ndarray) -> np.ndarray:
    """Entries of ``values`` equal (up to TIE_RTOL) to the finite ``best`` along the last axis"""
    best = best[..., None]
    return np.isfinite(best) & np.isclose(values, best, rtol=TIE_RTOL, atol=0.0)


def _clear_diagonal(mask: np.ndarray) -> np.ndarray:
    diag = np.arange(mask.shape[0])
    mask[diag, diag, :] = False
    return mask


@dataclass(frozen=True)
class KPathResult:
    """
    Multiplex K-path length matrix with its layer sets.

    ``arrival[i, j, l]`` is True when layer l carries the last intra-layer edge of some
    optimal path from i to j using at most k edges; ``start`` is the same for first edges.
    """

    k: int
    gamma: float
    p: np.ndarray
    arrival: np.ndarray
    start: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.p.shape[0]

    @property
    def n_layers(self) -> int:
        return self.arrival.shape[2]

    def arrival_layers(self, i: int, j: int) -> FrozenSet[int]:
        return frozenset(int(ell) for ell in np.flatnonzero(self.arrival[i, j]))

    def start_layers(self, i: int, j: int) -> FrozenSet[int]:
        return frozenset(int(ell) for ell in np.flatnonzero(self.start[i, j]))

    def same_as(self, other: "KPathResult") -> bool:
        """Identical matrix and layer sets (the fixed-point test)"""
        return (np.array_equal(self.p, other.p)
                and np.array_equal(self.arrival, other.arrival)
                and np.array_equal(self.start, other.start))

    def relabel(self, k: int) -> "KPathResult":
        return KPathResult(k=k, gamma=self.gamma, p=self.p, arrival=self.arrival, start=self.start)


@dataclass(frozen=True)
class DiameterReport:
    value: float
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    disconnected: bool = False

    def unordered_pairs(self) -> List[Tuple[int, int]]:
        seen = sorted({tuple(sorted(pair)) for pair in self.pairs})
        return [(int(a), int(b)) for a, b in seen]


def one_path_matrix(pt: PathTensor, gamma=0.0) -> KPathResult:
    """P^1: cheapest single intra-layer edge per pair; independent of gamma"""
    gamma = as_gamma(gamma)
    p1 = pt.values.min(axis=2)
    sets = _clear_diagonal(_ties(pt.values, p1))
    return KPathResult(k=1, gamma=gamma, p=p1, arrival=sets, start=sets.copy())


def k_path_minplus_power(prev: KPathResult, p1: KPathResult) -> KPathResult:
    """
    P^K = P^(K-1) * P^1 in the (min, +) semiring, with the layer sets carried along.

    Only valid without switching cost: the gamma == 0 specialisation.
    """
    if prev.gamma != 0 or p1.gamma != 0:
        raise InvalidNetworkError("the min-plus power is only defined for gamma == 0")
    if p1.k != 1:
        raise InvalidNetworkError("the second operand must be the 1-path result")

    n = prev.n_vertices
    diag = np.arange(n)
    p = np.empty_like(prev.p)
    arrival = np.zeros_like(prev.arrival)
    start = np.zeros_like(prev.start)

    for i in range(n):
        # cand[h, j]: best i -> h prefix followed by the cheapest edge h -> j
        cand = prev.p[i][:, None] + p1.p
        row = cand.min(axis=0)
        hits = np.isfinite(cand) & np.isclose(cand, row[None, :], rtol=TIE_RTOL, atol=0.0)

        arr = (hits[:, :, None] & p1.arrival).any(axis=0)
        arr |= hits[diag, diag][:, None] & prev.arrival[i]

        st = (hits[:, :, None] & prev.start[i][:, None, :]).any(axis=0)
        st |= hits[i][:, None] & p1.start[i]

        row[i] = 0.0
        arr[i] = False
        st[i] = False
        p[i], arrival[i], start[i] = row, arr, st

    return KPathResult(k=prev.k + 1, gamma=0.0, p=p, arrival=arrival, start=start)


class _LayerGroups:
    """Edges of every layer sorted by head vertex, ready for ``np.minimum.reduceat``"""

    def __init__(self, net: MultiplexNetwork):
        self.groups = []
        for ell in range(net.n_layers):
            src, dst, weights = net.edge_arrays(ell)
            if src.size == 0:
                self.groups.append(None)
                continue
            order = np.argsort(dst, kind="stable")
            src, dst, weights = src[order], dst[order], weights[order]
            heads, starts = np.unique(dst, return_index=True)
            self.groups.append((src, weights, heads, starts))


def _relax(table: np.ndarray, groups: _LayerGroups, gamma: float) -> np.ndarray:
    """
    One more intra-layer edge for every (source, target, last layer) state.

    A state may continue in its own layer for free or in another layer for gamma;
    the source's own state is 0 in every layer, so the first edge is never charged.
    """
    best = table.min(axis=2)
    entry = np.minimum(table, best[:, :, None] + gamma)
    updated = table.copy()
    for ell, group in enumerate(groups.groups):
        if group is None:
            continue
        src, weights, heads, starts = group
        cand = entry[:, src, ell] + weights[None, :]
        reached = np.minimum.reduceat(cand, starts, axis=1)
        updated[:, heads, ell] = np.minimum(updated[:, heads, ell], reached)
    return updated


class LayerStateSolver:
    """
    Layer-state tables for every source, forward and on the transposed multiplex.

    ``table[s, j, l]`` is the length of a shortest walk s -> j with at most ``k``
    intra-layer edges whose last edge lies in layer l.  Start-layer sets of s -> j are
    the arrival-layer sets of j -> s in the transpose.
    """

    def __init__(self, net: MultiplexNetwork, gamma=0.0, pt: Optional[PathTensor] = None):
        self.gamma = as_gamma(gamma)
        pt = pt if pt is not None else build_path_tensor(net)
        if pt.values.shape != (net.n_vertices, net.n_vertices, net.n_layers):
            raise InvalidNetworkError("path tensor does not match the network")
        self.k = 1
        self.forward = np.array(pt.values, copy=True)
        self.backward = np.ascontiguousarray(pt.values.transpose(1, 0, 2))
        self._forward_groups = _LayerGroups(net)
        self._backward_groups = _LayerGroups(transpose_network(net))
        self.stationary = False

    def step(self) -> bool:
        """Advance k by one; returns True when nothing changed (global fixed point)"""
        forward = _relax(self.forward, self._forward_groups, self.gamma)
        backward = _relax(self.backward, self._backward_groups, self.gamma)
        self.stationary = (np.array_equal(forward, self.forward)
                           and np.array_equal(backward, self.backward))
        self.forward, self.backward = forward, backward
        self.k += 1
        return self.stationary

    def result(self) -> KPathResult:
        p = self.forward.min(axis=2)
        arrival = _clear_diagonal(_ties(self.forward, p))
        back_best = self.backward.min(axis=2)
        start = _clear_diagonal(_ties(self.backward, back_best)).transpose(1, 0, 2)
        return KPathResult(k=self.k, gamma=self.gamma, p=p, arrival=arrival,
                           start=np.ascontiguousarray(start))


def iter_k_paths(net: MultiplexNetwork, gamma=0.0, k_max: Optional[int] = None,
                 pt: Optional[PathTensor] = None) -> Iterator[KPathResult]:
    """
    Yield P^1, P^2, ... until the layer-state tables stop changing or k_max is reached.

    The last result yielded is the fixed point when the tables became stationary.
    """
    if k_max is None:
        k_max = max(1, net.n_vertices - 1)
    if k_max < 1:
        raise InvalidNetworkError(f"k_max must be >= 1, got {k_max}")

    solver = LayerStateSolver(net, gamma, pt)
    yield solver.result()
    while solver.k < k_max:
        if solver.step():
            logger.debug("layer-state tables stationary at k=%d", solver.k)
            yield solver.result()
            return
        yield solver.result()


def k_path_gamma(net: MultiplexNetwork, pt: PathTensor, gamma, k: int) -> KPathResult:
    """P^k with switching cost gamma (unreachable pairs get +inf and empty sets)"""
    if k < 1:
        raise InvalidNetworkError(f"k must be >= 1, got {k}")
    solver = LayerStateSolver(net, gamma, pt)
    while solver.k < k:
        if solver.step():
            break
    return solver.result().relabel(k)


def path_length_matrix(net: MultiplexNetwork, pt: Optional[PathTensor] = None, gamma=0.0,
                       k_max: Optional[int] = None) -> Tuple[KPathResult, int]:
    """
    Iterate P^k until it stops changing (or k_max).

    Returns the final result and the smallest k with P^k equal to it.
    """
    fixed_point_k = 1
    previous = None
    result = None
    for result in iter_k_paths(net, gamma, k_max, pt):
        if previous is not None and not np.array_equal(result.p, previous.p):
            fixed_point_k = result.k
        previous = result

    logger.info("path length matrix: gamma=%g, P = P^%d (iterated to k=%d)",
                result.gamma, fixed_point_k, result.k)
    return result, fixed_point_k


def supra_dijkstra_oracle(net: MultiplexNetwork, gamma=0.0) -> np.ndarray:
    """
    Shortest path lengths computed independently on the supra graph of B(gamma).

    q[i, j] is the best distance from any copy of v_i to any copy of v_j.
    """
    gamma = as_gamma(gamma)
    supra = supra_matrix(net, gamma, keep_zero_coupling=True)
    n, n_layers = net.n_vertices, net.n_layers
    q = np.empty((n, n))
    copies = np.arange(n_layers) * n
    for i in range(n):
        dist = dijkstra(supra.matrix, directed=True, indices=copies + i)
        q[i] = dist.reshape(n_layers, n_layers, n).min(axis=(0, 1))
    np.fill_diagonal(q, 0.0)
    return q


def diameter(res: KPathResult) -> DiameterReport:
    """
    Largest finite off-diagonal entry of P, every pair attaining it.

    A single vertex has diameter 0; with no finite off-diagonal entry at all the value
    is nan and ``disconnected`` is set.
    """
    if res.n_vertices == 1:
        return DiameterReport(value=0.0, pairs=[], disconnected=False)
    p = res.p.copy()
    np.fill_diagonal(p, np.nan)
    off_diagonal = ~np.isnan(p)
    finite = off_diagonal & np.isfinite(p)
    disconnected = bool((off_diagonal & ~finite).any())
    if disconnected:
        logger.warning("multiplex is disconnected; diameter covers reachable pairs only")
    if not finite.any():
        return DiameterReport(value=float("nan"), pairs=[], disconnected=True)

    value = float(p[finite].max())
    hits = np.argwhere(finite & np.isclose(p, value, rtol=TIE_RTOL, atol=0.0))
    pairs = [(int(i), int(j)) for i, j in hits]
    return DiameterReport(value=value, pairs=pairs, disconnected=disconnected)
