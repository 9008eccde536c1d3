"""
Multiplex Efficiency Analysis
Redundant intra-layer edges, reciprocal K-path matrices, harmonic K-centralities and
the global K-efficiency.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import InvalidNetworkError
from .network import MultiplexNetwork, PathTensor, as_gamma, build_path_tensor
from .paths import (KPathResult, LayerStateSolver, diameter, k_path_gamma,
                    path_length_matrix)

logger = logging.getLogger(__name__)

# guard on the strict inequality of the redundancy test
BOUND_RTOL = 1e-12

REDUNDANT = "redundant"
NONREDUNDANT = "nonredundant"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class RedundantEdge:
    i: int
    j: int
    layer: int
    weight: float
    bound: float
    k_used: int

    def to_dict(self) -> Dict:
        return {
            "src": self.i + 1,
            "dst": self.j + 1,
            "layer": self.layer + 1,
            "weight": self.weight,
            "bound": self.bound,
            "k_used": self.k_used,
        }


@dataclass(frozen=True)
class RedundancyReport:
    """
    Certificates of redundancy for one budget K.

    An edge without a certificate is only known to be nonredundant when K is the
    fixed point; before that its status is undetermined.
    """

    k: int
    gamma: float
    redundant: List[RedundantEdge]
    nonredundant_mask: np.ndarray
    is_fixed_point: bool = False

    def status(self, i: int, j: int, ell: int) -> Optional[str]:
        """None when there is no edge i -> j in layer ell"""
        if self.nonredundant_mask[i, j, ell]:
            return NONREDUNDANT if self.is_fixed_point else UNDETERMINED
        if any(e.i == i and e.j == j and e.layer == ell for e in self.redundant):
            return REDUNDANT
        return None

    def flagged(self) -> set:
        return {(e.i, e.j, e.layer) for e in self.redundant}

    def undirected_groups(self, net: MultiplexNetwork) -> List[Tuple[RedundantEdge, ...]]:
        """Both directions of an undirected layer edge reported together when both are flagged"""
        by_key = {(e.i, e.j, e.layer): e for e in self.redundant}
        groups, used = [], set()
        for key in sorted(by_key):
            if key in used:
                continue
            i, j, ell = key
            mirror = (j, i, ell)
            if net.undirected[ell] and mirror in by_key:
                groups.append((by_key[key], by_key[mirror]))
                used.update({key, mirror})
            else:
                groups.append((by_key[key],))
                used.add(key)
        return groups


@dataclass(frozen=True)
class EfficiencyReport:
    k: int
    gamma: float
    efficiency: float
    h_in: np.ndarray
    h_out: np.ndarray
    diameter: float
    fixed_point_k: Optional[int] = None
    diameter_pairs: List[Tuple[int, int]] = field(default_factory=list)
    disconnected: bool = False


def reciprocal_matrix(res) -> np.ndarray:
    """Off-diagonal reciprocals of P^K with 1/inf := 0"""
    p = res.p if isinstance(res, KPathResult) else np.asarray(res, dtype=float)
    with np.errstate(divide="ignore"):
        recip = 1.0 / p
    recip[~np.isfinite(recip)] = 0.0
    np.fill_diagonal(recip, 0.0)
    return recip


def harmonic_centralities(recip: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(h_in, h_out): column and row sums of the reciprocal matrix"""
    recip = np.array(recip, dtype=float)
    np.fill_diagonal(recip, 0.0)
    h_out = np.array([math.fsum(row) for row in recip])
    h_in = np.array([math.fsum(col) for col in recip.T])
    return h_in, h_out


def global_k_efficiency(recip: np.ndarray) -> float:
    recip = np.array(recip, dtype=float)
    n = recip.shape[0]
    if n < 2:
        raise InvalidNetworkError("global efficiency needs at least two vertices")
    np.fill_diagonal(recip, 0.0)
    return math.fsum(recip.ravel()) / (n * (n - 1))


def redundant_edges(net: MultiplexNetwork, pt: Optional[PathTensor], gamma,
                    res: KPathResult, is_fixed_point: bool = False) -> RedundancyReport:
    """
    Flag edge (i, j, l) when its weight exceeds p^K_ij + gamma*(d_s + d_a), where d_s
    (d_a) is 0 iff l is among the start (arrival) layers of the optimal K-paths.
    """
    gamma = as_gamma(gamma)
    if not np.isclose(gamma, res.gamma, rtol=0.0, atol=0.0):
        raise InvalidNetworkError(f"K-path result was computed for gamma={res.gamma}, not {gamma}")
    if pt is None:
        pt = build_path_tensor(net)

    mask = np.zeros((net.n_vertices, net.n_vertices, net.n_layers), dtype=bool)
    flagged: List[RedundantEdge] = []
    for ell in range(net.n_layers):
        src, dst, weights = net.edge_arrays(ell)
        if src.size == 0:
            continue
        delta_s = ~res.start[src, dst, ell]
        delta_a = ~res.arrival[src, dst, ell]
        bound = res.p[src, dst] + gamma * (delta_s.astype(float) + delta_a.astype(float))
        hits = weights > bound + BOUND_RTOL * np.maximum(1.0, bound)
        mask[src[~hits], dst[~hits], ell] = True
        for i, j, w, b in zip(src[hits], dst[hits], weights[hits], bound[hits]):
            flagged.append(RedundantEdge(int(i), int(j), ell, float(w), float(b), res.k))

    flagged.sort(key=lambda e: (e.layer, e.i, e.j))
    logger.info("redundancy at K=%d, gamma=%g: %d edge(s) flagged", res.k, gamma, len(flagged))
    return RedundancyReport(k=res.k, gamma=gamma, redundant=flagged,
                            nonredundant_mask=mask, is_fixed_point=is_fixed_point)


def redundancy_scan(net: MultiplexNetwork, gamma, k_max: Optional[int] = None) -> RedundancyReport:
    """
    Evaluate the test for K = 1, 2, ... up to the fixed point (or k_max).

    A certificate, once issued, is kept: it proves a strictly cheaper in-layer route
    exists.  ``k_used`` is the first K that produced it.
    """
    gamma = as_gamma(gamma)
    if k_max is None:
        k_max = max(1, net.n_vertices - 1)
    if k_max < 1:
        raise InvalidNetworkError(f"k_max must be >= 1, got {k_max}")

    pt = build_path_tensor(net)
    solver = LayerStateSolver(net, gamma, pt)
    certified: Dict[Tuple[int, int, int], RedundantEdge] = {}
    while True:
        report = redundant_edges(net, pt, gamma, solver.result())
        for edge in report.redundant:
            certified.setdefault((edge.i, edge.j, edge.layer), edge)
        if solver.stationary or solver.k >= k_max:
            break
        solver.step()

    # optimal walks are simple, so N-1 edges always reach the fixed point
    reached_fixed_point = solver.stationary or solver.k >= net.n_vertices - 1
    mask = np.zeros((net.n_vertices, net.n_vertices, net.n_layers), dtype=bool)
    for ell, i, j, _ in net.edges():
        if (i, j, ell) not in certified:
            mask[i, j, ell] = True
    flagged = sorted(certified.values(), key=lambda e: (e.layer, e.i, e.j))
    logger.info("redundancy scan to K=%d, gamma=%g: %d edge(s) certified redundant",
                solver.k, gamma, len(flagged))
    return RedundancyReport(k=solver.k, gamma=gamma, redundant=flagged,
                            nonredundant_mask=mask, is_fixed_point=reached_fixed_point)


def efficiency_report(net: MultiplexNetwork, gamma, k: Optional[int] = None) -> EfficiencyReport:
    """e^K, centralities and diameter; k=None means the fixed point"""
    gamma = as_gamma(gamma)
    pt = build_path_tensor(net)
    fixed, fixed_point_k = path_length_matrix(net, pt, gamma)
    res = fixed.relabel(fixed_point_k) if k is None else k_path_gamma(net, pt, gamma, k)

    recip = reciprocal_matrix(res)
    h_in, h_out = harmonic_centralities(recip)
    diam = diameter(fixed)
    return EfficiencyReport(
        k=res.k,
        gamma=gamma,
        efficiency=global_k_efficiency(recip),
        h_in=h_in,
        h_out=h_out,
        diameter=diam.value,
        fixed_point_k=fixed_point_k,
        diameter_pairs=diam.pairs,
        disconnected=diam.disconnected,
    )


def efficiency_table(net: MultiplexNetwork, gammas: Sequence[float],
                     ks: Optional[Iterable[int]] = None) -> pd.DataFrame:
    """
    Global K-efficiency over a gamma grid (rows) and K values (columns ``e^K``).

    ks=None gives a single ``e`` column at the fixed point.
    """
    pt = build_path_tensor(net)
    rows = []
    for gamma in gammas:
        gamma = as_gamma(gamma)
        row = {"gamma": gamma}
        if ks is None:
            fixed, fixed_point_k = path_length_matrix(net, pt, gamma)
            row["e"] = global_k_efficiency(reciprocal_matrix(fixed))
            row["fixed_point_k"] = fixed_point_k
        else:
            for k in ks:
                row[f"e^{k}"] = global_k_efficiency(reciprocal_matrix(k_path_gamma(net, pt, gamma, k)))
        rows.append(row)
    return pd.DataFrame(rows)
