"""
Edge Strengthening Recommender
Chooses the index pair (h, k) whose intra-layer edges should be strengthened, either by
the product of harmonic centralities or by the largest entry of the Wilkinson
perturbation y x^T of the reciprocal K-path matrix, and measures the efficiency gain.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .analysis import (RedundancyReport, global_k_efficiency, harmonic_centralities,
                       reciprocal_matrix, redundant_edges)
from .errors import (InvalidNetworkError, PerronConvergenceError, ReducibleMatrixError,
                     SelectionError)
from .network import MultiplexNetwork, aggregate, as_gamma, build_path_tensor
from .paths import KPathResult, iter_k_paths, k_path_gamma, path_length_matrix

logger = logging.getLogger(__name__)

HARMONIC = "harmonic"
PERRON = "perron"
METHODS = (HARMONIC, PERRON)

SCORE_RTOL = 1e-12
DEFAULT_FACTOR = 0.5


@dataclass(frozen=True)
class PerronTriple:
    rho: float
    x: np.ndarray
    y: np.ndarray
    iterations: int
    residual: float


@dataclass
class Recommendation:
    """Selected pairs and, once applied, the strengthened edges and efficiency change"""

    method: str
    k: Optional[int]
    gamma: Optional[float]
    pairs: List[Tuple[int, int]]
    score: float
    applied_pair: Optional[Tuple[int, int]] = None
    strengthened: List[Tuple[int, int, int, float, float]] = field(default_factory=list)
    efficiency_before: Optional[float] = None
    efficiency_after: Optional[float] = None

    @property
    def gain(self) -> Optional[float]:
        if self.efficiency_before is None or self.efficiency_after is None:
            return None
        return self.efficiency_after - self.efficiency_before

    def to_dict(self) -> Dict:
        """1-based view used by the reports"""
        return {
            "method": self.method,
            "k": self.k,
            "gamma": self.gamma,
            "pairs": [[h + 1, k + 1] for h, k in self.pairs],
            "score": self.score,
            "applied_pair": None if self.applied_pair is None
            else [self.applied_pair[0] + 1, self.applied_pair[1] + 1],
            "strengthened": [
                {"src": h + 1, "dst": k + 1, "layer": ell + 1, "old": old, "new": new}
                for h, k, ell, old, new in self.strengthened
            ],
            "efficiency_before": self.efficiency_before,
            "efficiency_after": self.efficiency_after,
        }


# ---------------------------------------------------------------- Perron vectors

def _power_iteration(shifted: np.ndarray, m: np.ndarray, tol: float,
                     max_iter: int) -> Tuple[np.ndarray, float, int, float]:
    n = m.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    rho, residual = 0.0, np.inf
    for iteration in range(1, max_iter + 1):
        w = shifted @ v
        w /= np.linalg.norm(w)
        mw = m @ w
        rho = float(w @ mw)
        residual = float(np.linalg.norm(mw - rho * w))
        v = w
        if residual <= tol * max(1.0, rho):
            return v, rho, iteration, residual
    raise PerronConvergenceError("power iteration did not converge", x=v, y=None,
                                 residual=residual, iterations=max_iter)


def perron_triple(m, tol: float = 1e-12, max_iter: int = 100000) -> PerronTriple:
    """
    Perron root and unit right/left Perron vectors of a nonnegative irreducible matrix.

    Power iteration runs on m + I, which is primitive whenever m is irreducible.  It stops
    once ||m v - rho v|| <= tol * max(1, rho) on both sides; the larger of the two
    residuals actually reached is kept in ``PerronTriple.residual``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidNetworkError(f"expected a square matrix, got shape {m.shape}")
    if (m < 0).any() or not np.all(np.isfinite(m)):
        raise InvalidNetworkError("Perron vectors need a finite nonnegative matrix")
    if not m.any():
        raise ReducibleMatrixError("zero matrix has no positive Perron vector")
    n_components, _ = connected_components(sp.csr_matrix(m > 0), directed=True,
                                           connection="strong")
    if n_components > 1:
        raise ReducibleMatrixError(
            f"matrix is reducible ({n_components} strongly connected components); "
            "the multiplex is not strongly connected")

    shifted = m + np.eye(m.shape[0])
    x, rho, it_right, res_right = _power_iteration(shifted, m, tol, max_iter)
    try:
        y, _, it_left, res_left = _power_iteration(shifted.T.copy(), m.T.copy(), tol, max_iter)
    except PerronConvergenceError as exc:
        # the left iterate travels in y
        raise PerronConvergenceError("left power iteration did not converge", x=x, y=exc.x,
                                     residual=exc.residual, iterations=exc.iterations)

    logger.debug("Perron root %.12g after %d/%d iterations", rho, it_right, it_left)
    return PerronTriple(rho=rho, x=np.abs(x), y=np.abs(y),
                        iterations=max(it_right, it_left),
                        residual=max(res_right, res_left))


# ------------------------------------------------------------------- selection

def admissible_pairs(support: np.ndarray, nonredundant_mask: np.ndarray) -> np.ndarray:
    """Pairs joined in the aggregate and by at least one K-nonredundant edge"""
    admissible = np.asarray(support, dtype=bool) & np.asarray(nonredundant_mask).any(axis=2)
    np.fill_diagonal(admissible, False)
    return admissible


def _argmax_pairs(score: np.ndarray, admissible: np.ndarray) -> Tuple[List[Tuple[int, int]], float]:
    if not admissible.any():
        raise SelectionError("no admissible pair: every candidate edge is redundant or absent")
    best = float(score[admissible].max())
    ties = admissible & np.isclose(score, best, rtol=SCORE_RTOL, atol=0.0)
    pairs = [(int(h), int(k)) for h, k in np.argwhere(ties)]
    return pairs, best


def select_edge_harmonic(h_in: np.ndarray, h_out: np.ndarray, support: np.ndarray,
                         nonredundant_mask: np.ndarray) -> Recommendation:
    score = np.outer(np.asarray(h_in, dtype=float), np.asarray(h_out, dtype=float))
    pairs, best = _argmax_pairs(score, admissible_pairs(support, nonredundant_mask))
    return Recommendation(method=HARMONIC, k=None, gamma=None, pairs=pairs, score=best)


def select_edge_perron(triple: PerronTriple, support: np.ndarray,
                       nonredundant_mask: np.ndarray) -> Recommendation:
    """Largest entry of W = y x^T, i.e. y(h) * x(k)"""
    score = np.outer(triple.y, triple.x)
    pairs, best = _argmax_pairs(score, admissible_pairs(support, nonredundant_mask))
    return Recommendation(method=PERRON, k=None, gamma=None, pairs=pairs, score=best)


# ----------------------------------------------------------------- strengthening

def strengthening_updates(net: MultiplexNetwork, pair: Tuple[int, int],
                          redundancy: RedundancyReport,
                          factor: float = DEFAULT_FACTOR) -> List[Tuple[int, int, int, float, float]]:
    """(h, k, layer, old, new) for every K-nonredundant edge of the pair, mirrored in undirected layers"""
    if not 0.0 < factor < 1.0:
        raise InvalidNetworkError(f"strengthening factor must lie in (0, 1), got {factor}")
    h, k = pair
    changes = []
    for ell in range(net.n_layers):
        old = net.weight(h, k, ell)
        if old <= 0 or not redundancy.nonredundant_mask[h, k, ell]:
            continue
        changes.append((h, k, ell, old, old * factor))
        if net.undirected[ell]:
            back = net.weight(k, h, ell)
            changes.append((k, h, ell, back, back * factor))
    if not changes:
        raise SelectionError(f"pair ({h + 1},{k + 1}) has no K-nonredundant edge to strengthen")
    return changes


def apply_strengthening(net: MultiplexNetwork, pairs: Sequence[Tuple[int, int]], gamma,
                        res: KPathResult, redundancy: RedundancyReport,
                        factor: float = DEFAULT_FACTOR, pair_index: int = 0,
                        at_fixed_point: bool = False) -> Tuple[MultiplexNetwork, Recommendation]:
    """
    Scale the K-nonredundant edges of one selected pair by ``factor``.

    The efficiency after is evaluated with the same edge budget as ``res``, or at the
    perturbed network's own fixed point when ``at_fixed_point`` is set.
    """
    gamma = as_gamma(gamma)
    if not pairs:
        raise SelectionError("no pair to strengthen")
    pair = tuple(pairs[pair_index])
    changes = strengthening_updates(net, pair, redundancy, factor)
    perturbed = net.with_weights((ell, i, j, new) for i, j, ell, _, new in changes)

    before = global_k_efficiency(reciprocal_matrix(res))
    if at_fixed_point:
        after_res, _ = path_length_matrix(perturbed, None, gamma)
    else:
        after_res = k_path_gamma(perturbed, build_path_tensor(perturbed), gamma, res.k)
    after = global_k_efficiency(reciprocal_matrix(after_res))

    logger.info("strengthened pair (%d,%d) in %d arc(s): efficiency %.7g -> %.7g",
                pair[0] + 1, pair[1] + 1, len(changes), before, after)
    recommendation = Recommendation(
        method="", k=res.k, gamma=gamma, pairs=[tuple(p) for p in pairs], score=float("nan"),
        applied_pair=pair, strengthened=changes,
        efficiency_before=before, efficiency_after=after)
    return perturbed, recommendation


def enhancement_report(net: MultiplexNetwork, gamma, k: Optional[int] = None,
                       method: str = HARMONIC, factor: float = DEFAULT_FACTOR,
                       tol: float = 1e-12, max_iter: int = 100000,
                       pair_index: int = 0) -> Recommendation:
    """
    Full pipeline: P^K, selection by ``method``, strengthening, efficiency before/after.

    k=None works at the fixed point of both the original and the perturbed network.
    """
    if method not in METHODS:
        raise InvalidNetworkError(f"unknown method {method!r}; expected one of {METHODS}")
    gamma = as_gamma(gamma)
    pt = build_path_tensor(net)
    if k is None:
        fixed, fixed_point_k = path_length_matrix(net, pt, gamma)
        res = fixed.relabel(fixed_point_k)
    else:
        res = k_path_gamma(net, pt, gamma, k)

    redundancy = redundant_edges(net, pt, gamma, res, is_fixed_point=k is None)
    recip = reciprocal_matrix(res)
    support = aggregate(net).support
    if method == HARMONIC:
        h_in, h_out = harmonic_centralities(recip)
        selected = select_edge_harmonic(h_in, h_out, support, redundancy.nonredundant_mask)
    else:
        selected = select_edge_perron(perron_triple(recip, tol, max_iter), support,
                                      redundancy.nonredundant_mask)

    _, applied = apply_strengthening(net, selected.pairs, gamma, res, redundancy, factor,
                                     pair_index=pair_index, at_fixed_point=k is None)
    applied.method = method
    applied.score = selected.score
    return applied


# --------------------------------------------------------------- diagnostics

def lower_bound_chain(recip: np.ndarray, triple: Optional[PerronTriple] = None) -> Dict[str, float]:
    """
    The quantities both selection rules bound from below:

    N(N-1) e^K = |h_in|_1 = |h_out|_1 >= max(|P_-1|_1, |P_-1|_inf) >= rho_K
    """
    recip = np.array(recip, dtype=float)
    np.fill_diagonal(recip, 0.0)
    h_in, h_out = harmonic_centralities(recip)
    if triple is None:
        triple = perron_triple(recip)
    return {
        "total": float(np.sum(recip)),
        "h_in_l1": float(np.sum(h_in)),
        "h_out_l1": float(np.sum(h_out)),
        "norm_1": float(h_in.max()),
        "norm_inf": float(h_out.max()),
        "rho": triple.rho,
    }


def _format_pairs(pairs: Sequence[Tuple[int, int]]) -> str:
    return ";".join(f"({h + 1},{k + 1})" for h, k in pairs)


def efficiency_profile(net: MultiplexNetwork, gamma, ks: Optional[Sequence[int]] = None,
                       factor: float = DEFAULT_FACTOR, tol: float = 1e-12,
                       max_iter: int = 100000) -> pd.DataFrame:
    """
    Per edge budget K: the harmonic pair, the Perron pair, e^K and e^K after strengthening
    the Perron pair.  ks=None covers K = 1 .. fixed point.
    """
    gamma = as_gamma(gamma)
    pt = build_path_tensor(net)
    support = aggregate(net).support
    if ks is None:
        _, fixed_point_k = path_length_matrix(net, pt, gamma)
        ks = range(1, fixed_point_k + 1)
    ks = sorted(set(ks))
    if not ks or ks[0] < 1:
        raise InvalidNetworkError(f"edge budgets must be >= 1, got {list(ks)}")

    computed = {}
    last = None
    for last in iter_k_paths(net, gamma, ks[-1], pt):
        computed[last.k] = last

    rows = []
    for k in ks:
        # past stationarity every budget repeats the last table
        res = computed[k] if k in computed else last.relabel(k)
        redundancy = redundant_edges(net, pt, gamma, res)
        recip = reciprocal_matrix(res)
        h_in, h_out = harmonic_centralities(recip)
        harmonic = select_edge_harmonic(h_in, h_out, support, redundancy.nonredundant_mask)
        triple = perron_triple(recip, tol, max_iter)
        perron = select_edge_perron(triple, support, redundancy.nonredundant_mask)
        _, applied = apply_strengthening(net, perron.pairs, gamma, res, redundancy, factor)
        rows.append({
            "k": k,
            "hk_pair": _format_pairs(harmonic.pairs),
            "wk_pair": _format_pairs(perron.pairs),
            "rho": triple.rho,
            "efficiency": applied.efficiency_before,
            "efficiency_after": applied.efficiency_after,
        })
    logger.info("efficiency profile over %d budget(s) at gamma=%g", len(rows), gamma)
    return pd.DataFrame(rows)
