import numpy as np
import pytest
import scipy.linalg

from multiplex_efficiency.analysis import (harmonic_centralities, reciprocal_matrix,
                                           redundancy_scan, redundant_edges)
from multiplex_efficiency.errors import (InvalidNetworkError, ReducibleMatrixError,
                                         SelectionError)
from multiplex_efficiency.network import MultiplexNetwork, aggregate, build_path_tensor
from multiplex_efficiency.paths import k_path_gamma
from multiplex_efficiency.perturbation import (HARMONIC, PERRON, apply_strengthening,
                                               efficiency_profile, enhancement_report,
                                               lower_bound_chain, perron_triple,
                                               select_edge_harmonic, select_edge_perron,
                                               strengthening_updates)


def _select(net, gamma, k, method=HARMONIC):
    pt = build_path_tensor(net)
    res = k_path_gamma(net, pt, gamma, k)
    redundancy = redundant_edges(net, pt, gamma, res)
    recip = reciprocal_matrix(res)
    support = aggregate(net).support
    if method == HARMONIC:
        h_in, h_out = harmonic_centralities(recip)
        return select_edge_harmonic(h_in, h_out, support, redundancy.nonredundant_mask)
    return select_edge_perron(perron_triple(recip), support, redundancy.nonredundant_mask)


def _strengthen(net, gamma, k, pair):
    pt = build_path_tensor(net)
    res = k_path_gamma(net, pt, gamma, k)
    redundancy = redundant_edges(net, pt, gamma, res)
    return apply_strengthening(net, [pair], gamma, res, redundancy)


# -------------------------------------------------------------- Perron vectors

def test_perron_of_swap_matrix():
    triple = perron_triple([[0.0, 1.0], [1.0, 0.0]])
    assert triple.rho == pytest.approx(1.0)
    np.testing.assert_allclose(triple.x, [1 / np.sqrt(2)] * 2)
    np.testing.assert_allclose(triple.y, [1 / np.sqrt(2)] * 2)


def test_perron_matches_dense_eigensolver():
    m = np.array([[0.0, 2.0, 1.0], [1.0, 0.0, 3.0], [2.0, 1.0, 0.0]])
    triple = perron_triple(m)
    values, left, right = scipy.linalg.eig(m, left=True, right=True)
    top = np.argmax(values.real)
    assert triple.rho == pytest.approx(values[top].real, rel=1e-10)
    x = np.abs(right[:, top].real)
    y = np.abs(left[:, top].real)
    np.testing.assert_allclose(triple.x, x / np.linalg.norm(x), atol=1e-9)
    np.testing.assert_allclose(triple.y, y / np.linalg.norm(y), atol=1e-9)
    assert np.all(triple.x > 0) and np.all(triple.y > 0)


@pytest.mark.parametrize("scale", [1.0, 750.0])
def test_perron_residual_is_the_one_reached(scale):
    m = scale * np.array([[0.0, 2.0, 1.0], [1.0, 0.0, 3.0], [2.0, 1.0, 0.0]])
    triple = perron_triple(m)
    right = np.linalg.norm(m @ triple.x - triple.rho * triple.x)
    assert right <= triple.residual + 1e-14 * scale
    assert triple.residual <= 1e-12 * max(1.0, triple.rho)


def test_perron_rejects_zero_matrix():
    with pytest.raises(ReducibleMatrixError):
        perron_triple(np.zeros((3, 3)))


def test_perron_rejects_reducible_matrix():
    with pytest.raises(ReducibleMatrixError, match="reducible"):
        perron_triple([[0.0, 1.0], [0.0, 0.0]])


def test_perron_rejects_negative_entries():
    with pytest.raises(InvalidNetworkError):
        perron_triple([[0.0, -1.0], [1.0, 0.0]])


# ------------------------------------------------------------------ selection

@pytest.mark.parametrize("gamma", [0.0, 0.25, 0.4])
@pytest.mark.parametrize("k", [1, 2])
def test_harmonic_picks_station_3_to_4(shuttle, gamma, k):
    assert _select(shuttle, gamma, k).pairs == [(2, 3)]


@pytest.mark.parametrize("gamma", [0.5, 0.75, 1.0])
def test_harmonic_ties_above_half(shuttle, gamma):
    assert _select(shuttle, gamma, 2).pairs == [(1, 0), (2, 0), (2, 3)]


def test_perron_picks_station_3_to_4(shuttle):
    recommendation = _select(shuttle, 0.0, 2, method=PERRON)
    assert recommendation.method == PERRON
    assert recommendation.pairs == [(2, 3)]


def test_selection_is_scale_invariant(shuttle):
    pt = build_path_tensor(shuttle)
    res = k_path_gamma(shuttle, pt, 0.5, 2)
    mask = redundant_edges(shuttle, pt, 0.5, res).nonredundant_mask
    support = aggregate(shuttle).support
    h_in, h_out = harmonic_centralities(reciprocal_matrix(res))
    plain = select_edge_harmonic(h_in, h_out, support, mask)
    scaled = select_edge_harmonic(3.0 * h_in, 7.0 * h_out, support, mask)
    assert plain.pairs == scaled.pairs
    assert scaled.score == pytest.approx(21.0 * plain.score)


def test_selection_skips_pairs_without_an_edge(shuttle):
    # vertex 1 -> 4 would score highest on h_in(1) h_out(4) but has no edge
    recommendation = _select(shuttle, 0.0, 2)
    assert (0, 3) not in recommendation.pairs


def test_selection_without_admissible_pair(shuttle):
    mask = np.zeros((4, 4, 3), dtype=bool)
    with pytest.raises(SelectionError):
        select_edge_harmonic(np.ones(4), np.ones(4), aggregate(shuttle).support, mask)


# -------------------------------------------------------------- strengthening

def test_strengthening_updates_both_layers(shuttle):
    pt = build_path_tensor(shuttle)
    res = k_path_gamma(shuttle, pt, 0.0, 2)
    changes = strengthening_updates(shuttle, (2, 3), redundant_edges(shuttle, pt, 0.0, res))
    assert changes == [(2, 3, 0, 1.0, 0.5), (2, 3, 1, 1.0, 0.5)]


def test_strengthening_skips_redundant_layer(shuttle):
    pt = build_path_tensor(shuttle)
    res = k_path_gamma(shuttle, pt, 0.0, 1)
    # 1 -> 2 in layer 1 is redundant, only the layer 2 edge is halved
    changes = strengthening_updates(shuttle, (0, 1), redundant_edges(shuttle, pt, 0.0, res))
    assert changes == [(0, 1, 1, 0.5, 0.25)]


def test_strengthening_mirrors_undirected_layers():
    sym = np.array([[0, 1, 0], [1, 0, 2], [0, 2, 0]], dtype=float)
    net = MultiplexNetwork.from_dense([sym])
    changes = strengthening_updates(net, (1, 2), redundancy_scan(net, 0.0))
    assert changes == [(1, 2, 0, 2.0, 1.0), (2, 1, 0, 2.0, 1.0)]


@pytest.mark.parametrize("factor", [0.0, 1.0, 1.5, -0.5])
def test_strengthening_factor_range(shuttle, factor):
    pt = build_path_tensor(shuttle)
    res = k_path_gamma(shuttle, pt, 0.0, 1)
    with pytest.raises(InvalidNetworkError):
        strengthening_updates(shuttle, (2, 3), redundant_edges(shuttle, pt, 0.0, res), factor)


def test_strengthening_pair_without_edge(shuttle):
    pt = build_path_tensor(shuttle)
    res = k_path_gamma(shuttle, pt, 0.0, 1)
    with pytest.raises(SelectionError):
        strengthening_updates(shuttle, (0, 3), redundant_edges(shuttle, pt, 0.0, res))


@pytest.mark.parametrize("gamma, k, expected", [
    (0.0, 1, 1.3056), (0.0, 2, 1.5556), (0.25, 2, 1.5389),
])
def test_efficiency_after_strengthening_3_to_4(shuttle, gamma, k, expected):
    perturbed, recommendation = _strengthen(shuttle, gamma, k, (2, 3))
    assert round(recommendation.efficiency_after, 4) == expected
    assert recommendation.gain > 0
    assert perturbed.weight(2, 3, 0) == 0.5
    assert shuttle.weight(2, 3, 0) == 1.0


@pytest.mark.parametrize("gamma, expected", [(0.5, 1.6083), (0.75, 1.5972), (1.0, 1.5972)])
def test_efficiency_after_strengthening_3_to_1(shuttle, gamma, expected):
    _, recommendation = _strengthen(shuttle, gamma, 2, (2, 0))
    assert round(recommendation.efficiency_after, 4) == expected
    assert round(recommendation.efficiency_before, 4) == 1.4028


@pytest.mark.parametrize("gamma", [0.5, 0.75])
def test_efficiency_after_strengthening_2_to_1(shuttle, gamma):
    # the layer-2 route 4 -> 2 -> 1 benefits without any switch
    _, recommendation = _strengthen(shuttle, gamma, 2, (1, 0))
    assert round(recommendation.efficiency_after, 4) == 1.6083


def test_enhancement_report(shuttle):
    recommendation = enhancement_report(shuttle, 0.0, k=2)
    assert recommendation.method == HARMONIC
    assert recommendation.applied_pair == (2, 3)
    assert round(recommendation.efficiency_before, 4) == 1.4306
    assert round(recommendation.efficiency_after, 4) == 1.5556
    record = recommendation.to_dict()
    assert record["pairs"] == [[3, 4]]
    assert {(s["src"], s["dst"], s["layer"]) for s in record["strengthened"]} == {(3, 4, 1), (3, 4, 2)}


def test_enhancement_report_picks_a_tied_pair(shuttle):
    recommendation = enhancement_report(shuttle, 0.5, k=2, pair_index=1)
    assert recommendation.applied_pair == (2, 0)
    assert round(recommendation.efficiency_after, 4) == 1.6083


@pytest.mark.parametrize("gamma", [0.75, 1.0])
def test_default_and_second_tied_pair_at_large_switch_cost(shuttle, gamma):
    default = enhancement_report(shuttle, gamma, k=2)
    assert default.pairs == [(1, 0), (2, 0), (2, 3)]
    assert default.applied_pair == (1, 0)
    assert round(default.efficiency_after, 4) == 1.6083

    second = enhancement_report(shuttle, gamma, k=2, pair_index=1)
    assert second.applied_pair == (2, 0)
    assert round(second.efficiency_after, 4) == 1.5972


def test_enhancement_report_unknown_method(shuttle):
    with pytest.raises(InvalidNetworkError):
        enhancement_report(shuttle, 0.0, method="degree")


def test_enhancement_report_needs_strong_connectivity_for_perron():
    path = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float)
    with pytest.raises(ReducibleMatrixError):
        enhancement_report(MultiplexNetwork([path]), 0.0, method=PERRON)


# ---------------------------------------------------------------- diagnostics

@pytest.mark.parametrize("gamma", [0.0, 0.5])
def test_lower_bound_chain(shuttle, gamma):
    res = k_path_gamma(shuttle, build_path_tensor(shuttle), gamma, 2)
    chain = lower_bound_chain(reciprocal_matrix(res))
    assert chain["total"] == pytest.approx(chain["h_in_l1"])
    assert chain["total"] == pytest.approx(chain["h_out_l1"])
    assert chain["h_in_l1"] >= max(chain["norm_1"], chain["norm_inf"])
    assert max(chain["norm_1"], chain["norm_inf"]) >= chain["rho"] - 1e-9


def test_efficiency_profile(shuttle):
    profile = efficiency_profile(shuttle, 0.0)
    assert list(profile.columns) == ["k", "hk_pair", "wk_pair", "rho", "efficiency",
                                     "efficiency_after"]
    assert profile["k"].tolist() == [1, 2]
    assert profile["hk_pair"].tolist() == ["(3,4)", "(3,4)"]
    assert profile["wk_pair"].iloc[1] == "(3,4)"
    assert profile["efficiency"].round(4).tolist() == [1.2222, 1.4306]
    assert round(profile["efficiency_after"].iloc[1], 4) == 1.5556


def test_efficiency_profile_past_stationarity(shuttle):
    profile = efficiency_profile(shuttle, 0.0, ks=[2, 6])
    assert profile["k"].tolist() == [2, 6]
    assert profile["efficiency"].iloc[0] == profile["efficiency"].iloc[1]


def test_efficiency_profile_rejects_zero_budget(shuttle):
    with pytest.raises(InvalidNetworkError):
        efficiency_profile(shuttle, 0.0, ks=[0, 1])
