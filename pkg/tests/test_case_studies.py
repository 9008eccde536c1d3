"""
Checks on the two public multiplex data sets.  The edge files are not shipped; drop them
into datasets/ to run these (``pytest -m dataset``).
"""

import re

import pytest

from multiplex_efficiency.analysis import efficiency_report, redundancy_scan
from multiplex_efficiency.data_loader import load_multiplex
from multiplex_efficiency.network import build_path_tensor
from multiplex_efficiency.paths import k_path_gamma
from multiplex_efficiency.perturbation import efficiency_profile, enhancement_report

from conftest import dataset_path

pytestmark = [pytest.mark.dataset, pytest.mark.slow]

AIRLINES = "EUAirTransportation_multiplex.edges"
SCOTLAND_YARD = "ScotlandYard_multiplex.edges"

# K -> (pair chosen by the Perron rule, e^K, e^K after strengthening it), gamma = 1, 1-based
AIRLINE_PROFILE = {
    7: ((15, 40), 3.476599e-1, 3.486327e-1),
    6: ((15, 40), 3.476567e-1, 3.486295e-1),
    5: ((15, 40), 3.474249e-1, 3.483962e-1),
    4: ((15, 40), 3.441131e-1, 3.450480e-1),
    3: ((15, 40), 3.194896e-1, 3.201297e-1),
    2: ((15, 40), 1.839298e-1, 1.840478e-1),
    1: ((15, 12), 3.404584e-2, 3.405737e-2),
}

# K -> (e^K to 4 decimals, harmonic pair, Perron pair), gamma = 1, 1-based
SCOTLAND_YARD_PROFILE = {
    20: (0.1665, (126, 114), (126, 114)),
    19: (0.1665, (126, 114), (126, 114)),
    18: (0.1665, (126, 114), (126, 114)),
    17: (0.1665, (126, 114), (126, 114)),
    16: (0.1665, (126, 114), (126, 114)),
    15: (0.1665, (126, 114), (126, 114)),
    14: (0.1664, (126, 114), (126, 114)),
    13: (0.1663, (126, 114), (126, 114)),
    12: (0.1660, (126, 114), (126, 114)),
    11: (0.1656, (126, 114), (126, 114)),
    10: (0.1647, (126, 114), (126, 114)),
    9: (0.1633, (126, 114), (126, 114)),
    8: (0.1607, (140, 126), (126, 114)),
    7: (0.1556, (140, 126), (126, 114)),
}


def _unordered(cell):
    """'(15,40);(40,15)' -> {(15, 40)}; undirected layers make both orientations tie"""
    return {tuple(sorted(map(int, pair))) for pair in re.findall(r"\((\d+),(\d+)\)", cell)}


@pytest.fixture(scope="module")
def airlines():
    return load_multiplex(dataset_path(AIRLINES), undirected=True, largest_component_only=True)


@pytest.fixture(scope="module")
def scotland_yard():
    return load_multiplex(dataset_path(SCOTLAND_YARD), undirected=True)


@pytest.fixture(scope="module")
def airline_rows(airlines):
    table = efficiency_profile(airlines, 1.0, ks=sorted(AIRLINE_PROFILE))
    return {int(row.k): row for row in table.itertuples()}


@pytest.fixture(scope="module")
def scotland_yard_rows(scotland_yard):
    table = efficiency_profile(scotland_yard, 1.0, ks=sorted(SCOTLAND_YARD_PROFILE))
    return {int(row.k): row for row in table.itertuples()}


def test_airlines_structure(airlines):
    assert airlines.n_vertices == 417
    assert airlines.n_layers == 37
    report = efficiency_report(airlines, 1.0)
    assert report.fixed_point_k == 7
    assert report.diameter == 9.0
    assert {tuple(sorted(pair)) for pair in report.diameter_pairs} == {
        (143, 412), (201, 412), (315, 412), (349, 412)}
    assert round(report.efficiency, 4) == 0.3477


def test_airlines_has_no_redundant_edges(airlines):
    assert redundancy_scan(airlines, 1.0).redundant == []


@pytest.mark.parametrize("method", ["harmonic", "perron"])
def test_airlines_schiphol_barcelona(airlines, method):
    recommendation = enhancement_report(airlines, 1.0, k=7, method=method)
    assert set(recommendation.pairs) <= {(14, 39), (39, 14)}
    assert sorted({ell + 1 for _, _, ell, _, _ in recommendation.strengthened}) == [3, 9, 21, 27]
    assert recommendation.efficiency_after == pytest.approx(0.3486327, abs=5e-7)


@pytest.mark.parametrize("k", sorted(AIRLINE_PROFILE))
def test_airlines_profile(airline_rows, k):
    pair, before, after = AIRLINE_PROFILE[k]
    row = airline_rows[k]
    assert _unordered(row.wk_pair) == {tuple(sorted(pair))}
    assert row.efficiency == pytest.approx(before, abs=1e-6)
    assert row.efficiency_after == pytest.approx(after, abs=1e-6)


def test_scotland_yard_structure(scotland_yard):
    assert scotland_yard.n_vertices == 199
    assert scotland_yard.n_layers == 4
    report = efficiency_report(scotland_yard, 1.0)
    assert report.fixed_point_k == 20
    assert report.diameter == 20.0
    assert {tuple(sorted(pair)) for pair in report.diameter_pairs} == {
        (0, 174), (7, 174), (17, 174), (17, 105)}
    assert round(report.efficiency, 4) == 0.1665


@pytest.mark.parametrize("k", sorted(SCOTLAND_YARD_PROFILE))
def test_scotland_yard_profile(scotland_yard_rows, k):
    efficiency, harmonic, perron = SCOTLAND_YARD_PROFILE[k]
    row = scotland_yard_rows[k]
    assert round(row.efficiency, 4) == efficiency
    assert _unordered(row.hk_pair) == {tuple(sorted(harmonic))}
    assert _unordered(row.wk_pair) == {tuple(sorted(perron))}


def test_scotland_yard_rules_disagree_on_short_budgets(scotland_yard_rows):
    disagree = {k for k, row in scotland_yard_rows.items()
                if _unordered(row.hk_pair) != _unordered(row.wk_pair)}
    assert disagree == {7, 8}


def test_scotland_yard_taxi_bottleneck(scotland_yard):
    recommendation = enhancement_report(scotland_yard, 1.0, method="perron")
    assert set(recommendation.pairs) <= {(125, 113), (113, 125)}
    assert [ell for _, _, ell, _, _ in recommendation.strengthened] == [3, 3]
    assert round(recommendation.efficiency_before, 4) == 0.1665
    assert round(recommendation.efficiency_after, 4) == 0.1678


def test_scotland_yard_underground_redundancy(scotland_yard):
    pt = build_path_tensor(scotland_yard)
    report = redundancy_scan(scotland_yard, 0.0)
    assert report.flagged() == {(66, 110, 1), (110, 66, 1)}
    assert all(e.k_used <= 3 for e in report.redundant)

    three = k_path_gamma(scotland_yard, pt, 0.0, 3)
    assert three.p[66, 110] == 5.0
    assert scotland_yard.weight(66, 110, 1) == 6.0


def test_scotland_yard_redundancy_disappears_with_switch_cost(scotland_yard):
    report = redundancy_scan(scotland_yard, 1.0)
    assert report.is_fixed_point
    assert (66, 110, 1) not in report.flagged()
    assert (110, 66, 1) not in report.flagged()
