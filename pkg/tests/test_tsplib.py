import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import read_opt_tour
from oracles import euc2d, tour_cost
from psoacs.tsplib import (
    BUNDLED, TspInstance, TsplibError, distance, format_instance, load_bundled,
    parse_instance,
)

MINIMAL = """NAME : tri
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
"""


def test_minimal_file():
    inst = parse_instance(MINIMAL)
    assert inst.dimension == 3
    assert inst.name == "tri"
    assert inst.tour_length([0, 1, 2]) == 12


def test_eil51_header(eil51):
    assert eil51.name == "eil51"
    assert eil51.dimension == 51
    assert tuple(eil51.coords[0]) == (37.0, 52.0)


@pytest.mark.parametrize("name,optimum", [("eil51", 426), ("eil76", 538), ("kroA100", 21282)])
def test_published_optimal_tours(name, optimum):
    # the optimum only comes out right under nint rounding
    inst = load_bundled(name)
    assert inst.tour_length(read_opt_tour(name)) == optimum


def test_all_bundled_load():
    assert [load_bundled(n).dimension for n in BUNDLED] == [51, 76, 101, 100, 100, 99]


def test_dimension_mismatch():
    text = MINIMAL.replace("DIMENSION : 3", "DIMENSION : 5")
    with pytest.raises(TsplibError, match="DIMENSION 5"):
        parse_instance(text)


@pytest.mark.parametrize("ewt", ["GEO", "ATT", "EXPLICIT", "CEIL_2D"])
def test_rejects_other_weight_types(ewt):
    with pytest.raises(TsplibError, match="line 4.*unsupported EDGE_WEIGHT_TYPE"):
        parse_instance(MINIMAL.replace("EUC_2D", ewt))


def test_missing_coord_section():
    text = MINIMAL.split("NODE_COORD_SECTION")[0]
    with pytest.raises(TsplibError, match="NODE_COORD_SECTION"):
        parse_instance(text)


def test_malformed_header_names_line():
    with pytest.raises(TsplibError, match="line 2"):
        parse_instance(MINIMAL.replace("TYPE : TSP", "TYPE TSP"))


def test_bad_coordinate_line():
    with pytest.raises(TsplibError, match="line 7"):
        parse_instance(MINIMAL.replace("2 3 0", "2 3"))


def test_atsp_rejected():
    with pytest.raises(TsplibError, match="TYPE"):
        parse_instance(MINIMAL.replace("TYPE : TSP", "TYPE : ATSP"))


@pytest.mark.parametrize("a,b,expected", [((0, 0), (3, 4), 5), ((0, 0), (1, 1), 1),
                                          ((0, 0), (1, 0.5), 1), ((0, 0), (2.5, 0), 3)])
def test_euc2d_rounding(a, b, expected):
    inst = TspInstance("t", np.array([a, b, (100, 100)], dtype=float))
    assert distance(inst, 0, 1) == expected == euc2d(a, b)


def test_eil51_first_pair(eil51):
    # (37, 52) to (49, 49): sqrt(153) = 12.37 -> 12
    assert eil51.distance(0, 1) == 12


def test_index_out_of_range(tiny):
    with pytest.raises(IndexError):
        tiny.distance(0, 3)
    with pytest.raises(IndexError):
        tiny.distance(-1, 0)


def test_on_demand_matches_matrix(monkeypatch, eil51):
    import psoacs.tsplib as mod
    monkeypatch.setattr(mod, "PRECOMPUTE_LIMIT", 10)
    lazy = TspInstance("lazy", eil51.coords)
    assert lazy._matrix is None
    assert all(lazy.distance(i, j) == eil51.distance(i, j) for i in range(51) for j in range(51))
    np.testing.assert_array_equal(lazy.distance_matrix(), eil51.distance_matrix())


def test_instance_is_immutable(eil51):
    with pytest.raises(ValueError):
        eil51.coords[0, 0] = 1.0
    with pytest.raises(ValueError):
        eil51.distance_matrix()[0, 1] = 1


coords = st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)), min_size=3,
                  max_size=25)


@given(coords)
def test_matrix_symmetric_zero_diagonal(pts):
    d = TspInstance("r", np.array(pts, dtype=float)).distance_matrix()
    assert (d == d.T).all()
    assert (np.diag(d) == 0).all()
    assert (d >= 0).all()


@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=3, max_size=20))
def test_round_trip(pts):
    inst = TspInstance("rt", np.array(pts))
    back = parse_instance(format_instance(inst))
    assert back.name == "rt"
    np.testing.assert_array_equal(back.coords, inst.coords)


@given(coords, st.randoms(use_true_random=False))
def test_tour_length_matches_naive_sum(pts, rnd):
    tour = list(range(len(pts)))
    rnd.shuffle(tour)
    inst = TspInstance("r", np.array(pts, dtype=float))
    assert inst.tour_length(tour) == tour_cost(pts, tour)
