import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vermilion.errors import DeficitMismatch, NotRegular
from vermilion.matrix import normalize, random_saturated, scale, validate_hose
from vermilion.rounding import round_matrix
from vermilion.topology import (
    DegreeDeficit,
    Multigraph,
    build_emulated,
    configuration_fill,
    degree_deficit,
    residual_complete,
)


def _rounded(n, k, seed):
    a = random_saturated(n, np.random.default_rng(seed))
    return round_matrix(scale(normalize(validate_hose(a, 1.0, 1)), k))


@given(st.integers(2, 16), st.integers(2, 5), st.integers(0, 10_000))
def test_emulated_graph_is_regular_and_contains_parts(n, k, seed):
    r = _rounded(n, k, seed)
    g = build_emulated(r, k, seed)
    assert np.all(g.edge_mult.sum(axis=0) == k * n)
    assert np.all(g.edge_mult.sum(axis=1) == k * n)
    assert np.all(g.edge_mult >= r.entries + residual_complete(n))


def test_fill_is_seeded():
    d = DegreeDeficit((3, 1, 2), (2, 2, 2))
    a = configuration_fill(d, 7)
    assert np.array_equal(a, configuration_fill(d, 7))
    assert list(a.sum(axis=1)) == [3, 1, 2] and list(a.sum(axis=0)) == [2, 2, 2]


def test_fill_rejects_unbalanced_stubs():
    with pytest.raises(DeficitMismatch):
        configuration_fill(DegreeDeficit((1, 0), (0, 0)), 0)


def test_deficit_rejects_overfull_graph():
    with pytest.raises(DeficitMismatch):
        degree_deficit(np.array([[0, 5], [5, 0]]), 3)


def test_check_regular_reports_node():
    g = Multigraph(np.array([[0, 2], [2, 1]]), 2)
    with pytest.raises(NotRegular, match="node 1"):
        g.check_regular()
