import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vermilion.errors import BadDistributionFile
from vermilion.matrix import ring
from vermilion.workload import FlowSizeDist, generate_workload, pattern_matrix


def test_builtin_distribution_is_heavy_tailed():
    d = FlowSizeDist.parse("builtin:heavy_tail")
    x = d.sample(np.random.default_rng(0), 200_000)
    assert x.min() >= 1000 and x.max() <= 3e7
    assert np.median(x) < 100_000 < x.mean()
    assert x.mean() == pytest.approx(d.mean(), rel=0.03)


def test_constant_distribution():
    d = FlowSizeDist.parse("constant:4000")
    assert d.mean() == 4000
    assert set(d.sample(np.random.default_rng(1), 10)) == {4000}


def test_distribution_file(tmp_path):
    p = tmp_path / "cdf.txt"
    p.write_text("# bytes prob\n100 0.5\n300 1.0\n")
    d = FlowSizeDist.parse(str(p))
    assert d.mean() == pytest.approx(0.5 * 100 + 0.5 * 200)


@pytest.mark.parametrize(
    "text",
    ["100 0.5\n50 1.0\n", "100 0.5\n200 0.9\n", "100\n", "a b\n", "", "0 0.5\n10 1\n"],
)
def test_distribution_rejects(text):
    with pytest.raises(BadDistributionFile):
        FlowSizeDist.from_text(text)


@pytest.mark.parametrize("spec", ["constant:-3", "constant:x", "/nonexistent/cdf"])
def test_parse_rejects(spec):
    with pytest.raises(BadDistributionFile):
        FlowSizeDist.parse(spec)


def test_patterns():
    rng = np.random.default_rng(0)
    u = pattern_matrix("uniform", 5, rng)
    assert np.allclose(u.sum(axis=1), 1) and np.all(np.diag(u) == 0)
    p = pattern_matrix("permutation", 6, rng)
    assert np.all(p.sum(axis=1) == 1) and np.all(np.diag(p) == 0) and set(p.ravel()) == {0, 1}
    m = pattern_matrix("matrix", 4, rng, ring(4, 7.0))
    assert np.allclose(m, ring(4))
    with pytest.raises(ValueError):
        pattern_matrix("bogus", 4, rng)


@given(st.integers(0, 1000))
def test_trace_is_sorted_and_follows_pattern(seed):
    demand = ring(4)
    t = generate_workload(4, 1e11, 0.3, 2_000_000, FlowSizeDist.constant(1500), demand, np.random.default_rng(seed))
    assert np.all(np.diff(t.arrival) >= 0)
    assert np.all(t.dst == (t.src + 1) % 4)
    assert np.all(t.arrival < 2_000_000)


def test_offered_load_matches_target():
    dist = FlowSizeDist.constant(100_000)
    t = generate_workload(8, 1e11, 0.4, 50_000_000, dist, pattern_matrix("uniform", 8, None), np.random.default_rng(5))
    offered = t.size.sum() * 8 / (8 * 1e11 * 0.05)
    assert offered == pytest.approx(0.4, rel=0.05)


def test_periodic_arrivals_are_evenly_spaced():
    t = generate_workload(3, 1e11, 0.5, 1_000_000, FlowSizeDist.constant(10_000), ring(3), np.random.default_rng(0), "periodic")
    for u in range(3):
        gaps = np.diff(t.arrival[t.src == u])
        assert len(set(gaps)) == 1 and gaps[0] == round(10_000 * 8 / (0.5 * 1e11) * 1e9)


def test_zero_load_is_empty():
    t = generate_workload(4, 1e11, 0.0, 1_000_000, FlowSizeDist.constant(10), ring(4), np.random.default_rng(0))
    assert len(t) == 0
