import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vermilion.decomposition import AWARE, OBLIVIOUS, ROUND_ROBIN, Matching
from vermilion.errors import ScheduleFormatError, ValidationError
from vermilion.matrix import permutation, random_derangement, random_saturated, validate_hose
from vermilion.schedule import (
    PeriodicSchedule,
    build_greedy_schedule,
    build_oblivious_schedule,
    check_schedule,
    emulated_capacities,
    vermilion_pipeline,
)


def _tm(n, seed, d=1):
    return validate_hose(random_saturated(n, np.random.default_rng(seed), rate=d), 1.0, d)


@given(st.integers(2, 12), st.integers(1, 4), st.integers(2, 4), st.integers(0, 1000))
def test_vermilion_schedule_shape(n, d, k, seed):
    b = vermilion_pipeline(_tm(n, seed, d), k, d, seed=seed)
    s = b.schedule
    assert s.period == -(-k * n // d)
    assert len(s.matchings()) == k * n + s.padding and s.padding < d
    assert check_schedule(s) == []
    assert s.tags()[: n - 1] == [ROUND_ROBIN] * (n - 1)
    # every pair has at least one circuit per period (the residual edges)
    pc = s.pair_counts()
    off = ~np.eye(n, dtype=bool)
    assert np.all(pc[off] >= 1)
    # padding never adds circuits
    e = np.array(b.graph.edge_mult)
    np.fill_diagonal(e, 0)
    assert np.array_equal(pc, e)


def test_plane_assignment_is_round_robin_over_planes():
    s = vermilion_pipeline(_tm(5, 1, 2), 3, 2).schedule
    flat = s.matchings()
    for i, m in enumerate(flat):
        assert s.planes[i % 2][i // 2] is m


def test_json_roundtrip():
    s = vermilion_pipeline(_tm(6, 2, 3), 3, 3, seed=5).schedule
    t = PeriodicSchedule.from_json(s.to_json())
    assert t.to_json() == s.to_json()
    assert t.padding == s.padding and t.seed == 5


@pytest.mark.parametrize(
    "text",
    ["not json", '{"n": 2}', '{"n":2,"d":1,"slot_ns":10,"reconfig_ns":1,"planes":[[[0,0]]],"phases":[["rr"]]}'],
)
def test_from_json_rejects(text):
    with pytest.raises(ScheduleFormatError):
        PeriodicSchedule.from_json(text)


def test_bad_timing_rejected():
    with pytest.raises(ValidationError):
        build_oblivious_schedule(4, 1, slot_ns=100, reconfig_ns=100)


def test_unknown_tag_rejected():
    with pytest.raises(ValidationError):
        PeriodicSchedule(2, 1, 0, 10, 1, ((Matching((1, 0)),),), (("bogus",),))


def test_oblivious_covers_each_pair_once():
    s = build_oblivious_schedule(7, 1)
    assert s.period == 6 and set(s.tags()) == {OBLIVIOUS}
    pc = s.pair_counts()
    assert np.array_equal(pc, 1 - np.eye(7, dtype=int))


def test_oblivious_multi_plane_padding():
    s = build_oblivious_schedule(6, 2)
    assert s.period == 3 and s.padding == 1
    assert np.array_equal(s.pair_counts(), 1 - np.eye(6, dtype=int))


def test_capacity_formula():
    s = build_oblivious_schedule(5, 1, 4500, 500)
    cap = emulated_capacities(s, 100.0).cap
    assert cap[0, 1] == pytest.approx(100.0 * (8 / 9) / 4)
    assert cap[2, 2] == 0


def test_greedy_serves_a_permutation():
    n = 6
    perm = random_derangement(n, np.random.default_rng(0))
    tm = validate_hose(permutation(perm, 1.0), 1.0, 1)
    s = build_greedy_schedule(tm, 1, slots=4)
    assert s.period == 4 and set(s.tags()) == {AWARE}
    first = s.matchings()[0]
    assert list(first.dst) == list(perm)
    for m in s.matchings():
        assert all(v != u for u, v in enumerate(m.dst))


def test_check_schedule_flags_missing_rotation():
    s = build_oblivious_schedule(4, 1)
    bad = PeriodicSchedule(4, 1, 1, 4500, 500, (tuple(s.matchings())[:3] + (Matching.rotation(4, 1),),), ((ROUND_ROBIN,) * 4,))
    assert any("round-robin" in p for p in check_schedule(bad))
