import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import round_robin_reference, single_flow_fct
from vermilion.errors import ConfigInvalid
from vermilion.schedule import build_oblivious_schedule
from vermilion.simulator import SimConfig, Simulator, parse_config, rr_serve, run_simulation
from vermilion.workload import FlowTrace


def _trace(rows):
    src, dst, size, arr = (np.array(x, dtype=np.int64) for x in zip(*rows))
    return FlowTrace(src, dst, size, arr)


def _small(**kw):
    base = dict(n=8, duration=0.002, drain=0.05, load=0.2, seed=3)
    base.update(kw)
    return SimConfig(**base).validate()


@given(st.lists(st.integers(0, 12), min_size=1, max_size=8), st.integers(0, 60))
def test_rr_serve_matches_packet_by_packet_round_robin(counts, budget):
    sent, last, resume = rr_serve(counts, budget)
    ref_sent, ref_last, ref_next = round_robin_reference(counts, budget)
    assert sent == ref_sent
    assert last == ref_last
    left = [c - s for c, s in zip(counts, sent)]
    if ref_next is not None:
        nxt = next(i % len(counts) for i in range(resume, resume + len(counts)) if left[i % len(counts)])
        assert nxt == ref_next


@pytest.mark.parametrize(
    "dst, size, arrival",
    [(1, 1500, 0), (2, 150_000, 0), (3, 149_001, 0), (2, 600_000, 100), (1, 33 * 1500, 4500)],
)
def test_single_flow_fct_matches_closed_form(dst, size, arrival):
    cfg = SimConfig(n=4, schedule="oblivious", load=0.0, duration=0.001, drain=0.01)
    sched = build_oblivious_schedule(4, 1)
    rep = run_simulation(cfg, sched, _trace([(0, dst, size, arrival)]))
    first_slot = -(-arrival // cfg.slot_ns)
    live = (s for s in itertools.count(first_slot) if sched.slot(s)[0].dst[0] == dst)
    want = single_flow_fct(size, cfg.packet_size, cfg.pkt_ns, cfg.window_ns, cfg.slot_ns, live)
    assert rep.flows[0].completion == int(np.ceil(want - 1e-6))
    assert rep.flows[0].fct == rep.flows[0].completion - arrival


def test_two_flows_share_a_circuit_fairly():
    cfg = SimConfig(n=3, schedule="oblivious", load=0.0, duration=0.001, drain=0.01)
    sched = build_oblivious_schedule(3, 1)
    rep = run_simulation(cfg, sched, _trace([(0, 1, 10 * 1500, 0), (0, 1, 10 * 1500, 0)]))
    # 20 packets alternate within one slot window; the second flow finishes one packet later
    a, b = (f.completion for f in rep.flows)
    assert b - a == pytest.approx(cfg.pkt_ns, abs=1)
    assert b == int(np.ceil(20 * cfg.pkt_ns - 1e-6))


@pytest.mark.parametrize("routing, schedule", [("direct", "vermilion"), ("vlb", "oblivious"), ("direct", "greedy")])
def test_conservation_every_slot_and_completion(routing, schedule):
    sim = Simulator(_small(routing=routing, schedule=schedule))
    while not sim.finished():
        sim.step()
        assert sim.check_conservation()
        if routing == "direct":
            assert not sim.incoming and sum(map(sum, sim.relay_len)) == 0
    rep = sim.report()
    assert all(f.completion is not None for f in rep.flows)
    assert rep.utilization.max() <= 1 + 1e-9


def test_vlb_tail_drop_retransmits_until_done():
    sim = Simulator(_small(routing="vlb", schedule="oblivious", vlb_buffer_packets=1, load=0.5))
    rep = sim.run()
    assert rep.drops > 0
    assert all(f.completion is not None for f in rep.flows)
    assert sim.check_conservation()


def test_runs_are_deterministic():
    a = run_simulation(_small(routing="vlb", schedule="oblivious"))
    b = run_simulation(_small(routing="vlb", schedule="oblivious"))
    assert a.flows_csv() == b.flows_csv() and a.utilization_csv() == b.utilization_csv()
    c = run_simulation(_small(routing="vlb", schedule="oblivious", seed=4))
    assert c.flows_csv() != a.flows_csv()


def test_report_files(tmp_path):
    rep = run_simulation(_small())
    rep.write(tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["completed"] == summary["flows"] == len(rep.flows)
    assert (tmp_path / "flows.csv").read_text().splitlines()[0].startswith("id,src,dst,size_bytes,arrival_ns,completion_ns")
    for name in ("utilization.csv", "updates.csv"):
        assert (tmp_path / name).exists()


def test_drain_limit_leaves_flows_unfinished():
    rep = run_simulation(_small(load=0.9, drain=0.0))
    assert rep.summary()["unfinished"] > 0


def test_estimation_views_agree():
    rep = run_simulation(_small(estimation=True, load=0.3))
    assert rep.ewma_identical and all(rep.ewma_identical)


def test_config_parsing():
    cfg = parse_config("n = 4  # nodes\nrouting = vlb\nestimation = yes\nload=0.5\n")
    assert cfg.n == 4 and cfg.routing == "vlb" and cfg.estimation and cfg.load == 0.5
    assert parse_config(cfg.to_text()).to_dict() == cfg.to_dict()


@pytest.mark.parametrize(
    "text, key",
    [
        ("bogus = 1", "bogus"),
        ("n = two", "n"),
        ("load = 1.5", "load"),
        ("routing = ecmp", "routing"),
        ("schedule = adaptive", "estimation"),
        ("packet_size = 1000000", "packet_size"),
        ("just words", "line 1"),
    ],
)
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigInvalid) as e:
        parse_config(text)
    assert any(p.startswith(key) for p in e.value.problems)


def test_schedule_mismatch_rejected():
    with pytest.raises(ConfigInvalid):
        Simulator(SimConfig(n=4), build_oblivious_schedule(5, 1))


def _permanent_pair(slot_ns, reconfig_ns):
    from vermilion.decomposition import OBLIVIOUS, Matching
    from vermilion.schedule import PeriodicSchedule

    return PeriodicSchedule(2, 1, 0, slot_ns, reconfig_ns, ((Matching((1, 0)),),), ((OBLIVIOUS,),))


@pytest.mark.parametrize("size", [1500, 150_000, 1_500_000, 1_234_567])
def test_dedicated_circuit_paces_at_duty_rate(size):
    cfg = SimConfig(n=2, slot_ns=1200, reconfig_ns=120, load=0.0, duration=0.0, drain=0.1)
    rep = run_simulation(cfg, _permanent_pair(1200, 120), _trace([(0, 1, size, 0)]))
    ideal = size * 8 / (0.9 * cfg.c) * 1e9
    assert abs(rep.flows[0].fct - ideal) <= cfg.slot_ns


def test_zero_arrivals():
    rep = run_simulation(_small(load=0.0))
    assert len(rep.flows) == 0 and rep.fcts().size == 0
    assert not rep.utilization.any()


def test_symmetric_permanent_flows_steady_utilization():
    cfg = SimConfig(
        n=2, slot_ns=1200, reconfig_ns=120, load=0.5, duration=0.002, drain=0.01,
        flow_size="constant:15000", pattern="permutation", arrivals="periodic",
    )
    rep = run_simulation(cfg, _permanent_pair(1200, 120))
    steady = rep.utilization[5:-5]
    assert steady.mean() == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("routing, schedule, d_hat", [("direct", "vermilion", 1), ("vlb", "oblivious", 1), ("vlb", "oblivious", 2)])
def test_fct_line_rate_lower_bound(routing, schedule, d_hat):
    cfg = _small(routing=routing, schedule=schedule, d_hat=d_hat, load=0.3)
    for f in run_simulation(cfg).flows:
        assert f.completion >= f.arrival + f.size * 8 / (cfg.c * d_hat) * 1e9 - 1e-6


def test_swaps_wait_for_recompute_latency_and_period_boundary():
    cfg = SimConfig(n=8, load=0.4, schedule="adaptive", estimation=True, flow_size="constant:100000",
                    arrivals="periodic", duration=0.002, drain=0.0, recompute_latency=59e-6)
    sim = Simulator(cfg)
    rep = sim.run()
    assert rep.updates
    period_ns = sim.schedule.period_ns
    for trigger, install in rep.updates:
        assert install - trigger >= 59_000
        assert install % period_ns == 0


def test_alpha_one_view_is_latest_gather():
    from vermilion.estimation import EwmaView

    v = EwmaView(3, 1.0)
    v.update(np.ones((3, 3)))
    g = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(v.update(g), g)
