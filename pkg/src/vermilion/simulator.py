"""Slot-level packet simulator of a periodic circuit-switched fabric.

Each node keeps one queue per first-hop neighbour. In ``direct`` routing the
first hop is always the destination; in ``vlb`` routing every packet picks a
random relay and, if the relay is not the destination, waits in the relay's
FIFO for the second hop. Within a slot each circuit serves its queues
round-robin at packet granularity, and nothing is sent during the
reconfiguration tail of the slot. Flows become eligible at the first slot
boundary at or after their arrival.
"""

from __future__ import annotations

import bisect
import csv
import dataclasses
import hashlib
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import seeding
from .decomposition import ROUND_ROBIN
from .errors import ConfigInvalid, InvariantError
from .estimation import AllGather, EwmaView, payload_bytes, quantize_counters
from .matrix import max_line_sum, read_matrix, validate_hose
from .schedule import (
    PeriodicSchedule,
    build_greedy_schedule,
    build_oblivious_schedule,
    build_vermilion_schedule,
)
from .workload import BUILTIN_HEAVY_TAIL, FlowSizeDist, FlowTrace, generate_workload, pattern_matrix

SCHEDULES = ("vermilion", "oblivious", "greedy", "adaptive")


@dataclass
class SimConfig:
    n: int = 16
    d_hat: int = 1
    c: float = 100e9  # bits/s per link
    packet_size: int = 1500  # bytes
    slot_ns: int = 4500
    reconfig_ns: int = 500
    schedule: str = "vermilion"
    schedule_file: str = ""
    k: int = 3
    routing: str = "direct"
    load: float = 0.1
    flow_size: str = BUILTIN_HEAVY_TAIL
    pattern: str = "permutation"
    matrix_file: str = ""
    arrivals: str = "poisson"
    duration: float = 0.01  # s of arrivals
    drain: float = 0.05  # s allowed after arrivals stop
    seed: int = 1
    estimation: bool = False
    ewma_alpha: float = 0.5
    recompute_latency: float = 59e-6  # s
    counter_bits: int = 16
    short_threshold: int = 1_000_000  # bytes
    sample_interval_ns: int = 10_000
    vlb_buffer_packets: int = 4096  # per (relay, destination) queue

    @property
    def pkt_ns(self) -> float:
        return self.packet_size * 8 / self.c * 1e9

    @property
    def window_ns(self) -> int:
        return self.slot_ns - self.reconfig_ns

    def problems(self) -> list[str]:
        p = []
        if self.n < 2:
            p.append("n: need at least 2 nodes")
        if self.d_hat < 1:
            p.append("d_hat: must be >= 1")
        if self.c <= 0:
            p.append("c: must be positive")
        if self.packet_size <= 0:
            p.append("packet_size: must be positive")
        if not (0 <= self.reconfig_ns < self.slot_ns):
            p.append("reconfig_ns: need 0 <= reconfig_ns < slot_ns")
        elif self.pkt_ns > self.window_ns + 1e-9:
            p.append("packet_size: a packet must fit in one slot's transmit window")
        if self.schedule not in SCHEDULES and not self.schedule_file:
            p.append(f"schedule: expected one of {SCHEDULES}")
        if self.k < 2:
            p.append("k: must be >= 2")
        if self.routing not in ("direct", "vlb"):
            p.append("routing: expected direct or vlb")
        if not (0 <= self.load <= 1):
            p.append("load: must lie in [0, 1]")
        if self.pattern not in ("uniform", "permutation", "matrix"):
            p.append("pattern: expected uniform, permutation or matrix")
        if self.pattern == "matrix" and not self.matrix_file:
            p.append("matrix_file: required for pattern=matrix")
        if self.arrivals not in ("poisson", "periodic"):
            p.append("arrivals: expected poisson or periodic")
        if self.duration < 0 or self.drain < 0:
            p.append("duration: must be nonnegative")
        if not (0 < self.ewma_alpha <= 1):
            p.append("ewma_alpha: must lie in (0, 1]")
        if self.recompute_latency < 0:
            p.append("recompute_latency: must be nonnegative")
        if not (1 <= self.counter_bits <= 62):
            p.append("counter_bits: out of range")
        if self.schedule == "adaptive" and not self.estimation:
            p.append("estimation: adaptive schedules need estimation = true")
        if self.estimation and self.schedule not in ("vermilion", "adaptive"):
            p.append("estimation: needs a schedule with a round-robin phase")
        if self.sample_interval_ns <= 0:
            p.append("sample_interval_ns: must be positive")
        if self.vlb_buffer_packets < 1:
            p.append("vlb_buffer_packets: must be >= 1")
        return p

    def validate(self) -> "SimConfig":
        problems = self.problems()
        if problems:
            raise ConfigInvalid(problems)
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_text(self) -> str:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                v = "true" if v else "false"
            out.append(f"{f.name} = {v}")
        return "\n".join(out) + "\n"


def _convert(name, typ, raw: str):
    raw = raw.strip()
    if typ in ("bool", bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if typ in ("int", int):
        x = float(raw)
        if not x.is_integer():
            raise ValueError(f"not an integer: {raw!r}")
        return int(x)
    if typ in ("float", float):
        return float(raw)
    return raw


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    cfg = dataclasses.replace(base) if base else SimConfig()
    types = {f.name: f.type for f in dataclasses.fields(SimConfig)}
    problems = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep:
            problems.append(f"line {lineno}: expected key = value")
            continue
        if key not in types:
            problems.append(f"{key}: unknown config key")
            continue
        try:
            setattr(cfg, key, _convert(key, types[key], val))
        except ValueError as e:
            problems.append(f"{key}: {e}")
    if problems:
        raise ConfigInvalid(problems)
    return cfg.validate()


def load_config(path) -> SimConfig:
    return parse_config(Path(path).read_text())


@dataclass
class FlowRecord:
    id: int
    src: int
    dst: int
    size: int
    arrival: int
    completion: int | None  # ns; None = unfinished

    @property
    def fct(self) -> int | None:
        return None if self.completion is None else self.completion - self.arrival


@dataclass
class SimReport:
    flows: list[FlowRecord]
    short_threshold: int
    utilization: np.ndarray  # [sample, node]
    sample_interval_ns: int
    updates: list[tuple[int, int]]
    end_ns: int
    drops: int = 0
    ewma_identical: list[bool] = field(default_factory=list)
    installed: list[str] = field(default_factory=list)  # schedule digests, in install order

    def fcts(self, short: bool | None = None) -> np.ndarray:
        vals = [
            f.fct
            for f in self.flows
            if f.completion is not None
            and (short is None or (f.size < self.short_threshold) == short)
        ]
        return np.array(vals, dtype=float)

    def percentile(self, q: float, short: bool | None = None) -> float | None:
        v = self.fcts(short)
        return float(np.percentile(v, q)) if len(v) else None

    @property
    def mean_utilization(self) -> float:
        return float(self.utilization.mean()) if self.utilization.size else 0.0

    def summary(self) -> dict:
        def block(short):
            v = self.fcts(short)
            return {
                "count": int(len(v)),
                "p50_ns": float(np.percentile(v, 50)) if len(v) else None,
                "p99_ns": float(np.percentile(v, 99)) if len(v) else None,
            }

        done = sum(1 for f in self.flows if f.completion is not None)
        return {
            "flows": len(self.flows),
            "completed": done,
            "unfinished": len(self.flows) - done,
            "short_threshold_bytes": self.short_threshold,
            "short": block(True),
            "long": block(False),
            "all": block(None),
            "mean_utilization": self.mean_utilization,
            "drops": self.drops,
            "schedule_swaps": len(self.updates),
            "end_ns": self.end_ns,
        }

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "flows.csv").write_text(self.flows_csv())
        (out / "utilization.csv").write_text(self.utilization_csv())
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trigger_ns", "install_ns"])
        w.writerows(self.updates)
        (out / "updates.csv").write_text(buf.getvalue())
        (out / "summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")

    def flows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "src", "dst", "size_bytes", "arrival_ns", "completion_ns"])
        for f in self.flows:
            w.writerow([f.id, f.src, f.dst, f.size, f.arrival, "" if f.completion is None else f.completion])
        return buf.getvalue()

    def utilization_csv(self) -> str:
        buf = io.StringIO()
        buf.write("time_ns,node,utilization\n")
        for i, row in enumerate(self.utilization):
            t = i * self.sample_interval_ns
            for u, x in enumerate(row):
                buf.write(f"{t},{u},{x:.9g}\n")
        return buf.getvalue()


def rr_serve(counts, budget):
    """Packet-level round robin over queues with `counts` packets, `budget` slots.

    Returns (sent, last_pos, resume): sent[i] packets taken from queue i,
    last_pos[i] the 1-based transmit position of queue i's final packet when
    it empties (else None), and the index where the next round should start.
    """
    m = len(counts)
    if m == 0 or budget <= 0:
        return [0] * m, [None] * m, 0
    total = sum(counts)
    srt = sorted(counts)
    prefix = [0]
    for x in srt:
        prefix.append(prefix[-1] + x)

    def filled(q):  # sum_j min(c_j, q)
        i = bisect.bisect_right(srt, q)
        return prefix[i] + q * (m - i)

    if total <= budget:
        q, extra = srt[-1], 0
    else:
        lo, hi = 0, srt[-1]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if filled(mid) <= budget:
                lo = mid
            else:
                hi = mid - 1
        q = lo
        extra = budget - filled(q)
    base = filled(q)
    sent = [min(c, q) for c in counts]
    last_pos: list[int | None] = [None] * m
    resume = 0
    rank = 0
    for i, c in enumerate(counts):
        if extra and c > q and rank < extra:
            rank += 1
            sent[i] += 1
            resume = (i + 1) % m
            if c == q + 1:
                last_pos[i] = base + rank
    for i, c in enumerate(counts):
        if c <= q and c > 0:
            ahead = sum(1 for j in range(i) if counts[j] >= c)
            last_pos[i] = filled(c - 1) + ahead + 1
    return sent, last_pos, resume


def _interleave(j, own_first, a, b):
    """Transmit position of the j-th packet of one class when two classes alternate.

    Class A (relay) holds the odd positions while both have packets left.
    """
    m = min(a, b)
    if j <= m:
        return 2 * j - 1 if own_first else 2 * j
    return 2 * m + (j - m)


class Simulator:
    def __init__(self, cfg: SimConfig, schedule: PeriodicSchedule | None = None, trace: FlowTrace | None = None):
        self.cfg = cfg.validate()
        n = cfg.n
        self.n = n
        self.pkt_ns = cfg.pkt_ns
        self.node_rate = cfg.c * cfg.d_hat
        self.demand = self._pattern()
        self.schedule = schedule if schedule is not None else self._initial_schedule()
        if self.schedule.n != n or self.schedule.d_hat != cfg.d_hat:
            raise ConfigInvalid("schedule: node count or degree does not match the config")
        if self.schedule.slot_ns != cfg.slot_ns or self.schedule.reconfig_ns != cfg.reconfig_ns:
            raise ConfigInvalid("schedule: slot timing does not match the config")
        self.duration_ns = int(round(cfg.duration * 1e9))
        self.limit_ns = self.duration_ns + int(round(cfg.drain * 1e9))
        if trace is None:
            dist = FlowSizeDist.parse(cfg.flow_size)
            trace = generate_workload(
                n, self.node_rate, cfg.load, self.duration_ns, dist, self.demand,
                seeding.substream(cfg.seed, seeding.WORKLOAD), cfg.arrivals,
            )
        self.trace = trace
        nf = len(trace)
        self.f_src = trace.src.tolist()
        self.f_dst = trace.dst.tolist()
        self.f_size = trace.size.tolist()
        self.f_arr = trace.arrival.tolist()
        self.f_npk = [-(-s // cfg.packet_size) for s in self.f_size]
        self.f_delivered = [0] * nf
        self.f_last = [0.0] * nf
        self.f_done: list[float | None] = [None] * nf
        self.next_flow = 0
        self.admitted_pk = 0
        self.delivered_pk = 0

        # local[u][h]: fid -> packets waiting at source u for first hop h
        self.local = [[{} for _ in range(n)] for _ in range(n)]
        self.lptr = [[0] * n for _ in range(n)]
        # relay[u][v]: FIFO of [fid, packets] held at u for final hop to v
        self.relay = [[deque() for _ in range(n)] for _ in range(n)]
        self.relay_len = [[0] * n for _ in range(n)]
        self.incoming: list[tuple[int, int, int]] = []  # (relay, fid, packets)
        self.relay_rng = seeding.substream(cfg.seed, seeding.RELAY)
        self.drops = 0

        n_bins = -(-self.duration_ns // cfg.sample_interval_ns) if self.duration_ns else 0
        self.util_bytes = np.zeros((n_bins, n))
        self.slot = 0

        # estimation state
        self.voq_bytes = np.zeros((n, n))
        self.gather: AllGather | None = None
        self.views = [EwmaView(n, cfg.ewma_alpha) for _ in range(n)] if cfg.estimation else []
        self.pending: tuple[int, int, PeriodicSchedule] | None = None  # (trigger, ready, schedule)
        self.updates: list[tuple[int, int]] = []
        self.ewma_identical: list[bool] = []
        self.installed: list[str] = [_digest(self.schedule)]
        self.payload_ns = payload_bytes(n, cfg.counter_bits) * 8 / cfg.c * 1e9
        self._rr_bounds()

    # --- setup -------------------------------------------------------------

    def _pattern(self) -> np.ndarray:
        cfg = self.cfg
        mat = None
        if cfg.pattern == "matrix":
            mat = read_matrix(cfg.matrix_file).entries
            if mat.shape[0] != cfg.n:
                raise ConfigInvalid("matrix_file: size does not match n")
        return pattern_matrix(cfg.pattern, cfg.n, seeding.substream(cfg.seed, "pattern"), mat)

    def _build_aware(self, rel: np.ndarray) -> PeriodicSchedule:
        cfg = self.cfg
        total = max_line_sum(rel)
        tm = validate_hose(rel / total if total else np.zeros((cfg.n, cfg.n)), 1.0, 1)
        return build_vermilion_schedule(
            tm, cfg.k, cfg.d_hat, cfg.slot_ns, cfg.reconfig_ns,
            seeding.substream_seed(cfg.seed, seeding.TOPOLOGY),
        )

    def _initial_schedule(self) -> PeriodicSchedule:
        cfg = self.cfg
        if cfg.schedule_file:
            return PeriodicSchedule.from_json(Path(cfg.schedule_file).read_text())
        if cfg.schedule == "oblivious":
            return build_oblivious_schedule(cfg.n, cfg.d_hat, cfg.slot_ns, cfg.reconfig_ns)
        if cfg.schedule == "greedy":
            tm = validate_hose(self.demand, 1.0, 1)
            return build_greedy_schedule(tm, cfg.d_hat, None, cfg.slot_ns, cfg.reconfig_ns)
        if cfg.schedule == "adaptive":
            return self._build_aware(np.zeros((cfg.n, cfg.n)))
        return self._build_aware(self.demand)

    def _rr_bounds(self):
        rr_slots = [s for s in range(self.schedule.period) if ROUND_ROBIN in self.schedule.slot_tags(s)]
        self.last_rr_slot = max(rr_slots) if rr_slots else -1

    # --- main loop ---------------------------------------------------------

    def run(self) -> SimReport:
        while not self.finished():
            self.step()
        return self.report()

    def finished(self) -> bool:
        t = self.slot * self.cfg.slot_ns
        if t >= self.limit_ns:
            return True
        return t >= self.duration_ns and self.next_flow >= len(self.f_src) and self.delivered_pk == self.admitted_pk

    def step(self) -> None:
        cfg = self.cfg
        t0 = self.slot * cfg.slot_ns
        self._admit(t0)
        sched = self.schedule
        phase_slot = self.slot % sched.period
        if phase_slot == 0:
            self._period_start(t0)
            sched = self.schedule
        for p in range(cfg.d_hat):
            m = sched.planes[p][phase_slot]
            start = float(t0)
            if self.gather is not None and sched.phases[p][phase_slot] == ROUND_ROBIN:
                shift = m.dst[0]
                self.gather.exchange(shift)
                start += self.payload_ns
            budget = int(math.floor((t0 + cfg.window_ns - start) / self.pkt_ns + 1e-9))
            for u, v in enumerate(m.dst):
                if u != v:
                    self._serve(u, v, budget, start)
        if self.gather is not None and phase_slot == self.last_rr_slot:
            self._phase_end(t0 + cfg.slot_ns)
        self._merge_incoming()
        self.slot += 1

    def _admit(self, t0: int) -> None:
        vlb = self.cfg.routing == "vlb"
        while self.next_flow < len(self.f_src) and self.f_arr[self.next_flow] <= t0:
            f = self.next_flow
            self.next_flow += 1
            u, v, npk = self.f_src[f], self.f_dst[f], self.f_npk[f]
            self.admitted_pk += npk
            self.voq_bytes[u, v] += self.f_size[f]
            if vlb:
                self._spray(u, f, npk)
            else:
                self.local[u][v][f] = npk

    def _spray(self, u: int, f: int, npk: int) -> None:
        n = self.n
        p = np.full(n, 1.0 / (n - 1))
        p[u] = 0.0
        counts = self.relay_rng.multinomial(npk, p)
        for h in np.flatnonzero(counts):
            q = self.local[u][h]
            q[f] = q.get(f, 0) + int(counts[h])

    def _period_start(self, t0: int) -> None:
        if self.pending is not None and self.pending[1] <= t0:
            trigger, _, new = self.pending
            self.schedule = new
            self.pending = None
            self.updates.append((trigger, t0))
            self.installed.append(_digest(new))
            self._rr_bounds()
        if self.cfg.estimation:
            cfg = self.cfg
            rows = [
                quantize_counters(self.voq_bytes[u], cfg.k, cfg.c, cfg.slot_ns * 1e-9, cfg.counter_bits, u)
                for u in range(self.n)
            ]
            self.voq_bytes[:] = 0.0
            self.gather = AllGather(rows)

    def _phase_end(self, t_end: int) -> None:
        g = self.gather
        self.gather = None
        if not g.complete():
            raise InvariantError("all-gather incomplete at the end of the round-robin phase")
        views = [self.views[u].update(g.matrix(u)) for u in range(self.n)]
        self.ewma_identical.append(all(np.array_equal(views[0], x) for x in views[1:]))
        if self.cfg.schedule == "adaptive" and self.pending is None:
            ready = t_end + int(round(self.cfg.recompute_latency * 1e9))
            self.pending = (t_end, ready, self._build_aware(views[0]))

    # --- service -----------------------------------------------------------

    def _serve(self, u: int, v: int, budget: int, start: float) -> None:
        if budget <= 0:
            return
        local = self.local[u][v]
        relay_n = self.relay_len[u][v]
        local_n = sum(local.values()) if local else 0
        if relay_n == 0 and local_n == 0:
            return
        if relay_n + local_n <= budget:
            a, b = relay_n, local_n
        else:
            half_a, half_b = (budget + 1) // 2, budget // 2
            if relay_n < half_a:
                a, b = relay_n, min(local_n, budget - relay_n)
            elif local_n < half_b:
                a, b = min(relay_n, budget - local_n), local_n
            else:
                a, b = half_a, half_b
        pkt = self.pkt_ns
        delivered_bytes = 0
        if a:
            fifo = self.relay[u][v]
            taken = 0
            while taken < a:
                entry = fifo[0]
                x = min(entry[1], a - taken)
                taken += x
                entry[1] -= x
                f = entry[0]
                t_last = start + _interleave(taken, True, a, b) * pkt
                delivered_bytes += self._deliver(f, x, t_last)
                if entry[1] == 0:
                    fifo.popleft()
            self.relay_len[u][v] -= a
        if b:
            fids = list(local)
            ptr = self.lptr[u][v] % len(fids)
            order = fids[ptr:] + fids[:ptr]
            counts = [local[f] for f in order]
            sent, last_pos, resume = rr_serve(counts, b)
            for f, x, pos in zip(order, sent, last_pos):
                if not x:
                    continue
                left = local[f] - x
                if left:
                    local[f] = left
                else:
                    del local[f]
                if self.f_dst[f] == v:
                    t_last = start + _interleave(pos, False, a, b) * pkt if pos else start
                    delivered_bytes += self._deliver(f, x, t_last)
                else:
                    self.incoming.append((v, f, x))
            remaining = [f for f in order[resume:] + order[:resume] if f in local]
            self.lptr[u][v] = 0
            if len(remaining) != len(local):
                raise InvariantError("queue bookkeeping diverged")
            self.local[u][v] = {f: local[f] for f in remaining}
        if delivered_bytes:
            self._record_util(v, start, start + (a + b) * pkt, delivered_bytes)

    def _deliver(self, f: int, x: int, t_last: float) -> int:
        size = self.f_size[f]
        pk = self.cfg.packet_size
        before = min(size, self.f_delivered[f] * pk)
        self.f_delivered[f] += x
        self.delivered_pk += x
        after = min(size, self.f_delivered[f] * pk)
        if t_last > self.f_last[f]:
            self.f_last[f] = t_last
        if self.f_delivered[f] == self.f_npk[f]:
            self.f_done[f] = self.f_last[f]
        elif self.f_delivered[f] > self.f_npk[f]:
            raise InvariantError(f"flow {f} over-delivered")
        return after - before

    def _record_util(self, node: int, a: float, b: float, nbytes: float) -> None:
        """Spread delivered bytes evenly over [a, b) and bin them."""
        iv = self.cfg.sample_interval_ns
        n_bins = self.util_bytes.shape[0]
        i = int(a // iv)
        if b <= a:
            if i < n_bins:
                self.util_bytes[i, node] += nbytes
            return
        span = b - a
        while a < b and i < n_bins:
            edge = min(b, (i + 1) * iv)
            self.util_bytes[i, node] += nbytes * (edge - a) / span
            a = edge
            i += 1

    def _merge_incoming(self) -> None:
        cap = self.cfg.vlb_buffer_packets
        for r, f, x in self.incoming:
            dst = self.f_dst[f]
            room = cap - self.relay_len[r][dst]
            keep = min(x, max(room, 0))
            if keep:
                fifo = self.relay[r][dst]
                if fifo and fifo[-1][0] == f:
                    fifo[-1][1] += keep
                else:
                    fifo.append([f, keep])
                self.relay_len[r][dst] += keep
            if x - keep:
                self.drops += x - keep
                self._spray(self.f_src[f], f, x - keep)
        self.incoming = []

    # --- checks and output -------------------------------------------------

    def packets_in_network(self) -> int:
        at_src = sum(sum(q.values()) for row in self.local for q in row)
        at_relay = sum(sum(e[1] for e in q) for row in self.relay for q in row)
        in_flight = sum(x for _, _, x in self.incoming)
        return at_src + at_relay + in_flight

    def check_conservation(self) -> bool:
        return self.admitted_pk == self.delivered_pk + self.packets_in_network()

    def report(self) -> SimReport:
        flows = []
        for f in range(len(self.f_src)):
            done = self.f_done[f]
            comp = None if done is None else int(math.ceil(done - 1e-6))
            flows.append(FlowRecord(f, self.f_src[f], self.f_dst[f], self.f_size[f], self.f_arr[f], comp))
        iv = self.cfg.sample_interval_ns
        util = self.util_bytes * 8 / (self.node_rate * iv * 1e-9)
        return SimReport(
            flows=flows,
            short_threshold=self.cfg.short_threshold,
            utilization=util,
            sample_interval_ns=iv,
            updates=list(self.updates),
            end_ns=self.slot * self.cfg.slot_ns,
            drops=self.drops,
            ewma_identical=list(self.ewma_identical),
            installed=list(self.installed),
        )


def _digest(s: PeriodicSchedule) -> str:
    return hashlib.sha256(s.to_json().encode()).hexdigest()


def run_simulation(cfg: SimConfig, schedule: PeriodicSchedule | None = None, trace: FlowTrace | None = None) -> SimReport:
    return Simulator(cfg, schedule, trace).run()
