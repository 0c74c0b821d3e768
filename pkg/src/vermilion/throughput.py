"""Throughput oracles on emulated topologies.

Single-hop throughput is closed form. Multi-hop throughput is the maximum
concurrent flow, approximated by multiplicative weights over shortest paths
(Garg-Koenemann with Fleischer's per-source grouping). The loop stops once the
primal value is certified within (1 - eps) of a dual upper bound, so the
returned ``theta`` carries its own optimality proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import InvalidEpsilon, ZeroDemand
from .matrix import TrafficMatrix, random_saturated, validate_hose
from .schedule import (
    DEFAULT_RECONFIG_NS,
    DEFAULT_SLOT_NS,
    CapacityMatrix,
    build_vermilion_schedule,
    emulated_capacities,
)

SINGLE_HOP = "single_hop"
MULTI_HOP = "multi_hop"


@dataclass
class ThroughputReport:
    theta: float | None  # None = unbounded (zero demand)
    routing_mode: str
    epsilon: float = 0.0
    binding_pair: tuple[int, int] | None = None
    upper_bound: float | None = None
    phases: int = 0
    # [source, u, v] edge flows, feasible at theta (multi-hop only)
    source_flows: np.ndarray | None = field(default=None, repr=False)
    demand: np.ndarray | None = field(default=None, repr=False)

    @property
    def unbounded(self) -> bool:
        return self.theta is None

    def to_dict(self) -> dict:
        out = {
            "routing_mode": self.routing_mode,
            "unbounded": self.unbounded,
            "theta": self.theta,
            "epsilon": self.epsilon,
            "binding_pair": list(self.binding_pair) if self.binding_pair else None,
        }
        if self.routing_mode == MULTI_HOP:
            out["upper_bound"] = self.upper_bound
            out["phases"] = self.phases
        return out

    def edge_flows(self) -> np.ndarray:
        return self.source_flows.sum(axis=0)

    def paths(self, tol: float = 1e-12) -> dict:
        """Decompose the per-source flows into per-commodity paths.

        Returns {(s, t): {path: flow}} with each commodity's total equal to
        theta * demand[s, t]; cycles in the summed flow are cancelled first.
        """
        out = {}
        for s in range(self.source_flows.shape[0]):
            f = self.source_flows[s].copy()
            want = self.theta * self.demand[s]
            for t in np.flatnonzero(want > 0):
                need = want[t]
                bucket = out.setdefault((s, int(t)), {})
                while need > tol * max(1.0, want[t]):
                    path = _find_path(f, s, int(t), tol)
                    if path is None:
                        break
                    arcs = (np.array(path[:-1]), np.array(path[1:]))
                    amount = min(need, float(f[arcs].min()))
                    f[arcs] -= amount
                    need -= amount
                    bucket[tuple(path)] = bucket.get(tuple(path), 0.0) + amount
        return out


def _find_path(f, s, t, tol):
    """Simple s-t path over arcs carrying flow above tol (BFS)."""
    n = f.shape[0]
    prev = [-1] * n
    prev[s] = s
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(f[u] > tol):
                if prev[v] < 0:
                    prev[v] = u
                    if v == t:
                        path = [t]
                        while path[-1] != s:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(int(v))
        frontier = nxt
    return None


def _as_array(x) -> np.ndarray:
    if isinstance(x, TrafficMatrix):
        return np.asarray(x.entries, dtype=float)
    if isinstance(x, CapacityMatrix):
        return np.asarray(x.cap, dtype=float)
    return np.asarray(x, dtype=float)


def single_hop_throughput(m, cap) -> ThroughputReport:
    demand = _as_array(m)
    c = _as_array(cap)
    mask = demand > 0
    if not mask.any():
        return ThroughputReport(None, SINGLE_HOP)
    ratio = np.full(demand.shape, np.inf)
    ratio[mask] = c[mask] / demand[mask]
    u, v = np.unravel_index(int(np.argmin(ratio)), ratio.shape)
    return ThroughputReport(float(ratio[u, v]), SINGLE_HOP, 0.0, (int(u), int(v)))


def _tree_loads(pred: np.ndarray, amount: np.ndarray) -> np.ndarray:
    """Route amount[s, t] along each source's shortest-path tree.

    Returns per-source edge flows, shape (n, n, n) indexed [source, u, v].
    """
    n = pred.shape[0]
    out = np.zeros((n, n, n))
    src, pos = np.nonzero(amount > 0)
    amt = amount[src, pos]
    while len(src):
        prev = pred[src, pos]
        np.add.at(out, (src, prev, pos), amt)
        keep = prev != src
        src, pos, amt = src[keep], prev[keep], amt[keep]
    return out


def max_concurrent_flow(cap, m, epsilon: float = 0.02, max_phases: int = 1_000_000) -> ThroughputReport:
    """Multiplicative-weights max concurrent flow with a duality-gap stop.

    Returns theta >= (1 - epsilon) * optimum; ``upper_bound`` is the dual value
    that certifies it. The flow certificate is kept per source in
    ``source_flows`` and already scaled to be feasible at ``theta``.
    """
    if not (0 < epsilon <= 0.5):
        raise InvalidEpsilon(f"epsilon must lie in (0, 0.5], got {epsilon!r}")
    demand = _as_array(m).copy()
    c = _as_array(cap).copy()
    n = demand.shape[0]
    np.fill_diagonal(demand, 0.0)
    np.fill_diagonal(c, 0.0)
    if not (demand > 0).any():
        raise ZeroDemand("traffic matrix has no demand")

    edges = c > 0
    safe_cap = np.where(edges, c, 1.0)
    hops = dijkstra(csr_matrix(edges.astype(float)), directed=True, unweighted=True)
    unreachable = (demand > 0) & np.isinf(hops)
    if unreachable.any():
        u, v = np.argwhere(unreachable)[0]
        return ThroughputReport(0.0, MULTI_HOP, epsilon, (int(u), int(v)), 0.0)

    # rescale so the optimum is O(1); phase counts then do not depend on units
    direct = single_hop_throughput(demand, c).theta
    guess = direct if direct else float(c.sum() / (demand * hops)[demand > 0].sum())
    demand_s = demand * guess
    sources = np.flatnonzero(demand_s.sum(axis=1) > 0)

    rows, cols = np.nonzero(edges)
    length = np.zeros((n, n))
    length[edges] = 1.0 / c[edges]
    graph = csr_matrix((length[rows, cols], (rows, cols)), shape=(n, n))
    csr_rows = np.repeat(np.arange(n), np.diff(graph.indptr))

    def set_lengths():
        graph.data[:] = length[csr_rows, graph.indices]

    flow_all = np.zeros((n, n, n))
    step = epsilon
    best_ub = math.inf
    best = (0.0, None)  # (theta in scaled units, per-source flow already divided by congestion)
    phases = 0
    tail = np.zeros((n, n, n))
    tail_start = 0
    stall_budget = int(4 * math.log(edges.sum() + 1) / step**2) + 10
    since_change = 0

    while phases < max_phases:
        remaining = demand_s.copy()
        while remaining.max() > 0:
            set_lengths()
            _, pred = dijkstra(graph, directed=True, indices=sources, return_predecessors=True)
            full_pred = np.full((n, n), -9999, dtype=np.int64)
            full_pred[sources] = pred
            loads = _tree_loads(full_pred, remaining)
            edge_load = loads.sum(axis=0)
            used = edge_load > 0
            sigma = min(1.0, float((c[used] / edge_load[used]).min()))
            flow_all += sigma * loads
            tail += sigma * loads
            length *= 1.0 + step * sigma * edge_load / safe_cap
            remaining = remaining * (1.0 - sigma) if sigma < 1.0 else np.zeros_like(remaining)
            remaining[remaining < 1e-12 * demand_s.max()] = 0.0
        phases += 1
        length /= length[edges].max()

        for acc, count in ((flow_all, phases), (tail, phases - tail_start)):
            congestion = float((acc.sum(axis=0)[edges] / c[edges]).max())
            if count and count / congestion > best[0]:
                best = (count / congestion, acc / congestion)
        if phases >= 2 * max(tail_start, 1):
            tail = np.zeros((n, n, n))
            tail_start = phases

        set_lengths()
        dist = dijkstra(graph, directed=True, indices=sources)
        alpha = float((demand_s[sources] * dist).sum(where=demand_s[sources] > 0))
        best_ub = min(best_ub, float((length[edges] * c[edges]).sum() / alpha))
        if best[0] >= (1.0 - epsilon) * best_ub:
            break
        since_change += 1
        if since_change > stall_budget:
            step /= 2
            stall_budget *= 4
            since_change = 0

    theta_s, source_flows = best
    return ThroughputReport(
        theta=theta_s * guess,
        routing_mode=MULTI_HOP,
        epsilon=epsilon,
        upper_bound=best_ub * guess,
        phases=phases,
        source_flows=source_flows,
        demand=demand,
    )


def single_hop_bound(k: int, duty: float) -> float:
    return (k - 1) / k * duty


def verify_single_hop_bound(
    m: TrafficMatrix,
    k: int = 3,
    d_hat: int | None = None,
    slot_ns: int = DEFAULT_SLOT_NS,
    reconfig_ns: int = DEFAULT_RECONFIG_NS,
    seed: int = 0,
) -> bool:
    sched = build_vermilion_schedule(m, k, d_hat, slot_ns, reconfig_ns, seed)
    rep = single_hop_throughput(m, emulated_capacities(sched, m.c))
    if rep.unbounded:
        return True
    return rep.theta >= single_hop_bound(k, sched.duty) - 1e-12


@dataclass
class SweepRow:
    k: int
    min_theta: float
    bound: float
    duty: float

    def as_tuple(self):
        return (self.k, self.min_theta, self.bound)


def saturated_matrices(n: int, trials: int, seed: int, c: float = 1.0, d_hat: int = 1):
    rng = np.random.default_rng(seed)
    return [validate_hose(random_saturated(n, rng, c * d_hat), c, d_hat) for _ in range(trials)]


def k_sweep(
    ks,
    n: int = 16,
    d_hat: int = 4,
    trials: int = 20,
    seed: int = 1,
    c: float = 25e9,
    slot_ns: int = DEFAULT_SLOT_NS,
    reconfig_ns: int = DEFAULT_RECONFIG_NS,
) -> list[SweepRow]:
    """Minimum single-hop throughput over random saturated matrices, per k.

    The same matrices are reused for every k.
    """
    mats = saturated_matrices(n, trials, seed, c, d_hat)
    rows = []
    for k in ks:
        thetas = []
        duty = 1.0 - reconfig_ns / slot_ns
        for i, m in enumerate(mats):
            sched = build_vermilion_schedule(m, k, d_hat, slot_ns, reconfig_ns, seed + i)
            thetas.append(single_hop_throughput(m, emulated_capacities(sched, c)).theta)
        rows.append(SweepRow(k, float(min(thetas)), single_hop_bound(k, duty), duty))
    return rows
