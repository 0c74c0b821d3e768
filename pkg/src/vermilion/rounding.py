"""Controlled rounding of a scaled traffic matrix.

Every entry goes to its floor or ceiling, and so does every row and column
sum. The rounding is read off an integral feasible flow in a bipartite
network with lower bounds (Bacharach's construction).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible
from .matrix import ScaledMatrix

SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class IntegerMatrix:
    entries: np.ndarray  # int64, edge multiplicities

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def snap(a):
    """Pull values within SNAP_TOL (relative) of an integer onto it."""
    a = np.asarray(a, dtype=float)
    r = np.rint(a)
    close = np.abs(a - r) <= SNAP_TOL * np.maximum(1.0, np.abs(a))
    return np.where(close, r, a)


class _MaxFlow:
    """Dinic's algorithm on integer capacities.

    Arcs are scanned in insertion order, so results are deterministic.
    """

    def __init__(self, n_nodes: int):
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_arc(self, u: int, v: int, cap: int) -> int:
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.adj[u].append(idx)
        self.adj[v].append(idx + 1)
        return idx

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def _levels(self, s: int, t: int):
        level = [-1] * len(self.adj)
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if self.cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while (level := self._levels(s, t)) is not None:
            it = [0] * len(self.adj)
            while True:
                pushed = self._augment(s, t, level, it)
                if not pushed:
                    break
                total += pushed
        return total

    def _augment(self, s, t, level, it) -> int:
        # iterative DFS along the level graph
        path: list[int] = []
        u = s
        while True:
            if u == t:
                f = min(self.cap[e] for e in path)
                for e in path:
                    self.cap[e] -= f
                    self.cap[e ^ 1] += f
                return f
            adj = self.adj[u]
            while it[u] < len(adj):
                e = adj[it[u]]
                v = self.to[e]
                if self.cap[e] > 0 and level[v] == level[u] + 1:
                    break
                it[u] += 1
            else:
                if not path:
                    return 0
                level[u] = -1  # dead end
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1
                continue
            path.append(e)
            u = self.to[e]


def _feasible_flow(n_nodes, arcs, s, t):
    """Integral flow respecting lower bounds on a circulation-with-(s,t) network.

    `arcs` is a list of (u, v, lo, hi). Returns per-arc flow values.
    """
    g = _MaxFlow(n_nodes + 2)
    ss, tt = n_nodes, n_nodes + 1
    excess = [0] * n_nodes
    ids = []
    for u, v, lo, hi in arcs:
        if lo > hi:
            raise Infeasible(f"arc {u}->{v} has bounds [{lo}, {hi}]")
        ids.append(g.add_arc(u, v, hi - lo))
        excess[v] += lo
        excess[u] -= lo
    g.add_arc(t, s, sum(hi for *_, hi in arcs) + 1)
    need = 0
    for v, ex in enumerate(excess):
        if ex > 0:
            g.add_arc(ss, v, ex)
            need += ex
        elif ex < 0:
            g.add_arc(v, tt, -ex)
    if g.max_flow(ss, tt) != need:
        raise Infeasible("no feasible rounding flow; this is a bug for valid inputs")
    return [lo + g.flow_on(i) for i, (_, _, lo, _) in zip(ids, arcs)]


def round_array(s) -> np.ndarray:
    """Round a nonnegative real matrix so entries and line sums go to floor/ceil."""
    a = snap(s)
    if np.any(a < 0):
        raise ValueError("rounding expects nonnegative entries")
    n_rows, n_cols = a.shape
    base = np.floor(a).astype(np.int64)
    frac = a - base
    row_sums = snap(a.sum(axis=1))
    col_sums = snap(a.sum(axis=0))

    src, sink = 0, 1 + n_rows + n_cols
    arcs = []
    for i in range(n_rows):
        fixed = int(base[i].sum())
        arcs.append((src, 1 + i, math.floor(row_sums[i]) - fixed, math.ceil(row_sums[i]) - fixed))
    cells = []
    for i in range(n_rows):
        for j in range(n_cols):
            if frac[i, j] > 0:
                cells.append((i, j))
                arcs.append((1 + i, 1 + n_rows + j, 0, 1))
    for j in range(n_cols):
        fixed = int(base[:, j].sum())
        arcs.append(
            (1 + n_rows + j, sink, math.floor(col_sums[j]) - fixed, math.ceil(col_sums[j]) - fixed)
        )
    flows = _feasible_flow(sink + 1, arcs, src, sink)
    out = base.copy()
    for (i, j), f in zip(cells, flows[n_rows : n_rows + len(cells)]):
        out[i, j] += f
    return out


def round_matrix(sm: ScaledMatrix) -> IntegerMatrix:
    out = round_array(sm.entries)
    bound = sm.sum_bound
    if out.sum(axis=1).max(initial=0) > bound or out.sum(axis=0).max(initial=0) > bound:
        raise Infeasible("rounded line sum exceeds (k-1)*n")
    out.setflags(write=False)
    return IntegerMatrix(out)


def is_valid_rounding(s, r) -> bool:
    """Independent check of the floor/ceil contract (used by tests and `validate`)."""
    a = snap(s)
    r = np.asarray(r)

    def ok(x, y):
        return np.all((y == np.floor(x)) | (y == np.ceil(x)))

    return bool(
        ok(a, r)
        and ok(snap(a.sum(axis=1)), r.sum(axis=1))
        and ok(snap(a.sum(axis=0)), r.sum(axis=0))
    )
