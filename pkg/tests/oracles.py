"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog


def lp_concurrent_flow(cap: np.ndarray, demand: np.ndarray) -> float:
    """Exact max concurrent flow by LP over per-source edge flows.

    Variables: f[s, e] for each source s and directed edge e with cap > 0,
    plus theta. Maximise theta subject to conservation and capacity.
    """
    cap = np.asarray(cap, dtype=float)
    demand = np.asarray(demand, dtype=float)
    n = cap.shape[0]
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and cap[u, v] > 0]
    sources = [s for s in range(n) if demand[s].sum() > 0]
    ne = len(edges)
    nvar = len(sources) * ne + 1
    theta = nvar - 1
    a_eq, b_eq = [], []
    for si, s in enumerate(sources):
        for v in range(n):
            if v == s:
                continue
            row = np.zeros(nvar)
            for ei, (a, b) in enumerate(edges):
                if b == v:
                    row[si * ne + ei] += 1
                if a == v:
                    row[si * ne + ei] -= 1
            row[theta] = -demand[s, v]
            a_eq.append(row)
            b_eq.append(0.0)
    a_ub = np.zeros((ne, nvar))
    for ei, (a, b) in enumerate(edges):
        for si in range(len(sources)):
            a_ub[ei, si * ne + ei] = 1
    b_ub = np.array([cap[a, b] for a, b in edges])
    c = np.zeros(nvar)
    c[theta] = -1
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=np.array(a_eq), b_eq=np.array(b_eq), bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.x[theta])


def feasible_roundings(s: np.ndarray) -> np.ndarray:
    """All integer matrices whose entries and line sums sit at floor or ceil of `s`."""
    s = np.asarray(s, dtype=float)
    lo, hi = np.floor(s).astype(int), np.ceil(s).astype(int)
    free = np.flatnonzero(lo.ravel() != hi.ravel())
    combos = np.array(list(itertools.product((0, 1), repeat=len(free))), dtype=int).reshape(2 ** len(free), len(free))
    cand = np.repeat(lo.ravel()[None, :], len(combos), axis=0)
    cand[:, free] += combos
    cand = cand.reshape(-1, *s.shape)

    def within(x, target):
        return (x == np.floor(target)) | (x == np.ceil(target))

    ok = np.all(within(cand.sum(axis=2), s.sum(axis=1)), axis=1) & np.all(within(cand.sum(axis=1), s.sum(axis=0)), axis=1)
    return cand[ok]


def round_robin_reference(counts, budget):
    """Packet-by-packet round robin starting at queue 0.

    Returns (sent, last_pos, next_queue) where next_queue is the queue that
    would transmit next, or None when every queue is empty.
    """
    left = list(counts)
    sent = [0] * len(counts)
    last = [None] * len(counts)
    pos = 0
    i = 0
    m = len(counts)
    while pos < budget and any(left):
        if left[i]:
            left[i] -= 1
            sent[i] += 1
            pos += 1
            if left[i] == 0:
                last[i] = pos
        i = (i + 1) % m
    nxt = None
    if any(left):
        while not left[i]:
            i = (i + 1) % m
        nxt = i
    return sent, last, nxt


def single_flow_fct(size: int, packet_size: int, pkt_ns: float, window_ns: int, slot_ns: int, live_slots):
    """Completion time of one flow alone in the network, sent direct.

    `live_slots` yields, in order, the indices of slots whose matching carries
    the flow's pair (the flow is assumed to arrive at time 0).
    """
    npk = math.ceil(size / packet_size)
    per_slot = int(math.floor(window_ns / pkt_ns + 1e-9))
    occurrences = math.ceil(npk / per_slot)
    rest = npk - (occurrences - 1) * per_slot
    slot = list(itertools.islice(live_slots, occurrences))[-1]
    return slot * slot_ns + rest * pkt_ns
