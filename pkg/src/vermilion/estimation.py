"""Distributed traffic estimation: quantized counters, all-gather over the
round-robin phase, and per-node EWMA views."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class EstimateArray:
    owner: int
    counts: np.ndarray  # int64, each <= 2**counter_bits - 1


def quantize_counters(voq_bytes, k: int, c: float, slot_s: float, counter_bits: int = 16, owner: int = 0):
    """floor(bits * (k-1) / (k * c * slot)), saturating at the counter width.

    c * slot is the number of bits one link carries in a slot.
    """
    bits = np.asarray(voq_bytes, dtype=float) * 8.0
    q = np.floor(bits * (k - 1) / (k * c * slot_s) + 1e-9)
    top = (1 << counter_bits) - 1
    counts = np.minimum(q, top).astype(np.int64)
    counts.setflags(write=False)
    return EstimateArray(owner, counts)


def payload_bytes(n: int, counter_bits: int = 16) -> int:
    """Bytes one node sends per round-robin slot: its own row of n counters."""
    return -(-n * counter_bits // 8)


class AllGather:
    """Row dissemination over rotation matchings.

    In the rotation with shift i, node u hands its own row to (u + i) mod n.
    After all n-1 shifts every node holds every row.
    """

    def __init__(self, rows):
        self.n = len(rows)
        self.rows = [np.asarray(r.counts if isinstance(r, EstimateArray) else r) for r in rows]
        self.held = [{u: self.rows[u]} for u in range(self.n)]

    def exchange(self, shift: int) -> None:
        for u in range(self.n):
            self.held[(u + shift) % self.n][u] = self.rows[u]

    def complete(self) -> bool:
        return all(len(h) == self.n for h in self.held)

    def matrix(self, node: int) -> np.ndarray:
        h = self.held[node]
        return np.array([h[u] for u in range(self.n)], dtype=float)


def estimation_allgather(rows, shifts) -> list[np.ndarray]:
    """Run a full phase and return each node's assembled matrix."""
    ag = AllGather(rows)
    for s in shifts:
        ag.exchange(s)
    if not ag.complete():
        raise ValueError("round-robin phase did not reach every node")
    return [ag.matrix(u) for u in range(ag.n)]


class EwmaView:
    def __init__(self, n: int, alpha: float):
        if not (0 < alpha <= 1):
            raise ValueError("ewma_alpha must lie in (0, 1]")
        self.alpha = alpha
        self.value = np.zeros((n, n))

    def update(self, gathered: np.ndarray) -> np.ndarray:
        self.value = self.alpha * np.asarray(gathered, dtype=float) + (1 - self.alpha) * self.value
        return self.value
