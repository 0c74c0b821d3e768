"""Emulated multigraph: rounded demand edges + one residual edge per pair + regular fill."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DeficitMismatch, NotRegular
from .rounding import IntegerMatrix


@dataclass(frozen=True, eq=False)
class Multigraph:
    edge_mult: np.ndarray  # n x n int64; self-loops only from the fill stage
    degree: int

    @property
    def n(self) -> int:
        return self.edge_mult.shape[0]

    def check_regular(self) -> None:
        out_deg = self.edge_mult.sum(axis=1)
        in_deg = self.edge_mult.sum(axis=0)
        bad = np.flatnonzero((out_deg != self.degree) | (in_deg != self.degree))
        if len(bad):
            u = int(bad[0])
            raise NotRegular(
                f"node {u} has out-degree {out_deg[u]}, in-degree {in_deg[u]}; expected {self.degree}"
            )


@dataclass(frozen=True)
class DegreeDeficit:
    out_deficit: tuple[int, ...]
    in_deficit: tuple[int, ...]


def degree_deficit(edge_mult: np.ndarray, degree: int) -> DegreeDeficit:
    out_d = degree - edge_mult.sum(axis=1)
    in_d = degree - edge_mult.sum(axis=0)
    if np.any(out_d < 0) or np.any(in_d < 0):
        raise DeficitMismatch("multigraph already exceeds the target degree")
    return DegreeDeficit(tuple(int(x) for x in out_d), tuple(int(x) for x in in_d))


def configuration_fill(deficit: DegreeDeficit, seed: int) -> np.ndarray:
    """Pair out-stubs with shuffled in-stubs. Self-loops and parallel edges allowed."""
    out_d = np.asarray(deficit.out_deficit, dtype=np.int64)
    in_d = np.asarray(deficit.in_deficit, dtype=np.int64)
    if out_d.sum() != in_d.sum():
        raise DeficitMismatch(f"out-stubs {out_d.sum()} != in-stubs {in_d.sum()}")
    n = len(out_d)
    delta = np.zeros((n, n), dtype=np.int64)
    if out_d.sum() == 0:
        return delta
    rng = np.random.default_rng(seed)
    out_stubs = np.repeat(np.arange(n), out_d)
    in_stubs = rng.permutation(np.repeat(np.arange(n), in_d))
    np.add.at(delta, (out_stubs, in_stubs), 1)
    return delta


def residual_complete(n: int) -> np.ndarray:
    j = np.ones((n, n), dtype=np.int64)
    np.fill_diagonal(j, 0)
    return j


def build_emulated(r: IntegerMatrix, k: int, seed: int) -> Multigraph:
    n = r.n
    degree = k * n
    e = np.asarray(r.entries, dtype=np.int64) + residual_complete(n)
    e = e + configuration_fill(degree_deficit(e, degree), seed)
    e.setflags(write=False)
    g = Multigraph(e, degree)
    g.check_regular()
    return g
