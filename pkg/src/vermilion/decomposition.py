"""Perfect-matching decompositions.

``decompose_regular`` peels a d-regular directed multigraph into d perfect
matchings. ``bvn_decompose`` / ``bvn_quantize`` provide the Birkhoff-von Neumann
baseline and the fixed-slot quantization of its variable-length terms.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import MatchingNotFound, NotRegular, NotSubstochastic
from .rounding import IntegerMatrix, snap
from .topology import Multigraph, residual_complete

ROUND_ROBIN = "rr"
AWARE = "aware"
OBLIVIOUS = "obl"
PHASE_TAGS = (ROUND_ROBIN, AWARE, OBLIVIOUS)


@dataclass(frozen=True)
class Matching:
    """One slot's circuits: node u transmits to dst[u]. dst[u] == u is an idle port."""

    dst: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dst", tuple(int(x) for x in self.dst))
        if sorted(self.dst) != list(range(len(self.dst))):
            raise ValueError(f"not a permutation: {self.dst}")

    @property
    def n(self) -> int:
        return len(self.dst)

    @classmethod
    def rotation(cls, n: int, shift: int) -> "Matching":
        return cls(tuple((u + shift) % n for u in range(n)))

    @classmethod
    def identity(cls, n: int) -> "Matching":
        return cls(tuple(range(n)))

    def as_matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n), dtype=np.int64)
        p[np.arange(self.n), self.dst] = 1
        return p


@dataclass(frozen=True)
class BvnTerm:
    coefficient: float
    permutation: Matching


@dataclass
class PhasedMatchings:
    matchings: list[Matching]
    tags: list[str]

    def block(self, tag: str) -> list[Matching]:
        return [m for m, t in zip(self.matchings, self.tags) if t == tag]


def _hopcroft_karp(adj: list[list[int]], n: int, match_l: list[int]) -> list[int]:
    """Maximum bipartite matching, warm-started from `match_l` (-1 = free).

    `adj[u]` lists right vertices in ascending order; scan order fixes the result.
    """
    match_r = [-1] * n
    for u, v in enumerate(match_l):
        if v >= 0:
            match_r[v] = u
    inf = n + 1
    while True:
        dist = [inf] * n
        q = deque(u for u in range(n) if match_l[u] < 0)
        for u in q:
            dist[u] = 0
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        if not found:
            return match_l
        it = [0] * n
        for root in range(n):
            if match_l[root] >= 0:
                continue
            # iterative DFS over the layered graph
            stack = [root]
            while stack:
                u = stack[-1]
                advanced = False
                while it[u] < len(adj[u]):
                    v = adj[u][it[u]]
                    it[u] += 1
                    w = match_r[v]
                    if w < 0:
                        # augment along the stack
                        for x in reversed(stack):
                            prev = match_l[x]
                            match_l[x] = v
                            match_r[v] = x
                            v = prev
                        stack = []
                        advanced = True
                        break
                    if dist[w] == dist[u] + 1:
                        stack.append(w)
                        advanced = True
                        break
                if not advanced:
                    dist[u] = inf
                    stack.pop()


def perfect_matching(support: np.ndarray, hint: list[int] | None = None) -> list[int] | None:
    """A perfect matching of the bipartite graph whose biadjacency is `support`."""
    n = support.shape[0]
    adj = [np.flatnonzero(row).tolist() for row in support]
    match_l = [-1] * n
    if hint is not None:
        used = set()
        for u, v in enumerate(hint):
            if v >= 0 and support[u, v] and v not in used:
                match_l[u] = v
                used.add(v)
    match_l = _hopcroft_karp(adj, n, match_l)
    if any(v < 0 for v in match_l):
        return None
    return match_l


def _regular_degree(e: np.ndarray) -> int:
    out_deg = e.sum(axis=1)
    in_deg = e.sum(axis=0)
    d = int(out_deg[0]) if len(out_deg) else 0
    if np.any(out_deg != d) or np.any(in_deg != d):
        raise NotRegular(f"out-degrees {out_deg.tolist()} / in-degrees {in_deg.tolist()} not uniform")
    return d


def decompose_edges(edge_mult) -> list[Matching]:
    """Split a d-regular multiplicity matrix into exactly d perfect matchings."""
    rem = np.array(edge_mult, dtype=np.int64)
    d = _regular_degree(rem)
    out = []
    hint = None
    for _ in range(d):
        m = perfect_matching(rem > 0, hint)
        if m is None:
            raise MatchingNotFound("regular remainder without a perfect matching")
        rem[np.arange(len(m)), m] -= 1
        out.append(Matching(tuple(m)))
        hint = m
    return out


def decompose_regular(g: Multigraph) -> list[Matching]:
    g.check_regular()
    return decompose_edges(g.edge_mult)


def decompose_structured(g: Multigraph, rounded: IntegerMatrix) -> PhasedMatchings:
    """Round-robin block (the n-1 rotations carrying the residual edges) then the aware block."""
    g.check_regular()
    n = g.n
    rr = [Matching.rotation(n, i) for i in range(1, n)]
    aware = decompose_edges(np.asarray(g.edge_mult) - residual_complete(n))
    return PhasedMatchings(rr + aware, [ROUND_ROBIN] * len(rr) + [AWARE] * len(aware))


def union_multiplicity(matchings, n: int | None = None) -> np.ndarray:
    if n is None:
        n = matchings[0].n
    e = np.zeros((n, n), dtype=np.int64)
    for m in matchings:
        e[np.arange(n), m.dst] += 1
    return e


# --- Birkhoff-von Neumann ---------------------------------------------------


def _pad_doubly_stochastic(d: np.ndarray) -> np.ndarray:
    """Fill row/column slack up to 1, off the diagonal first."""
    n = d.shape[0]
    a = d.copy()
    r = np.clip(1.0 - a.sum(axis=1), 0.0, None)
    c = np.clip(1.0 - a.sum(axis=0), 0.0, None)
    for allow_diag in (False, True):
        for i in range(n):
            for j in range(n):
                if (i == j and not allow_diag) or r[i] <= 0 or c[j] <= 0:
                    continue
                x = min(r[i], c[j])
                a[i, j] += x
                r[i] -= x
                c[j] -= x
    return a


def bvn_decompose(d, tol: float = 1e-9) -> list[BvnTerm]:
    a = np.array(d, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSubstochastic(f"need a square matrix, got {a.shape}")
    if np.any(a < -tol):
        raise NotSubstochastic("negative entry")
    if a.sum(axis=1).max(initial=0) > 1 + tol or a.sum(axis=0).max(initial=0) > 1 + tol:
        raise NotSubstochastic("a row or column sums above 1")
    a = _pad_doubly_stochastic(np.clip(a, 0.0, None))
    n = a.shape[0]
    terms = []
    hint = None
    while a.max(initial=0) > tol:
        m = perfect_matching(a > tol, hint)
        if m is None:
            break
        idx = (np.arange(n), np.asarray(m))
        lam = float(a[idx].min())
        a[idx] -= lam
        a[a <= tol] = 0.0
        terms.append(BvnTerm(lam, Matching(tuple(m))))
        hint = m
    return terms


def bvn_reconstruct(terms, n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for t in terms:
        out += t.coefficient * t.permutation.as_matrix()
    return out


@dataclass
class QuantizationReport:
    quantum: float
    copies: list[int]
    schedule_length: int
    total_mass: float
    dropped_mass: float
    dropped_terms: int
    covered: list[float] = field(default_factory=list)

    @property
    def dropped_fraction(self) -> float:
        return self.dropped_mass / self.total_mass if self.total_mass else 0.0

    def to_dict(self) -> dict:
        return {
            "quantum": self.quantum,
            "copies": self.copies,
            "schedule_length": self.schedule_length,
            "total_mass": self.total_mass,
            "dropped_mass": self.dropped_mass,
            "dropped_fraction": self.dropped_fraction,
            "dropped_terms": self.dropped_terms,
            "covered": self.covered,
        }


def bvn_quantize(terms, slot_quantum: float) -> tuple[list[Matching], QuantizationReport]:
    """Repeat each term round(lambda / quantum) times (half away from zero)."""
    if slot_quantum <= 0:
        raise ValueError("slot_quantum must be positive")
    out: list[Matching] = []
    copies = []
    dropped = 0.0
    for t in terms:
        q = float(snap(t.coefficient / slot_quantum))
        cnt = int(math.floor(q + 0.5))
        copies.append(cnt)
        if cnt == 0:
            dropped += t.coefficient
        out.extend([t.permutation] * cnt)
    report = QuantizationReport(
        quantum=slot_quantum,
        copies=copies,
        schedule_length=len(out),
        total_mass=float(sum(t.coefficient for t in terms)),
        dropped_mass=dropped,
        dropped_terms=sum(1 for c in copies if c == 0),
        covered=[c * slot_quantum for c in copies],
    )
    return out, report
