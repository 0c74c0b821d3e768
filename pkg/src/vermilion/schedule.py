"""Periodic circuit schedules: Vermilion, oblivious rotation, greedy max-weight.

Matching i of a flat sequence runs on plane ``i % d_hat`` in slot ``i // d_hat``.
Times are kept in integer nanoseconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .decomposition import (
    AWARE,
    OBLIVIOUS,
    PHASE_TAGS,
    ROUND_ROBIN,
    Matching,
    decompose_structured,
    union_multiplicity,
)
from .errors import ScheduleFormatError, ValidationError
from .matrix import TrafficMatrix, normalize, scale
from .rounding import IntegerMatrix, round_matrix
from .topology import Multigraph, build_emulated

DEFAULT_K = 3
DEFAULT_RECONFIG_NS = 500
DEFAULT_SLOT_NS = 9 * DEFAULT_RECONFIG_NS


@dataclass(frozen=True, eq=False)
class PeriodicSchedule:
    n: int
    d_hat: int
    k: int  # 0 for baselines
    slot_ns: int
    reconfig_ns: int
    planes: tuple[tuple[Matching, ...], ...]
    phases: tuple[tuple[str, ...], ...]
    seed: int = 0
    padding: int = 0

    def __post_init__(self):
        if self.reconfig_ns < 0 or self.reconfig_ns >= self.slot_ns:
            raise ValidationError(
                f"need 0 <= reconfig_ns < slot_ns (got {self.reconfig_ns}, {self.slot_ns})"
            )
        if len(self.planes) != self.d_hat or len(self.phases) != self.d_hat:
            raise ValidationError(f"expected {self.d_hat} planes")
        lengths = {len(p) for p in self.planes} | {len(p) for p in self.phases}
        if len(lengths) != 1:
            raise ValidationError("planes must all have the same number of slots")
        for plane in self.planes:
            for m in plane:
                if m.n != self.n:
                    raise ValidationError(f"matching over {m.n} nodes in an n={self.n} schedule")
        for tags in self.phases:
            for t in tags:
                if t not in PHASE_TAGS:
                    raise ValidationError(f"unknown phase tag {t!r}")

    @property
    def period(self) -> int:
        """Slots per period (Gamma)."""
        return len(self.planes[0])

    @property
    def duty(self) -> float:
        return 1.0 - self.reconfig_ns / self.slot_ns

    @property
    def period_ns(self) -> int:
        return self.period * self.slot_ns

    def matchings(self) -> list[Matching]:
        """Flat matching sequence in execution order (slot-major, then plane)."""
        return [self.planes[p][s] for s in range(self.period) for p in range(self.d_hat)]

    def tags(self) -> list[str]:
        return [self.phases[p][s] for s in range(self.period) for p in range(self.d_hat)]

    def slot(self, s: int) -> list[Matching]:
        s %= self.period
        return [plane[s] for plane in self.planes]

    def slot_tags(self, s: int) -> list[str]:
        s %= self.period
        return [tags[s] for tags in self.phases]

    def pair_counts(self) -> np.ndarray:
        """Circuits u->v per period, summed over planes; self-loops zeroed."""
        e = union_multiplicity(self.matchings(), self.n)
        np.fill_diagonal(e, 0)
        return e

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d_hat,
            "k": self.k,
            "slot_ns": self.slot_ns,
            "reconfig_ns": self.reconfig_ns,
            "seed": self.seed,
            "padding": self.padding,
            "planes": [[list(m.dst) for m in plane] for plane in self.planes],
            "phases": [list(t) for t in self.phases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "PeriodicSchedule":
        try:
            planes = tuple(tuple(Matching(tuple(m)) for m in plane) for plane in obj["planes"])
            return cls(
                n=int(obj["n"]),
                d_hat=int(obj["d"]),
                k=int(obj.get("k", 0)),
                slot_ns=int(obj["slot_ns"]),
                reconfig_ns=int(obj["reconfig_ns"]),
                planes=planes,
                phases=tuple(tuple(t) for t in obj["phases"]),
                seed=int(obj.get("seed", 0)),
                padding=int(obj.get("padding", 0)),
            )
        except (KeyError, TypeError) as e:
            raise ScheduleFormatError(f"malformed schedule: {e!r}") from None
        except ValueError as e:
            raise ScheduleFormatError(str(e)) from None

    @classmethod
    def from_json(cls, text: str) -> "PeriodicSchedule":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScheduleFormatError(f"bad schedule JSON: {e}") from None
        return cls.from_dict(obj)


@dataclass(frozen=True, eq=False)
class CapacityMatrix:
    cap: np.ndarray  # bits/s

    @property
    def n(self) -> int:
        return self.cap.shape[0]


@dataclass
class VermilionBuild:
    """Intermediate products of the pipeline, kept for inspection and the CLI."""

    schedule: PeriodicSchedule
    rounded: IntegerMatrix
    graph: Multigraph
    scaled: np.ndarray = field(repr=False)


def assemble(matchings, tags, n, d_hat, k, slot_ns, reconfig_ns, seed=0, pad_tag=None):
    """Spread a flat matching list over `d_hat` planes, padding with idle matchings."""
    matchings = list(matchings)
    tags = list(tags)
    pad = (-len(matchings)) % d_hat
    matchings += [Matching.identity(n)] * pad
    tags += [pad_tag or (tags[-1] if tags else OBLIVIOUS)] * pad
    planes = tuple(tuple(matchings[p::d_hat]) for p in range(d_hat))
    phases = tuple(tuple(tags[p::d_hat]) for p in range(d_hat))
    return PeriodicSchedule(n, d_hat, k, int(slot_ns), int(reconfig_ns), planes, phases, seed, pad)


def vermilion_pipeline(
    m: TrafficMatrix,
    k: int = DEFAULT_K,
    d_hat: int | None = None,
    slot_ns: int = DEFAULT_SLOT_NS,
    reconfig_ns: int = DEFAULT_RECONFIG_NS,
    seed: int = 0,
) -> VermilionBuild:
    d_hat = m.d_hat if d_hat is None else d_hat
    scaled = scale(normalize(m), k)
    rounded = round_matrix(scaled)
    graph = build_emulated(rounded, k, seed)
    phased = decompose_structured(graph, rounded)
    sched = assemble(phased.matchings, phased.tags, m.n, d_hat, k, slot_ns, reconfig_ns, seed, AWARE)
    return VermilionBuild(sched, rounded, graph, scaled.entries)


def build_vermilion_schedule(
    m: TrafficMatrix,
    k: int = DEFAULT_K,
    d_hat: int | None = None,
    slot_ns: int = DEFAULT_SLOT_NS,
    reconfig_ns: int = DEFAULT_RECONFIG_NS,
    seed: int = 0,
) -> PeriodicSchedule:
    return vermilion_pipeline(m, k, d_hat, slot_ns, reconfig_ns, seed).schedule


def build_oblivious_schedule(
    n: int, d_hat: int = 1, slot_ns: int = DEFAULT_SLOT_NS, reconfig_ns: int = DEFAULT_RECONFIG_NS
) -> PeriodicSchedule:
    rots = [Matching.rotation(n, i) for i in range(1, n)]
    return assemble(rots, [OBLIVIOUS] * len(rots), n, d_hat, 0, slot_ns, reconfig_ns)


def build_greedy_schedule(
    m: TrafficMatrix,
    d_hat: int | None = None,
    slots: int | None = None,
    slot_ns: int = DEFAULT_SLOT_NS,
    reconfig_ns: int = DEFAULT_RECONFIG_NS,
) -> PeriodicSchedule:
    """Max-weight matching per slot against the still-unserved demand."""
    n = m.n
    d_hat = m.d_hat if d_hat is None else d_hat
    if slots is None:
        slots = -(-DEFAULT_K * n // d_hat)
    if slots < 1:
        raise ValidationError("greedy schedule needs at least one slot")
    duty = 1.0 - reconfig_ns / slot_ns
    per_slot = m.c * duty / slots
    residual = np.array(m.entries, dtype=float)
    forbid = -(residual.sum() + 1.0)
    out = []
    for _ in range(slots * d_hat):
        w = residual.copy()
        if n > 1:
            np.fill_diagonal(w, forbid)
        _, cols = linear_sum_assignment(w, maximize=True)
        out.append(Matching(tuple(int(c) for c in cols)))
        residual[np.arange(n), cols] = np.maximum(residual[np.arange(n), cols] - per_slot, 0.0)
    return assemble(out, [AWARE] * len(out), n, d_hat, 0, slot_ns, reconfig_ns)


def emulated_capacities(s: PeriodicSchedule, c: float) -> CapacityMatrix:
    """Time-averaged pair capacity: count * c * duty / Gamma (bits/s)."""
    return CapacityMatrix(s.pair_counts() * (c * s.duty / s.period))


def check_schedule(s: PeriodicSchedule) -> list[str]:
    """Structural problems in a schedule; empty list when it is well formed."""
    problems = []
    flat = s.matchings()
    tags = s.tags()
    if s.k > 0:
        n = s.n
        if len(flat) != s.k * n + s.padding:
            problems.append(f"expected k*n + padding = {s.k * n + s.padding} matchings, got {len(flat)}")
        rr = [m for m, t in zip(flat, tags) if t == ROUND_ROBIN]
        if sorted(m.dst for m in rr) != sorted(Matching.rotation(n, i).dst for i in range(1, n)):
            problems.append("round-robin block is not the n-1 rotations")
    for i, m in enumerate(flat):
        if len(set(m.dst)) != s.n:
            problems.append(f"matching {i} is not a bijection")
    return problems
