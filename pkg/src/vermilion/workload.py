"""Flow-size distributions and flow arrival traces."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import BadDistributionFile
from .matrix import max_line_sum, permutation, random_derangement

BUILTIN_HEAVY_TAIL = "builtin:heavy_tail"


@dataclass(frozen=True, eq=False)
class FlowSizeDist:
    """Piecewise-linear empirical CDF over flow sizes in bytes."""

    sizes: np.ndarray
    probs: np.ndarray

    @classmethod
    def constant(cls, size: int) -> "FlowSizeDist":
        return cls(np.array([float(size)]), np.array([1.0]))

    @classmethod
    def from_points(cls, points) -> "FlowSizeDist":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise BadDistributionFile("need rows of (bytes, cumulative probability)")
        sizes, probs = pts[:, 0], pts[:, 1]
        if np.any(sizes <= 0):
            raise BadDistributionFile("flow sizes must be positive")
        if np.any(np.diff(sizes) <= 0) or np.any(np.diff(probs) <= 0):
            raise BadDistributionFile("CDF must be strictly increasing in size and probability")
        if probs[0] < 0 or abs(probs[-1] - 1.0) > 1e-9:
            raise BadDistributionFile("cumulative probabilities must start >= 0 and end at 1")
        probs = probs.copy()
        probs[-1] = 1.0
        return cls(sizes, probs)

    @classmethod
    def from_file(cls, path) -> "FlowSizeDist":
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise BadDistributionFile(f"cannot read {path}: {e}") from None
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text: str) -> "FlowSizeDist":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise BadDistributionFile(f"expected two columns, got {line!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise BadDistributionFile(f"non-numeric row {line!r}") from None
        return cls.from_points(rows)

    @classmethod
    def parse(cls, spec: str) -> "FlowSizeDist":
        """``builtin:heavy_tail``, ``constant:<bytes>`` or a CDF file path."""
        if spec == BUILTIN_HEAVY_TAIL:
            text = resources.files("vermilion").joinpath("data/heavy_tail_cdf.csv").read_text()
            return cls.from_text(text)
        if spec.startswith("constant:"):
            try:
                size = int(float(spec.split(":", 1)[1]))
            except ValueError:
                raise BadDistributionFile(f"bad constant size in {spec!r}") from None
            if size <= 0:
                raise BadDistributionFile("constant flow size must be positive")
            return cls.constant(size)
        return cls.from_file(spec)

    def mean(self) -> float:
        m = self.probs[0] * self.sizes[0]
        m += float(np.sum(np.diff(self.probs) * (self.sizes[1:] + self.sizes[:-1]) / 2))
        return float(m)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        u = rng.random(count)
        x = np.interp(u, self.probs, self.sizes, left=self.sizes[0])
        return np.maximum(1, np.rint(x)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class FlowTrace:
    src: np.ndarray
    dst: np.ndarray
    size: np.ndarray  # bytes
    arrival: np.ndarray  # ns, sorted

    def __len__(self) -> int:
        return len(self.src)


def pattern_matrix(pattern: str, n: int, rng: np.random.Generator, matrix=None) -> np.ndarray:
    """Relative demand used both for destinations and for building traffic-aware schedules."""
    if pattern == "uniform":
        a = np.ones((n, n))
        np.fill_diagonal(a, 0.0)
        return a / (n - 1)
    if pattern == "permutation":
        return permutation(random_derangement(n, rng))
    if pattern == "matrix":
        a = np.asarray(matrix, dtype=float)
        s = max_line_sum(a)
        return a / s if s else a
    raise ValueError(f"unknown pattern {pattern!r}")


def generate_workload(
    n: int,
    node_rate_bps: float,
    load: float,
    duration_ns: int,
    dist: FlowSizeDist,
    demand: np.ndarray,
    rng: np.random.Generator,
    arrivals: str = "poisson",
) -> FlowTrace:
    """Per-source flow arrivals at `load` of the node rate.

    `demand` is a relative matrix with line sums <= 1; source u sends at
    load * rate * rowsum(u) and picks destinations proportional to its row.
    """
    mean_bits = dist.mean() * 8
    srcs, dsts, sizes, times = [], [], [], []
    if load > 0:
        for u in range(n):
            row = np.asarray(demand[u], dtype=float)
            share = row.sum()
            if share <= 0:
                continue
            rate = load * node_rate_bps * share / mean_bits  # flows per second
            if arrivals == "poisson":
                expect = rate * duration_ns * 1e-9
                count = int(expect + 10 * np.sqrt(expect + 1) + 10)
                gaps = rng.exponential(1e9 / rate, count)
                t = np.cumsum(gaps)
                while t[-1] < duration_ns:
                    t = np.concatenate([t, t[-1] + np.cumsum(rng.exponential(1e9 / rate, count))])
                t = np.floor(t[t < duration_ns]).astype(np.int64)
            elif arrivals == "periodic":
                gap = int(round(1e9 / rate))
                t = np.arange(0, duration_ns, max(gap, 1), dtype=np.int64)
            else:
                raise ValueError(f"unknown arrival process {arrivals!r}")
            m = len(t)
            p = row / share
            if np.count_nonzero(p) == 1:
                d = np.full(m, int(np.flatnonzero(p)[0]))
            else:
                d = rng.choice(n, size=m, p=p)
            srcs.append(np.full(m, u))
            dsts.append(d)
            sizes.append(dist.sample(rng, m))
            times.append(t)
    if not srcs:
        empty = np.zeros(0, dtype=np.int64)
        return FlowTrace(empty, empty, empty, empty)
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    size = np.concatenate(sizes)
    arrival = np.concatenate(times)
    order = np.lexsort((src, arrival))
    return FlowTrace(src[order], dst[order], size[order], arrival[order])
