"""Traffic matrices under the hose model: validation, normalization, scaling, I/O."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    HoseViolation,
    InvalidK,
    MatrixFormatError,
    NegativeEntry,
    NonzeroDiagonal,
)

SUM_RTOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TrafficMatrix:
    """Demand rates in bits/s; row = source, column = destination."""

    entries: np.ndarray
    c: float
    d_hat: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def node_capacity(self) -> float:
        return self.c * self.d_hat

    def is_zero(self) -> bool:
        return not np.any(self.entries)


@dataclass(frozen=True, eq=False)
class NormalizedMatrix:
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class ScaledMatrix:
    entries: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def sum_bound(self) -> int:
        return (self.k - 1) * self.n


def validate_hose(raw, c: float, d_hat: int) -> TrafficMatrix:
    """Check `raw` against the hose bound c*d_hat and wrap it.

    Values are kept exactly as given. Sums may exceed the bound by
    ``1e-9 * c * d_hat`` to absorb float accumulation.
    """
    a = np.asarray(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixFormatError(f"traffic matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MatrixFormatError("traffic matrix has non-finite entries")
    if c <= 0 or int(d_hat) != d_hat or d_hat < 1:
        raise MatrixFormatError(f"need c > 0 and integer d_hat >= 1 (c={c}, d={d_hat})")
    neg = np.argwhere(a < 0)
    if len(neg):
        u, v = neg[0]
        raise NegativeEntry(f"negative demand {a[u, v]!r} at ({u}, {v})")
    diag = np.flatnonzero(np.diag(a))
    if len(diag):
        raise NonzeroDiagonal(f"self-demand at node {diag[0]}")
    limit = c * d_hat
    slack = SUM_RTOL * limit
    for axis, sums in (("row", a.sum(axis=1)), ("col", a.sum(axis=0))):
        over = np.flatnonzero(sums > limit + slack)
        if len(over):
            u = int(over[0])
            raise HoseViolation(u, axis, float(sums[u]), limit)
    return TrafficMatrix(_frozen(a), float(c), int(d_hat))


def max_line_sum(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(max(a.sum(axis=1).max(), a.sum(axis=0).max()))


def normalize(m: TrafficMatrix) -> NormalizedMatrix:
    s = max_line_sum(m.entries)
    if s == 0:
        return NormalizedMatrix(_frozen(np.zeros_like(m.entries)))
    return NormalizedMatrix(_frozen(m.entries / s))


def scale(mn: NormalizedMatrix, k: int) -> ScaledMatrix:
    if int(k) != k or k < 2:
        raise InvalidK(f"k must be an integer >= 2, got {k!r}")
    k = int(k)
    return ScaledMatrix(_frozen(mn.entries * ((k - 1) * mn.n)), k)


# --- generators ------------------------------------------------------------


def ring(n: int, rate: float = 1.0) -> np.ndarray:
    a = np.zeros((n, n))
    a[np.arange(n), (np.arange(n) + 1) % n] = rate
    return a


def permutation(perm, rate: float = 1.0) -> np.ndarray:
    perm = np.asarray(perm)
    n = len(perm)
    a = np.zeros((n, n))
    a[np.arange(n), perm] = rate
    np.fill_diagonal(a, 0.0)
    return a


def uniform(n: int, rate: float = 1.0) -> np.ndarray:
    """All-to-all demand with every row and column summing to `rate`."""
    a = np.full((n, n), rate / (n - 1))
    np.fill_diagonal(a, 0.0)
    return a


def random_derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        p = rng.permutation(n)
        if not np.any(p == np.arange(n)):
            return p


def skewed(n: int, skew: float, rng: np.random.Generator, rate: float = 1.0) -> np.ndarray:
    """Blend of a random permutation (weight `skew`) and uniform all-to-all."""
    return skew * permutation(random_derangement(n, rng), rate) + (1 - skew) * uniform(n, rate)


def random_saturated(
    n: int, rng: np.random.Generator, rate: float = 1.0, terms: int | None = None
) -> np.ndarray:
    """Saturated hose matrix: Dirichlet-weighted sum of random derangements.

    Every row and column sums to `rate` (up to float rounding).
    """
    if terms is None:
        terms = int(rng.integers(1, n + 1))
    w = rng.dirichlet(np.ones(terms))
    a = np.zeros((n, n))
    for wi in w:
        a[np.arange(n), random_derangement(n, rng)] += wi
    return a * rate


# --- file formats ----------------------------------------------------------


def parse_matrix_text(text: str, c: float | None = None, d_hat: int | None = None) -> TrafficMatrix:
    """Parse either the JSON form or CSV with ``# c=`` / ``# d=`` header lines."""
    entries, c, d_hat = parse_matrix_entries(text, c, d_hat)
    if c is None or d_hat is None:
        raise MatrixFormatError("link capacity c and degree d must be given")
    return validate_hose(entries, float(c), int(d_hat))


def parse_matrix_entries(text: str, c: float | None = None, d_hat: int | None = None):
    """Raw entries plus whatever units the text declares (None when absent)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise MatrixFormatError(f"bad matrix JSON: {e}") from None
        entries = obj.get("entries")
        if entries is None:
            raise MatrixFormatError("matrix JSON lacks 'entries'")
        _check_rows(entries)
        if "n" in obj and obj["n"] != len(entries):
            raise MatrixFormatError(f"n={obj['n']} but {len(entries)} rows given")
        c = obj.get("c", c)
        d_hat = obj.get("d", d_hat)
    else:
        entries = []
        for line in text.splitlines():
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                key, _, val = s[1:].strip().partition("=")
                key = key.strip()
                if key == "c":
                    c = float(val)
                elif key == "d":
                    d_hat = int(val)
                continue
            try:
                entries.append([float(x) for x in next(csv.reader([s]))])
            except ValueError as e:
                raise MatrixFormatError(f"bad matrix row {s!r}: {e}") from None
        _check_rows(entries)
    try:
        a = np.array(entries, dtype=float)
    except (TypeError, ValueError) as e:
        raise MatrixFormatError(f"bad matrix entries: {e}") from None
    return a, c, d_hat


def _check_rows(rows):
    if not rows:
        raise MatrixFormatError("empty matrix")
    n = len(rows)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise MatrixFormatError(f"ragged row {i}: {len(r)} entries, expected {n}")


def read_matrix(path, c: float | None = None, d_hat: int | None = None) -> TrafficMatrix:
    path = Path(path)
    text = path.read_text()
    sidecar = path.with_suffix(".json")
    if not text.lstrip().startswith("{") and sidecar.exists() and sidecar != path:
        meta = json.loads(sidecar.read_text())
        c = meta.get("c", c)
        d_hat = meta.get("d", d_hat)
    return parse_matrix_text(text, c, d_hat)


def _fmt(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def format_matrix_csv(entries, c: float | None = None, d_hat: int | None = None) -> str:
    buf = io.StringIO()
    if c is not None:
        buf.write(f"# c={_fmt(c)}\n")
    if d_hat is not None:
        buf.write(f"# d={int(d_hat)}\n")
    for row in np.asarray(entries):
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def write_matrix(path, m: TrafficMatrix) -> None:
    Path(path).write_text(format_matrix_csv(m.entries, m.c, m.d_hat))
