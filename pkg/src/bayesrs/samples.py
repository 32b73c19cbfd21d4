"""Ragged CRN observation store.

Row ``i`` holds the observations of solution ``i`` on scenarios
``0 .. n_i - 1``.  Rows only grow at the end, so the missing-data pattern is
always monotone, and a scenario index fully determines the common random
input used for every solution evaluated on it.

An *observe* callback maps ``(solution, scenario) -> float``.  If it also
provides ``block(solution, start, stop)`` returning an array, that is used to
fetch a contiguous run of scenarios at once.
"""
from __future__ import annotations

import csv
import io
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, InitialSampleTooSmall, InvalidParameter, OutOfRange

Observe = Callable[[int, int], float]


def _fetch(observe, i: int, start: int, stop: int) -> np.ndarray:
    block = getattr(observe, "block", None)
    if block is not None:
        return np.asarray(block(i, start, stop), dtype=np.float64)
    return np.array([observe(i, k) for k in range(start, stop)], dtype=np.float64)


class RaggedSample:
    """Per-solution observation rows over a shared scenario pool."""

    def __init__(self, L: int, capacity: int = 64):
        if L < 1:
            raise InvalidParameter("need at least one solution")
        self.L = L
        self._data = np.full((L, max(capacity, 1)), np.nan)
        self.n = np.zeros(L, dtype=np.int64)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "RaggedSample":
        s = cls(len(rows), capacity=max((len(r) for r in rows), default=1))
        for i, r in enumerate(rows):
            s._data[i, : len(r)] = r
            s.n[i] = len(r)
        return s

    @property
    def pool(self) -> int:
        """Number of scenarios drawn so far (``max n_i``)."""
        return int(self.n.max()) if self.L else 0

    @property
    def total(self) -> int:
        return int(self.n.sum())

    def row(self, i: int) -> np.ndarray:
        return self._data[i, : self.n[i]]

    @property
    def rows(self) -> list[np.ndarray]:
        return [self.row(i) for i in range(self.L)]

    def matrix(self) -> np.ndarray:
        """NaN-padded ``L x pool`` view of the data."""
        return self._data[:, : self.pool]

    def permuted(self, perm) -> tuple[np.ndarray, np.ndarray]:
        """Rows and sample sizes reordered by ``perm`` (a copy)."""
        perm = np.asarray(perm)
        return np.ascontiguousarray(self._data[perm, : self.pool]), self.n[perm].copy()

    def _reserve(self, width: int) -> None:
        cap = self._data.shape[1]
        if width <= cap:
            return
        new_cap = max(width, 2 * cap)
        grown = np.full((self.L, new_cap), np.nan)
        grown[:, :cap] = self._data
        self._data = grown

    def extend_row(self, i: int, values) -> None:
        values = np.asarray(values, dtype=np.float64)
        k = int(self.n[i])
        self._reserve(k + values.shape[0])
        self._data[i, k : k + values.shape[0]] = values
        self.n[i] = k + values.shape[0]

    def copy(self) -> "RaggedSample":
        s = RaggedSample(self.L, capacity=self._data.shape[1])
        s._data = self._data.copy()
        s.n = self.n.copy()
        return s

    def __eq__(self, other) -> bool:
        if not isinstance(other, RaggedSample) or other.L != self.L:
            return NotImplemented
        return bool(np.array_equal(self.n, other.n)) and all(
            np.array_equal(a, b) for a, b in zip(self.rows, other.rows)
        )

    def __repr__(self) -> str:
        return f"RaggedSample(L={self.L}, n={self.n.tolist()})"

    def to_csv(self) -> str:
        """Debug dump with columns ``solution,scenario,value``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["solution", "scenario", "value"])
        for i in range(self.L):
            for k, v in enumerate(self.row(i)):
                w.writerow([i, k, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RaggedSample":
        rows: dict[int, dict[int, float]] = {}
        for rec in csv.DictReader(io.StringIO(text)):
            rows.setdefault(int(rec["solution"]), {})[int(rec["scenario"])] = float(rec["value"])
        L = max(rows) + 1 if rows else 0
        out = []
        for i in range(L):
            r = rows.get(i, {})
            if sorted(r) != list(range(len(r))):
                raise InvalidParameter(f"row {i} is not a scenario prefix")
            out.append([r[k] for k in range(len(r))])
        return cls.from_rows(out)


def init_sample(L: int, n0: int, observe: Observe, strict: bool = False) -> RaggedSample:
    """Observe every solution on the first ``n0`` scenarios.

    With ``strict=True`` the sample must satisfy ``n0 >= L + 1`` so that the
    estimated covariance blocks are nonsingular with probability one.
    """
    if n0 < 1 or (strict and n0 <= L):
        raise InitialSampleTooSmall(f"n0={n0} too small for L={L}")
    s = RaggedSample(L, capacity=max(64, 4 * n0))
    for i in range(L):
        s.extend_row(i, _fetch(observe, i, 0, n0))
    return s


def append(sample: RaggedSample, q, observe: Observe) -> RaggedSample:
    """Give solution ``i`` its next ``q[i]`` scenarios (in place; returns ``sample``).

    Scenarios beyond the current pool are new draws; all others are reused,
    which is what keeps the columns valid CRN vectors.
    """
    q = np.asarray(q, dtype=np.int64)
    if q.shape != (sample.L,):
        raise DimensionMismatch(f"allocation has shape {q.shape}, expected ({sample.L},)")
    if np.any(q < 0):
        raise InvalidParameter("allocations must be nonnegative")
    for i in np.flatnonzero(q):
        start = int(sample.n[i])
        sample.extend_row(int(i), _fetch(observe, int(i), start, start + int(q[i])))
    return sample


def ordering(sample_or_n) -> np.ndarray:
    """Solutions sorted by descending sample size; ties keep index order."""
    n = sample_or_n.n if isinstance(sample_or_n, RaggedSample) else np.asarray(sample_or_n)
    return np.argsort(-n, kind="stable")


def restricted_mean(sample: RaggedSample, i: int, m: int) -> float:
    """Mean of the first ``m`` observations of solution ``i``."""
    if m < 1 or m > sample.n[i]:
        raise OutOfRange(f"m={m} outside 1..{sample.n[i]} for solution {i}")
    return float(sample.row(i)[:m].sum() / m)
