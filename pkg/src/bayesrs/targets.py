"""Target rank sets, the induced selection and its pairwise relation.

A selection is correct for the target when every pair ``(i, j)`` of its
relation ``rho`` satisfies ``mean_i <= mean_j``; the relation is rebuilt
from the current posterior means at every iteration.  Solutions are
0-based throughout; ranks are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidScheme

KINDS = ("best1", "best_m", "rank_m", "median", "span", "custom")

Pair = tuple[int, int]
RhoBuilder = Callable[[np.ndarray], Sequence[Pair]]


@dataclass(frozen=True)
class TargetScheme:
    kind: str
    m: int | None = None
    ranks: tuple[int, ...] | None = None
    builder: RhoBuilder | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidScheme(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("best_m", "rank_m") and (self.m is None or self.m < 1):
            raise InvalidScheme(f"{self.kind} needs m >= 1")
        if self.kind == "custom" and (not self.ranks or self.builder is None):
            raise InvalidScheme("custom schemes need target ranks and a rho builder")

    @classmethod
    def parse(cls, text: str) -> "TargetScheme":
        """Parse ``best1 | best_m:<m> | rank_m:<m> | median | span``."""
        name, _, arg = text.strip().partition(":")
        if name in ("best_m", "rank_m"):
            try:
                return cls(name, int(arg))
            except ValueError as exc:
                raise InvalidScheme(f"bad scheme {text!r}") from exc
        if name in ("best1", "median", "span") and not arg:
            return cls(name)
        raise InvalidScheme(f"bad scheme {text!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.m}" if self.kind in ("best_m", "rank_m") else self.kind

    def target_ranks(self, L: int) -> tuple[int, ...]:
        if self.kind == "best1":
            return (1,)
        if self.kind in ("best_m", "rank_m"):
            if self.m > L:
                raise InvalidScheme(f"m={self.m} exceeds L={L}")
            return tuple(range(1, self.m + 1))
        if self.kind == "median":
            return (math.ceil(L / 2),)
        if self.kind == "span":
            return (1, L)
        if max(self.ranks) > L or min(self.ranks) < 1:
            raise InvalidScheme(f"ranks {self.ranks} outside 1..{L}")
        return tuple(self.ranks)


@dataclass(frozen=True)
class Selection:
    """``B`` lists the selected solutions in the order of their target ranks;
    ``order`` is the full ascending ordering ``i_1, ..., i_L``."""

    B: tuple[int, ...]
    rho: tuple[Pair, ...]
    order: tuple[int, ...]


def _relation(scheme: TargetScheme, order: np.ndarray) -> list[Pair]:
    L = order.shape[0]
    o = [int(v) for v in order]
    if scheme.kind == "best1":
        return [(o[0], j) for j in range(L) if j != o[0]]
    if scheme.kind == "best_m":
        B = o[: scheme.m]
        rest = sorted(o[scheme.m:])
        return [(l, j) for l in B for j in rest]
    if scheme.kind == "rank_m":
        m = scheme.m
        chain = [(o[k], o[k + 1]) for k in range(m - 1)]
        return chain + [(o[m - 1], j) for j in sorted(o[m:])]
    if scheme.kind == "median":
        c = math.ceil(L / 2)
        l0 = o[c - 1]
        return [(j, l0) for j in o[: c - 1]] + [(l0, j) for j in o[c:]]
    if scheme.kind == "span":
        lo, hi = o[0], o[-1]
        inner = sorted(o[1:-1])
        return [(lo, j) for j in inner] + [(j, hi) for j in inner]
    return [(int(i), int(j)) for i, j in scheme.builder(order)]


def select(scheme: TargetScheme, nu_hat) -> Selection:
    """Selection and characterizing relation from posterior means ``nu_hat``.

    Ties are broken by ascending solution index.
    """
    nu_hat = np.asarray(nu_hat, dtype=np.float64)
    L = nu_hat.shape[0]
    if L < 2:
        raise InvalidScheme("need at least two solutions")
    order = np.argsort(nu_hat, kind="stable")
    B = tuple(int(order[r - 1]) for r in scheme.target_ranks(L))
    rho = _relation(scheme, order)
    if any(i == j for i, j in rho):
        raise InvalidScheme("relation contains a reflexive pair")
    return Selection(B, tuple(rho), tuple(int(v) for v in order))


def pair_count(scheme: TargetScheme, L: int) -> int:
    """Size of the relation, i.e. the number of Bonferroni summands."""
    if scheme.kind == "best1":
        return L - 1
    if scheme.kind == "best_m":
        return scheme.m * (L - scheme.m)
    if scheme.kind == "rank_m":
        return (scheme.m - 1) + (L - scheme.m)
    if scheme.kind == "median":
        return L - 1
    if scheme.kind == "span":
        return 2 * (L - 2)
    return len(scheme.builder(np.arange(L)))


def satisfies(rho: Sequence[Pair], t, delta: float = 0.0) -> bool:
    t = np.asarray(t, dtype=np.float64)
    return all(t[i] <= t[j] + delta for i, j in rho)


def is_correct(selection: Selection, true_mu, delta: float = 0.0) -> bool:
    """Whether the true means lie in the delta-relaxed correct set of ``selection``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return satisfies(selection.rho, true_mu, delta)
