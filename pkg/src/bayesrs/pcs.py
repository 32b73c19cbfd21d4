"""Pairwise dominance probabilities and the Bonferroni bound on the PCS."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, NonPositiveScaleWarning
from .numerics import t_cdf_many
from .posterior import PosteriorState

SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class DominanceTable:
    pairs: tuple[tuple[int, int], ...]
    p: np.ndarray
    delta: float
    n_clamped: int = 0

    def __getitem__(self, pair) -> float:
        return float(self.p[self.pairs.index(tuple(pair))])

    def __len__(self) -> int:
        return len(self.pairs)


def clamp_scale(scale: np.ndarray) -> tuple[np.ndarray, int]:
    bad = ~(scale > SCALE_FLOOR)
    n_bad = int(bad.sum())
    if n_bad:
        warnings.warn(f"{n_bad} pairwise scale(s) <= {SCALE_FLOOR:g} clamped",
                      NonPositiveScaleWarning, stacklevel=3)
        scale = np.where(bad, SCALE_FLOOR, scale)
    return scale, n_bad


def pair_parameters(post: PosteriorState, pairs: Sequence[tuple[int, int]]):
    """``(df, loc, scale)`` arrays of the pairwise difference ``W_i - W_j``."""
    if not pairs:
        z = np.zeros(0)
        return z, z, z
    ij = np.asarray(pairs, dtype=np.int64)
    i, j = ij[:, 0], ij[:, 1]
    if np.any(i == j):
        raise InvalidParameter("pairs must have distinct members")
    lam = post.lambda_hat
    df = np.minimum(post.n[i], post.n[j]) - 1.0
    if np.any(df < 1):
        raise InvalidParameter("each pair needs min(n_i, n_j) >= 2")
    loc = post.nu_hat[i] - post.nu_hat[j]
    scale = lam[i, i] + lam[j, j] - 2.0 * lam[i, j]
    return df, loc, scale


def dominance_table(post: PosteriorState, rho, delta: float) -> DominanceTable:
    """Approximate ``P[W_i <= W_j + delta | x]`` for every ``(i, j)`` in ``rho``."""
    pairs = tuple((int(i), int(j)) for i, j in rho)
    df, loc, scale = pair_parameters(post, pairs)
    scale, n_bad = clamp_scale(scale)
    p = t_cdf_many(delta, df, loc, scale) if pairs else np.zeros(0)
    return DominanceTable(pairs, p, float(delta), n_bad)


def dominance_prob(post: PosteriorState, i: int, j: int, delta: float) -> float:
    return float(dominance_table(post, [(i, j)], delta).p[0])


def bonferroni_lb(table: DominanceTable) -> float:
    """``1 - sum(1 - p_ij)``; not clipped, so it may be negative."""
    return float(1.0 - np.sum(1.0 - table.p))
