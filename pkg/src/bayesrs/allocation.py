"""Budget allocation strategies and integer apportionment.

Every strategy turns nonnegative per-solution weights into an integer plan
``q`` with ``sum(q) == b`` via :func:`round_largest_remainder`.  The
minimum-one floor is on by default for all of them; it is what guarantees the
sequential procedure keeps sampling every solution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmall, InvalidParameter
from .numerics import t_cdf_many
from .pcs import DominanceTable, clamp_scale
from .posterior import PosteriorState

STRATEGIES = ("equal", "greedy_ocba", "dpw", "dpw_plus")

# shares are snapped to this many decimals so that rescaling the weights
# cannot move a share across an integer boundary through rounding noise
_SHARE_DECIMALS = 9


@dataclass(frozen=True)
class AllocationPlan:
    q: np.ndarray
    weights: np.ndarray | None = None
    fallback: bool = False

    @property
    def total(self) -> int:
        return int(self.q.sum())


@dataclass(frozen=True)
class StrategyInputs:
    post: PosteriorState
    table: DominanceTable
    b: int
    alpha: float
    delta: float
    floor_one: bool = True

    @property
    def L(self) -> int:
        return self.post.L


def round_largest_remainder(weights, b: int, floor_one: bool = True) -> AllocationPlan:
    """Proportional integer apportionment of ``b`` units.

    Floors of ``b * w / sum(w)`` first, leftovers by descending fractional
    remainder (ties to the lower index).  With ``floor_one`` any zero entry is
    raised to one and the surplus is taken back one unit at a time from the
    current largest entry (ties to the higher index).

    >>> round_largest_remainder([1, 1, 2], 10).q.tolist()
    [3, 2, 5]
    >>> round_largest_remainder([1, 0, 0], 5).q.tolist()
    [3, 1, 1]
    """
    w = np.asarray(weights, dtype=np.float64)
    L = w.shape[0]
    if b < 0 or (floor_one and b < L):
        raise BudgetTooSmall(f"budget {b} too small for {L} solutions")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidParameter("weights must be finite and nonnegative")
    total = w.sum()
    if not total > 0:
        raise InvalidParameter("weights sum to zero")
    shares = np.round(b * (w / total), _SHARE_DECIMALS)
    q = np.floor(shares).astype(np.int64)
    rem = shares - q
    left = b - int(q.sum())
    if left > 0:
        idx = np.lexsort((np.arange(L), -rem))[:left]
        q[idx] += 1
    elif left < 0:
        # snapping can overshoot by a unit when shares sit on integers
        for _ in range(-left):
            k = L - 1 - int(np.argmax(q[::-1]))
            q[k] -= 1
    if floor_one:
        q[q == 0] = 1
        while q.sum() > b:
            k = L - 1 - int(np.argmax(q[::-1]))
            q[k] -= 1
    return AllocationPlan(q, w)


def equal_allocation(L: int, b: int, floor_one: bool = True) -> AllocationPlan:
    return round_largest_remainder(np.ones(L), b, floor_one)


def gamma(post: PosteriorState, i, j, qi, qj) -> np.ndarray:
    """Projected variance of ``W_i - W_j`` after ``qi``/``qj`` extra runs.

    Variances shrink with the relative sample-size increase; the covariance is
    shrunk by the variance-weighted mix of both factors.
    """
    i = np.asarray(i)
    j = np.asarray(j)
    lam = post.lambda_hat
    lii, ljj, lij = lam[i, i], lam[j, j], lam[i, j]
    fi = post.n[i] / (post.n[i] + np.asarray(qi, dtype=np.float64))
    fj = post.n[j] / (post.n[j] + np.asarray(qj, dtype=np.float64))
    s = lii + ljj
    return fi * lii + fj * ljj - 2.0 * (lii / s * fi + ljj / s * fj) * lij


def gamma_ij(post: PosteriorState, i: int, j: int, qi: float, qj: float) -> float:
    return float(gamma(post, i, j, qi, qj))


def _pair_arrays(table: DominanceTable):
    ij = np.asarray(table.pairs, dtype=np.int64).reshape(-1, 2)
    return ij[:, 0], ij[:, 1]


def greedy_ocba_weights(inputs: StrategyInputs) -> np.ndarray:
    """Gain in the projected bound from giving the whole budget to each solution.

    Costs exactly ``2 * |rho|`` t-CDF evaluations: the unmodified terms are
    taken from the dominance table.  Negative gains are clipped to zero.
    """
    post, table, b = inputs.post, inputs.table, inputs.b
    w = np.zeros(post.L)
    if not table.pairs:
        return w
    i, j = _pair_arrays(table)
    n = post.n
    loc = post.nu_hat[i] - post.nu_hat[j]
    df_i = np.minimum(n[i] + b, n[j]) - 1.0
    df_j = np.minimum(n[i], n[j] + b) - 1.0
    sc_i, _ = clamp_scale(gamma(post, i, j, b, 0))
    sc_j, _ = clamp_scale(gamma(post, i, j, 0, b))
    p = t_cdf_many(
        inputs.delta,
        np.concatenate([df_i, df_j]),
        np.concatenate([loc, loc]),
        np.concatenate([sc_i, sc_j]),
    )
    k = len(table.pairs)
    np.add.at(w, i, p[:k] - table.p)
    np.add.at(w, j, p[k:] - table.p)
    return np.maximum(w, 0.0)


def dpw_weights(inputs: StrategyInputs, plus: bool = True) -> np.ndarray:
    """Dominance-probability weights ``1 - min p_ij (1 - lam_ll / (lam_ii + lam_jj))``.

    With ``plus`` only pairs with ``p_ij < 1 - alpha / |rho|`` take part; a
    solution without any such pair gets weight zero.
    """
    post, table = inputs.post, inputs.table
    L = post.L
    if not table.pairs:
        return np.zeros(L)
    i, j = _pair_arrays(table)
    p = table.p
    if plus:
        keep = p < 1.0 - inputs.alpha / len(table.pairs)
        i, j, p = i[keep], j[keep], p[keep]
    lam = post.lambda_hat
    s = lam[i, i] + lam[j, j]
    mins = np.full(L, np.inf)
    np.minimum.at(mins, i, p * (1.0 - lam[i, i] / s))
    np.minimum.at(mins, j, p * (1.0 - lam[j, j] / s))
    return np.where(np.isfinite(mins), 1.0 - mins, 0.0)


def _from_weights(w: np.ndarray, inputs: StrategyInputs) -> AllocationPlan:
    if not (np.all(np.isfinite(w)) and w.sum() > 0):
        plan = equal_allocation(inputs.L, inputs.b, inputs.floor_one)
        return AllocationPlan(plan.q, w, fallback=True)
    plan = round_largest_remainder(w, inputs.b, inputs.floor_one)
    return AllocationPlan(plan.q, w)


def greedy_ocba(inputs: StrategyInputs) -> AllocationPlan:
    return _from_weights(greedy_ocba_weights(inputs), inputs)


def dpw(inputs: StrategyInputs) -> AllocationPlan:
    return _from_weights(dpw_weights(inputs, plus=False), inputs)


def dpw_plus(inputs: StrategyInputs) -> AllocationPlan:
    return _from_weights(dpw_weights(inputs, plus=True), inputs)


def allocate(strategy: str, inputs: StrategyInputs) -> AllocationPlan:
    """Dispatch by config name: ``equal | greedy_ocba | dpw | dpw_plus``."""
    if strategy == "equal":
        return equal_allocation(inputs.L, inputs.b, inputs.floor_one)
    if strategy == "greedy_ocba":
        return greedy_ocba(inputs)
    if strategy == "dpw":
        return dpw(inputs)
    if strategy == "dpw_plus":
        return dpw_plus(inputs)
    raise InvalidParameter(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
