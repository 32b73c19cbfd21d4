import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import bayesrs.allocation as alloc
from bayesrs.allocation import (StrategyInputs, allocate, dpw_plus, dpw_weights, equal_allocation,
                                gamma, gamma_ij, greedy_ocba, greedy_ocba_weights,
                                round_largest_remainder)
from bayesrs.errors import BudgetTooSmall, InvalidParameter
from bayesrs.pcs import dominance_table
from bayesrs.posterior import PosteriorState
from bayesrs.targets import TargetScheme, select


def state(nu, lam, n):
    return PosteriorState(np.asarray(nu, float), np.asarray(lam, float), np.arange(len(nu)), np.asarray(n))


def inputs_for(post, scheme="best1", b=30, alpha=0.05, delta=0.01):
    sel = select(TargetScheme.parse(scheme), post.nu_hat)
    return StrategyInputs(post, dominance_table(post, sel.rho, delta), b, alpha, delta)


def random_state(rng, L):
    a = rng.normal(size=(L, L))
    return state(rng.normal(size=L), a @ a.T / L + 0.05 * np.eye(L), rng.integers(3, 60, L))


@pytest.mark.parametrize("L, b, expect", [(3, 7, [3, 2, 2]), (4, 8, [2, 2, 2, 2]), (20, 200, [10] * 20)])
def test_equal_allocation(L, b, expect):
    assert equal_allocation(L, b).q.tolist() == expect


def test_equal_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        equal_allocation(5, 4)


@pytest.mark.parametrize("w, b, expect", [
    ([1, 1, 2], 10, [3, 2, 5]),
    ([1, 0, 0], 5, [3, 1, 1]),
    ([1, 1, 1, 1], 4, [1, 1, 1, 1]),
])
def test_rounding_examples(w, b, expect):
    assert round_largest_remainder(w, b).q.tolist() == expect


def test_rounding_without_floor_keeps_zero():
    assert round_largest_remainder([1, 0, 0], 5, floor_one=False).q.tolist() == [5, 0, 0]


def test_rounding_rejects_zero_weights():
    with pytest.raises(InvalidParameter):
        round_largest_remainder([0, 0], 4)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0, 1e3), min_size=2, max_size=25).filter(lambda w: sum(w) > 1e-6),
       st.integers(0, 500), st.floats(1e-3, 1e3))
def test_rounding_properties(w, extra, c):
    L = len(w)
    b = L + extra
    q = round_largest_remainder(w, b).q
    assert q.sum() == b and q.min() >= 1 and q.dtype.kind == "i"
    assert np.array_equal(round_largest_remainder(np.array(w) * c, b).q, q)


def test_gamma_reduction(rng):
    for _ in range(200):
        post = random_state(rng, 5)
        lam = post.lambda_hat
        for i, j in [(0, 1), (2, 4), (3, 0)]:
            ref = lam[i, i] + lam[j, j] - 2 * lam[i, j]
            assert abs(gamma_ij(post, i, j, 0, 0) - ref) <= 1e-12


def test_gamma_limits():
    post = state([0.0, 1.0], [[2.0, 0.0], [0.0, 3.0]], [10, 20])
    assert gamma_ij(post, 0, 1, 10, 20) == pytest.approx(0.5 * 2 + 0.5 * 3)
    post = state([0.0, 1.0], [[2.0, 0.7], [0.7, 3.0]], [10, 20])
    assert gamma_ij(post, 0, 1, 1e12, 1e12) == pytest.approx(0.0, abs=1e-9)


def test_greedy_equal_deltas_gives_equal_plan():
    # two symmetric solutions: both gains coincide
    post = state([0.0, 0.05], [[1.0, 0.2], [0.2, 1.0]], [10, 10])
    inp = inputs_for(post, b=10)
    w = greedy_ocba_weights(inp)
    assert w[0] == pytest.approx(w[1], rel=1e-12)
    assert greedy_ocba(inp).q.tolist() == equal_allocation(2, 10).q.tolist()


def test_greedy_dominant_solution_gets_floor():
    post = state([0.0, 0.1, 50.0], np.diag([1.0, 1.0, 1.0]) / 10, [10, 10, 10])
    plan = greedy_ocba(inputs_for(post, b=30))
    assert plan.q[2] == 1 and plan.q.sum() == 30


def test_greedy_counts_two_evaluations_per_pair(monkeypatch, rng):
    calls = []
    real = alloc.t_cdf_many

    def counting(x, df, loc, scale):
        out = real(x, df, loc, scale)
        calls.append(np.size(out))
        return out

    monkeypatch.setattr(alloc, "t_cdf_many", counting)
    for scheme in ("best1", "best_m:3", "rank_m:3", "median", "span"):
        calls.clear()
        inp = inputs_for(random_state(rng, 7), scheme)
        greedy_ocba(inp)
        assert sum(calls) == 2 * len(inp.table.pairs)


def test_dpw_plus_all_certain_falls_back():
    post = state([0.0, 100.0, 200.0], np.eye(3) / 100, [20, 20, 20])
    plan = dpw_plus(inputs_for(post, b=9))
    assert plan.fallback and plan.q.tolist() == [3, 3, 3]


def test_dpw_plus_symmetric_pair():
    post = state([0.0, 0.05], [[1.0, 0.3], [0.3, 1.0]], [10, 10])
    inp = inputs_for(post, b=10)
    p = inp.table.p[0]
    np.testing.assert_allclose(dpw_weights(inp), [1 - p / 2, 1 - p / 2], rtol=1e-14)
    assert dpw_plus(inp).q.tolist() == [5, 5]


def test_dpw_plus_favours_larger_variance():
    post = state([0.0, 0.05], [[4.0, 0.0], [0.0, 1.0]], [10, 10])
    w = dpw_weights(inputs_for(post, b=10))
    assert w[0] > w[1]


def test_dpw_plus_permutation_equivariant(rng):
    for _ in range(50):
        post = random_state(rng, 6)
        p = rng.permutation(6)
        perm_post = state(post.nu_hat[p], post.lambda_hat[np.ix_(p, p)], post.n[p])
        a = dpw_weights(inputs_for(post, "best_m:2"))
        b = dpw_weights(inputs_for(perm_post, "best_m:2"))
        np.testing.assert_allclose(a[p], b, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("strategy", ["equal", "greedy_ocba", "dpw", "dpw_plus"])
def test_every_strategy_sums_to_budget(rng, strategy):
    for _ in range(50):
        post = random_state(rng, 8)
        b = int(rng.integers(8, 200))
        plan = allocate(strategy, inputs_for(post, "rank_m:3", b=b))
        assert plan.q.sum() == b and plan.q.min() >= 1


def test_unknown_strategy():
    with pytest.raises(InvalidParameter):
        allocate("kn++", inputs_for(state([0.0, 1.0], np.eye(2), [5, 5])))
