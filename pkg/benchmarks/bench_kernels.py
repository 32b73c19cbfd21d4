"""Time the numba kernels against the numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from bayesrs.kernels import _numba as nbk
from bayesrs.kernels import _numpy as npk


def ragged_frame(rng, L, n_max):
    n = np.sort(rng.integers(L + 1, n_max, size=L))[::-1].astype(np.int64)
    a = rng.normal(size=(L, L))
    cols = rng.multivariate_normal(np.zeros(L), a @ a.T + L * np.eye(L), size=int(n[0])).T
    X = np.full((L, int(n[0])), np.nan)
    for i in range(L):
        X[i, : n[i]] = cols[i, : n[i]]
    return X, n


def cases(rng):
    m = 20_000
    targs = (rng.normal(size=m), rng.integers(1, 500, m).astype(float), rng.normal(size=m), rng.uniform(0.1, 3, m))
    for L, n_max in ((10, 400), (20, 2000)):
        X, n = ragged_frame(rng, L, n_max)
        yield f"posterior_plugin L={L}", lambda k, X=X, n=n, L=L: k.posterior_plugin(X, n, L - 1.0)
    yield f"t_cdf_many m={m}", lambda k: k.t_cdf_many(*targs)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, fn in cases(rng):
        fn(nbk)  # compile outside the timing
        t_np = min(timeit.repeat(lambda: fn(npk), number=3, repeat=args.repeat)) / 3
        t_nb = min(timeit.repeat(lambda: fn(nbk), number=3, repeat=args.repeat)) / 3
        print(f"{name:<26}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}x")


if __name__ == "__main__":
    main()
