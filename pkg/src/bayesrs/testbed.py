"""Synthetic normal test problems and CRN observation generators."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, InvalidParameter, InvalidScheme, NotPositiveDefinite
from .numerics import cholesky
from .targets import TargetScheme

MU_CASES = ("ufc", "inc", "unif")
SIGMA_CASES = (
    "cor:0.0", "cor:0.2", "cor:0.5", "cor:0.7", "cor:0.9",
    "altneg:-0.2", "altneg:-0.5", "altneg:-0.9", "wishart",
)
COR_VALUES = (0.0, 0.2, 0.5, 0.7, 0.9)
ALTNEG_VALUES = (-0.9, -0.5, -0.2)
UNIF_RANGE = (0.0, 100.0)
UNIF_MIN_GAP = 0.01
VAR_RANGE = (1.0, 10.0)
MAX_REDRAWS = 100
CHUNK = 256


@dataclass(frozen=True)
class ProblemInstance:
    mu: np.ndarray
    sigma: np.ndarray
    chol: np.ndarray

    @classmethod
    def build(cls, mu, sigma) -> "ProblemInstance":
        mu = np.asarray(mu, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        return cls(mu, sigma, cholesky(sigma))

    @property
    def L(self) -> int:
        return self.mu.shape[0]

    def dumps(self) -> str:
        return json.dumps({"mu": self.mu.tolist(), "sigma": self.sigma.tolist()}, indent=1)

    @classmethod
    def loads(cls, text: str) -> "ProblemInstance":
        d = json.loads(text)
        return cls.build(d["mu"], d["sigma"])


def mu_case(kind: str, L: int, scheme: TargetScheme | None = None, rng=None) -> np.ndarray:
    """True mean vector for the ``ufc``, ``inc`` or ``unif`` case.

    ``ufc`` depends on the target: one zero then ones (best1), ``m`` zeros then
    ones (best_m), ``0 .. m-1`` followed by ``m`` repeated (rank_m).
    """
    if kind == "inc":
        return np.arange(L, dtype=np.float64)
    if kind == "ufc":
        if scheme is None:
            raise InvalidScheme("the ufc case needs a target scheme")
        if scheme.kind == "best1":
            return np.r_[0.0, np.ones(L - 1)]
        if scheme.kind == "best_m":
            return np.r_[np.zeros(scheme.m), np.ones(L - scheme.m)]
        if scheme.kind == "rank_m":
            return np.r_[np.arange(scheme.m, dtype=np.float64), np.full(L - scheme.m, float(scheme.m))]
        raise InvalidScheme(f"no ufc means defined for {scheme}")
    if kind == "unif":
        rng = np.random.default_rng(rng)
        for _ in range(MAX_REDRAWS):
            mu = np.sort(rng.uniform(*UNIF_RANGE, size=L))
            if L < 2 or np.diff(mu).min() >= UNIF_MIN_GAP:
                return mu
        raise GenerationFailed("could not draw well-separated means")
    raise InvalidParameter(f"unknown mu case {kind!r}")


def parse_sigma_case(kind: str) -> tuple[str, float | None]:
    name, _, arg = kind.partition(":")
    if name == "wishart" and not arg:
        return name, None
    if name in ("cor", "altneg"):
        c = float(arg)
        if name == "cor" and not 0.0 <= c < 1.0:
            raise InvalidParameter(f"cor must lie in [0, 1), got {c}")
        if name == "altneg" and not -1.0 < c < 0.0:
            raise InvalidParameter(f"altneg needs -1 < c < 0, got {c}")
        return name, c
    raise InvalidParameter(f"unknown sigma case {kind!r}")


def draw_variances(L: int, rng) -> np.ndarray:
    return np.random.default_rng(rng).uniform(*VAR_RANGE, size=L)


def _wishart(L: int, variances, rng) -> np.ndarray:
    a = rng.standard_normal((L, L))
    c = a @ a.T
    d = np.sqrt(np.diag(c))
    c = c / np.outer(d, d)
    sd = np.sqrt(variances)
    scale = c * np.outer(sd, sd)
    g = np.linalg.cholesky(scale) @ rng.standard_normal((L, L))
    w = g @ g.T / L
    return 0.5 * (w + w.T)


def sigma_case(kind: str, L: int, rng=None, variances=None) -> np.ndarray:
    """Covariance matrix for one of the Sigma-cases (``cor:c``, ``altneg:c``, ``wishart``).

    Variances are U[1, 10] unless given.  Passing the same ``variances`` to
    different kinds pairs the resulting problems.
    """
    name, c = parse_sigma_case(kind)
    rng = np.random.default_rng(rng)
    for _ in range(MAX_REDRAWS):
        v = draw_variances(L, rng) if variances is None else np.asarray(variances, dtype=np.float64)
        if name == "wishart":
            s = _wishart(L, v, rng)
        else:
            sd = np.sqrt(v)
            idx = np.arange(L)
            sign = (-1.0) ** np.abs(idx[:, None] - idx[None, :]) if name == "altneg" else 1.0
            s = sign * abs(c) * np.outer(sd, sd)
            np.fill_diagonal(s, v)
        try:
            cholesky(s)
            return s
        except NotPositiveDefinite:
            if variances is not None and name != "wishart":
                break
    raise GenerationFailed(f"no positive definite draw for {kind}")


class CRNObserver:
    """Deterministic observation callback backed by N_L(mu, Sigma).

    Scenario ``k`` lives in chunk ``k // 256``, whose standard normals come from
    a generator keyed on ``(seed, chunk)``; any scenario is reproducible
    without replaying earlier ones.  With ``independent=True`` every solution
    draws from its own stream instead, so observations are uncorrelated.
    """

    def __init__(self, instance: ProblemInstance, seed: int, independent: bool = False):
        self.instance = instance
        self.seed = int(seed)
        self.independent = independent
        self._chunks: dict[tuple, np.ndarray] = {}
        self._sd = np.sqrt(np.diag(instance.sigma))

    def _chunk(self, c: int, i: int) -> np.ndarray:
        key = (i, c) if self.independent else (c,)
        vals = self._chunks.get(key)
        if vals is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(1, i, c) if self.independent else (0, c))
            g = np.random.Generator(np.random.PCG64(ss))
            inst = self.instance
            if self.independent:
                vals = inst.mu[i] + self._sd[i] * g.standard_normal(CHUNK)
            else:
                z = g.standard_normal((CHUNK, inst.L))
                vals = (inst.mu + z @ inst.chol.T).T.copy()
            self._chunks[key] = vals
        return vals if self.independent else vals[i]

    def __call__(self, i: int, k: int) -> float:
        return float(self._chunk(k // CHUNK, i)[k % CHUNK])

    def block(self, i: int, start: int, stop: int) -> np.ndarray:
        out = np.empty(stop - start)
        k = start
        while k < stop:
            c, off = divmod(k, CHUNK)
            take = min(CHUNK - off, stop - k)
            out[k - start : k - start + take] = self._chunk(c, i)[off : off + take]
            k += take
        return out

    def column(self, k: int) -> np.ndarray:
        return np.array([self(i, k) for i in range(self.instance.L)])


def crn_observe(instance: ProblemInstance, seed: int, independent: bool = False) -> CRNObserver:
    return CRNObserver(instance, seed, independent)
