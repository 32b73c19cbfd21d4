"""Batch experiment harness over the grid of test problems.

Problem instances and observation seeds are derived from the base seed and
the cell's (mu, Sigma) indices and replication number, never from the
strategy or CRN mode, so every strategy sees exactly the same observations.
"""
from __future__ import annotations

import csv
import io
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from itertools import product

import numpy as np

from .errors import BayesRSError, InvalidParameter
from .procedure import CAP_REACHED, CRN_MODES, RunConfig, run
from .targets import TargetScheme, is_correct
from .testbed import SIGMA_CASES, ProblemInstance, crn_observe, draw_variances, mu_case, sigma_case

CSV_COLUMNS = ("rs_case", "mu_case", "sigma_case", "crn_case", "strategy",
               "mean_sims", "std_sims", "emp_pcs", "n_reps", "n_failures")
REP_COLUMNS = ("rs_case", "mu_case", "sigma_case", "crn_case", "strategy", "m_cov", "m_mu",
               "rep", "total", "iterations", "correct", "reason", "error")
SUMMARY_SIGMA_ORDER = ("altneg:-0.9", "altneg:-0.5", "altneg:-0.2", "cor:0.0", "cor:0.2",
                       "cor:0.5", "cor:0.7", "cor:0.9", "wishart")


@dataclass
class StudyConfig:
    """Grid and replication counts; defaults are the desk-scale setup."""

    L: int = 10
    rs_cases: list[str] = field(default_factory=lambda: ["best1", "best_m:5", "rank_m:5"])
    mu_cases: list[str] = field(default_factory=lambda: ["ufc", "inc", "unif"])
    sigma_cases: list[str] = field(default_factory=lambda: list(SIGMA_CASES))
    crn_cases: list[str] = field(default_factory=lambda: list(CRN_MODES))
    strategies: list[str] = field(default_factory=lambda: ["equal", "greedy_ocba", "dpw_plus"])
    M_cov: int = 5
    M_mu: int = 5
    M: int = 10
    alpha: float = 0.05
    delta: float = 0.01
    n0: int | None = None
    b: int | None = None
    nu0: float | None = None
    cap: int = 60_000
    seed: int = 0

    def __post_init__(self):
        if min(self.M_cov, self.M_mu, self.M) < 1:
            raise InvalidParameter("replication counts must be >= 1")
        if self.L < 2:
            raise InvalidParameter("L >= 2 required")

    @classmethod
    def reference_scale(cls, **overrides) -> "StudyConfig":
        base = cls(L=20, rs_cases=["best1", "best_m:10", "rank_m:10"],
                   M_cov=15, M_mu=15, M=10, cap=150_000)
        return replace(base, **overrides)

    @classmethod
    def from_mapping(cls, data: dict, scale: str = "desk") -> "StudyConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameter(f"unknown config fields: {sorted(unknown)}")
        if scale == "paper":
            return cls.reference_scale(**data)
        if scale != "desk":
            raise InvalidParameter(f"unknown scale {scale!r}")
        return cls(**data)

    def run_config(self, rs_case: str, crn_case: str, strategy: str) -> RunConfig:
        return RunConfig(L=self.L, alpha=self.alpha, delta=self.delta, n0=self.n0, b=self.b,
                         nu0=self.nu0, scheme=TargetScheme.parse(rs_case), strategy=strategy,
                         crn_mode=crn_case, cap=self.cap, seed=self.seed)

    def cells(self):
        return list(product(self.rs_cases, self.mu_cases, self.sigma_cases,
                            self.crn_cases, self.strategies))


@dataclass(frozen=True)
class RepRow:
    rs_case: str
    mu_case: str
    sigma_case: str
    crn_case: str
    strategy: str
    m_cov: int
    m_mu: int
    rep: int
    total: int
    iterations: int
    correct: bool
    reason: str
    error: str = ""

    @property
    def cell(self):
        return (self.rs_case, self.mu_case, self.sigma_case, self.crn_case, self.strategy)

    @property
    def pair_key(self):
        return (self.m_cov, self.m_mu, self.rep)


@dataclass(frozen=True)
class CellSummary:
    rs_case: str
    mu_case: str
    sigma_case: str
    crn_case: str
    strategy: str
    mean_sims: float
    std_sims: float
    emp_pcs: float
    n_reps: int
    n_failures: int

    @property
    def cell(self):
        return (self.rs_case, self.mu_case, self.sigma_case, self.crn_case, self.strategy)


@dataclass
class StudyResult:
    cells: list[CellSummary]
    reps: list[RepRow]

    def cell(self, **match) -> CellSummary:
        hits = [c for c in self.cells if all(getattr(c, k) == v for k, v in match.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} cells match {match}")
        return hits[0]

    def totals(self, **match) -> dict[tuple, int]:
        """Per-replication totals keyed by the pairing key, for paired tests."""
        return {r.pair_key: r.total for r in self.reps
                if all(getattr(r, k) == v for k, v in match.items()) and not r.error}


def _key(text: str) -> int:
    return zlib.crc32(text.encode())


def _seed_seq(base: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(base, spawn_key=key)


def build_instance(cfg: StudyConfig, rs_case: str, mu_kind: str, sigma_kind: str,
                   m_cov: int, m_mu: int) -> ProblemInstance:
    scheme = TargetScheme.parse(rs_case)
    variances = draw_variances(cfg.L, _seed_seq(cfg.seed, 1, m_cov))
    struct_rng = np.random.default_rng(_seed_seq(cfg.seed, 2, _key(sigma_kind), m_cov))
    sigma = sigma_case(sigma_kind, cfg.L, struct_rng,
                       variances=None if sigma_kind == "wishart" else variances)
    mu_rng = np.random.default_rng(_seed_seq(cfg.seed, 3, m_mu))
    mu = mu_case(mu_kind, cfg.L, scheme, mu_rng)
    return ProblemInstance.build(mu, sigma)


def observation_seed(cfg: StudyConfig, m_cov: int, m_mu: int, rep: int) -> int:
    return int(_seed_seq(cfg.seed, 4, m_cov, m_mu, rep).generate_state(1, np.uint64)[0])


def _tasks(cfg: StudyConfig):
    for rs, mu_kind, sig in product(cfg.rs_cases, cfg.mu_cases, cfg.sigma_cases):
        n_mu = cfg.M_mu if mu_kind == "unif" else 1
        for m_cov, m_mu in product(range(cfg.M_cov), range(n_mu)):
            reps = [(crn, strat, r) for r in range(cfg.M)
                    for crn in cfg.crn_cases for strat in cfg.strategies]
            yield (cfg, rs, mu_kind, sig, m_cov, m_mu, reps)


def _run_group(task) -> list[RepRow]:
    cfg, rs, mu_kind, sig, m_cov, m_mu, reps = task
    inst = build_instance(cfg, rs, mu_kind, sig, m_cov, m_mu)
    rows = []
    observers = {}
    for crn, strat, r in reps:
        if r not in observers:
            observers[r] = crn_observe(inst, observation_seed(cfg, m_cov, m_mu, r))
        rc = cfg.run_config(rs, crn, strat)
        try:
            res = run(rc, observers[r])
        except BayesRSError as exc:
            rows.append(RepRow(rs, mu_kind, sig, crn, strat, m_cov, m_mu, r, 0, 0, False,
                               "Error", f"{type(exc).__name__}: {exc}"))
            continue
        ok = res.reason != CAP_REACHED and is_correct(res.selection, inst.mu, cfg.delta)
        rows.append(RepRow(rs, mu_kind, sig, crn, strat, m_cov, m_mu, r, res.total,
                           res.iterations, bool(ok), res.reason))
    return rows


def summarize(cfg: StudyConfig, reps: list[RepRow]) -> list[CellSummary]:
    by_cell: dict[tuple, list[RepRow]] = {c: [] for c in cfg.cells()}
    for row in reps:
        by_cell.setdefault(row.cell, []).append(row)
    out = []
    for cell, rows in by_cell.items():
        done = np.array([r.total for r in rows if not r.error], dtype=np.float64)
        mean = float(done.mean()) if done.size else math.nan
        std = float(done.std(ddof=1)) if done.size > 1 else 0.0
        n = len(rows)
        pcs = sum(r.correct for r in rows) / n if n else math.nan
        fails = sum(1 for r in rows if r.error or r.reason == CAP_REACHED)
        out.append(CellSummary(*cell, mean, std, pcs, n, fails))
    return out


def run_study(cfg: StudyConfig, parallel: int = 1) -> StudyResult:
    """Run every replication of every grid cell and aggregate."""
    tasks = list(_tasks(cfg))
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            groups = list(ex.map(_run_group, tasks))
    else:
        groups = [_run_group(t) for t in tasks]
    reps = [row for g in groups for row in g]
    order = {c: k for k, c in enumerate(cfg.cells())}
    reps.sort(key=lambda r: (order[r.cell], r.m_cov, r.m_mu, r.rep))
    return StudyResult(summarize(cfg, reps), reps)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report(result: StudyResult, fmt: str = "csv") -> str:
    """Render aggregate cells as CSV or as a per-Sigma-case comparison table."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in result.cells:
            w.writerow([_fmt(getattr(c, k)) for k in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "summary":
        return _summary(result.cells)
    raise InvalidParameter(f"unknown report format {fmt!r}")


def reps_csv(result: StudyResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REP_COLUMNS)
    for r in result.reps:
        w.writerow([_fmt(getattr(r, k)) for k in REP_COLUMNS])
    return buf.getvalue()


def parse_csv(text: str) -> list[CellSummary]:
    cells = []
    for rec in csv.DictReader(io.StringIO(text)):
        cells.append(CellSummary(
            rec["rs_case"], rec["mu_case"], rec["sigma_case"], rec["crn_case"], rec["strategy"],
            float(rec["mean_sims"]), float(rec["std_sims"]), float(rec["emp_pcs"]),
            int(rec["n_reps"]), int(rec["n_failures"]),
        ))
    return cells


def _summary(cells: list[CellSummary]) -> str:
    if not cells:
        return "(no cells)\n"
    strategies = list(dict.fromkeys(c.strategy for c in cells))
    sig_rank = {s: k for k, s in enumerate(SUMMARY_SIGMA_ORDER)}
    lines = []
    groups = dict.fromkeys((c.rs_case, c.mu_case, c.crn_case) for c in cells)
    for rs, mu_kind, crn in groups:
        lines.append(f"== {rs} / mu={mu_kind} / {crn}: mean simulations (empirical PCS)")
        lines.append(f"{'sigma':<12}" + "".join(f"{s:>24}" for s in strategies))
        sub = [c for c in cells if (c.rs_case, c.mu_case, c.crn_case) == (rs, mu_kind, crn)]
        sigmas = sorted(dict.fromkeys(c.sigma_case for c in sub), key=lambda s: sig_rank.get(s, 99))
        for sig in sigmas:
            row = f"{sig:<12}"
            for strat in strategies:
                hit = [c for c in sub if c.sigma_case == sig and c.strategy == strat]
                row += f"{hit[0].mean_sims:>14.1f} ({hit[0].emp_pcs:.3f})" if hit else f"{'-':>24}"
            lines.append(row)
        lines.append("")
    return "\n".join(lines)
