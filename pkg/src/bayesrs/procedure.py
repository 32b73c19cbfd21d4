"""The sequential BayesRS driver.

Observe every solution on ``n0`` common scenarios, then repeat
posterior -> selection -> dominance table -> Bonferroni bound -> allocation
until the bound reaches ``1 - alpha`` or the simulation cap is hit.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .allocation import STRATEGIES, StrategyInputs, allocate
from .errors import BayesRSError, InvalidParameter
from .pcs import DominanceTable, bonferroni_lb, dominance_table
from .posterior import PosteriorState, posterior_estimate, posterior_marginal
from .samples import Observe, RaggedSample, append, init_sample
from .targets import Selection, TargetScheme, select

log = logging.getLogger(__name__)

CRN_MODES = ("isCRN", "noCRN")
CERTIFIED = "Certified"
CAP_REACHED = "CapReached"


@dataclass
class RunConfig:
    L: int
    alpha: float = 0.05
    delta: float = 0.01
    n0: int | None = None
    b: int | None = None
    nu0: float | None = None
    scheme: TargetScheme = field(default_factory=lambda: TargetScheme("best1"))
    strategy: str = "dpw_plus"
    crn_mode: str = "isCRN"
    cap: int = 150_000
    seed: int = 0

    def __post_init__(self):
        # unset fields follow the reference setup: n0 = L+1, b = 10 L, nu0 = L-1
        if self.n0 is None:
            self.n0 = self.L + 1
        if self.b is None:
            self.b = 10 * self.L
        if self.nu0 is None:
            self.nu0 = self.L - 1
        if isinstance(self.scheme, str):
            self.scheme = TargetScheme.parse(self.scheme)
        self.validate()

    def validate(self) -> None:
        problems = []
        if self.L < 2:
            problems.append("L >= 2")
        if not 0 < self.alpha < 1:
            problems.append("0 < alpha < 1")
        if self.delta < 0:
            problems.append("delta >= 0")
        if self.n0 < self.L + 1:
            problems.append("n0 >= L + 1")
        if self.b < self.L:
            problems.append("b >= L")
        if self.cap < self.L * self.n0:
            problems.append("cap >= L * n0")
        if self.strategy not in STRATEGIES:
            problems.append(f"strategy in {STRATEGIES}")
        if self.crn_mode not in CRN_MODES:
            problems.append(f"crn_mode in {CRN_MODES}")
        if problems:
            raise InvalidParameter("invalid RunConfig, need: " + ", ".join(problems))

    def header(self) -> str:
        d = asdict(self)
        d["scheme"] = str(self.scheme)
        return "# " + " ".join(f"{k}={v}" for k, v in d.items())


@dataclass
class TraceRecord:
    iteration: int
    n: list[int]
    lb: float
    B: tuple[int, ...]
    weights: list[float] | None = None

    def line(self, verbose: bool = False) -> str:
        s = f"it={self.iteration} n={self.n} lb={self.lb!r} B={list(self.B)}"
        if verbose and self.weights is not None:
            s += f" w={[round(x, 6) for x in self.weights]}"
        return s


@dataclass
class RunResult:
    selection: Selection
    total: int
    iterations: int
    lb: float
    reason: str
    trace: list[TraceRecord]
    n_clamped: int = 0
    posterior: PosteriorState | None = None

    @property
    def B(self) -> tuple[int, ...]:
        return self.selection.B

    def format_trace(self, config: RunConfig | None = None, verbose: bool = False) -> str:
        lines = [config.header()] if config is not None else []
        lines += [r.line(verbose) for r in self.trace]
        lines.append(f"# reason={self.reason} total={self.total} iterations={self.iterations}")
        return "\n".join(lines) + "\n"


def _evaluate(config: RunConfig, sample: RaggedSample):
    if config.crn_mode == "isCRN":
        post = posterior_estimate(sample, config.nu0)
    else:
        post = posterior_marginal(sample)
    sel = select(config.scheme, post.nu_hat)
    table = dominance_table(post, sel.rho, config.delta)
    return post, sel, table, bonferroni_lb(table)


def run(config: RunConfig, observe: Observe, sample: RaggedSample | None = None) -> RunResult:
    """Execute one BayesRS replication.

    ``observe(i, k)`` must return the observation of solution ``i`` on scenario
    ``k`` deterministically.  A pre-built initial ``sample`` may be supplied.
    """
    config.validate()
    if sample is None:
        sample = init_sample(config.L, config.n0, observe, strict=True)
    it = 0
    clamped = 0
    trace: list[TraceRecord] = []
    weights = None
    while True:
        try:
            post, sel, table, lb = _evaluate(config, sample)
        except BayesRSError as exc:
            raise type(exc)(f"iteration {it}: {exc}") from exc
        clamped += post.n_clamped
        trace.append(TraceRecord(it, sample.n.tolist(), lb, sel.B, weights))
        if lb >= 1.0 - config.alpha:
            reason = CERTIFIED
            break
        if sample.total >= config.cap:
            reason = CAP_REACHED
            break
        plan = allocate(config.strategy, StrategyInputs(post, table, config.b, config.alpha, config.delta))
        weights = None if plan.weights is None else plan.weights.tolist()
        append(sample, plan.q, observe)
        it += 1
    log.debug("run finished: %s after %d iterations, %d sims", reason, it, sample.total)
    return RunResult(sel, sample.total, it, lb, reason, trace, clamped, post)
