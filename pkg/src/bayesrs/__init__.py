"""Sequential Bayesian ranking and selection for correlated normal systems
simulated with common random numbers."""
from ._accel import BACKEND
from .allocation import (AllocationPlan, StrategyInputs, allocate, dpw, dpw_plus,
                         equal_allocation, gamma_ij, greedy_ocba, round_largest_remainder)
from .numerics import cholesky, mvn_sample, spd_solve, t_cdf
from .pcs import DominanceTable, bonferroni_lb, dominance_prob, dominance_table
from .posterior import (PosteriorState, posterior_estimate, posterior_known_sigma,
                        posterior_marginal)
from .procedure import RunConfig, RunResult, run
from .samples import RaggedSample, append, init_sample, ordering, restricted_mean
from .targets import Selection, TargetScheme, is_correct, pair_count, select
from .testbed import ProblemInstance, crn_observe, mu_case, sigma_case

__version__ = "0.1.0"
