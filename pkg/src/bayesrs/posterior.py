"""Posterior of the mean vector from a ragged CRN sample.

All recursions run in the frame where solutions are sorted by descending
sample size (see :func:`bayesrs.samples.ordering`); results are mapped back
to the caller's solution order before they are returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateDF, NotPositiveDefinite, OutOfRange, SingularCovariance
from .numerics import as_symmetric, cholesky, spd_solve
from .samples import RaggedSample, ordering

LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class PosteriorState:
    """Approximate posterior N/t(nu_hat, lambda_hat) in original solution order."""

    nu_hat: np.ndarray
    lambda_hat: np.ndarray
    perm: np.ndarray
    n: np.ndarray
    nu0: float | None = None
    kind: str = "plugin"
    n_clamped: int = 0

    @property
    def L(self) -> int:
        return self.nu_hat.shape[0]


@dataclass
class CovEstimates:
    """Estimated blocks per recursion level ``i`` (1-based, ``i >= 2``).

    ``blocks[i]`` is the ``(i-1) x (i-1)`` covariance of the first ``i-1``
    sorted solutions, ``cross[i]`` the covariances of solution ``i`` with them.
    """

    blocks: dict[int, np.ndarray] = field(default_factory=dict)
    cross: dict[int, np.ndarray] = field(default_factory=dict)


def _unpermute(perm, nu, lam):
    nu_o = np.empty_like(nu)
    nu_o[perm] = nu
    lam_o = np.empty_like(lam)
    lam_o[np.ix_(perm, perm)] = lam
    return nu_o, lam_o


def cov_estimate(sample: RaggedSample, k: int, l: int, m: int) -> float:
    """Maximum-likelihood cross moment of solutions ``k`` and ``l`` over the
    first ``m`` scenarios (divisor ``m``)."""
    if m < 2 or m > min(sample.n[k], sample.n[l]):
        raise OutOfRange(f"common count m={m} invalid for solutions {k}, {l}")
    xk = sample.row(k)[:m]
    xl = sample.row(l)[:m]
    return float((xk - xk.sum() / m) @ (xl - xl.sum() / m) / m)


def estimate_covariances(sample: RaggedSample) -> CovEstimates:
    """Per-level covariance blocks in the sorted frame.

    The block of level ``i`` uses the ``n_{i-1}`` scenarios shared by the
    first ``i-1`` solutions; the cross row uses the ``n_i`` scenarios that
    solution ``i`` has in common with them.
    """
    perm = ordering(sample)
    n = sample.n[perm]
    out = CovEstimates()
    for i in range(2, sample.L + 1):
        prev = perm[: i - 1]
        mp, mi = int(n[i - 2]), int(n[i - 1])
        out.blocks[i] = np.array([[cov_estimate(sample, a, b, mp) for b in prev] for a in prev])
        out.cross[i] = np.array([cov_estimate(sample, perm[i - 1], a, mi) for a in prev])
    return out


def beta_hat(cov: CovEstimates, i: int) -> np.ndarray:
    """Regression coefficients of level ``i``: ``cross[i] @ inv(blocks[i])``."""
    try:
        return spd_solve(cov.blocks[i], cov.cross[i])
    except NotPositiveDefinite as exc:
        raise SingularCovariance(f"covariance block of level {i} is singular") from exc


def posterior_known_sigma(sample: RaggedSample, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Exact posterior N(nu, Lambda) of the mean under a flat prior and known ``sigma``."""
    sigma = as_symmetric(sigma)
    perm = ordering(sample)
    X, n = sample.permuted(perm)
    nu, lam, failed = kernels.posterior_known(X, n, sigma[np.ix_(perm, perm)])
    if failed:
        raise NotPositiveDefinite(f"sigma block of level {failed} is not positive definite")
    return _unpermute(perm, nu, lam)


def posterior_estimate(sample: RaggedSample, nu0: float) -> PosteriorState:
    """Plug-in posterior with estimated covariances and df corrections
    ``1 / (n_i - i + nu0)`` at recursion level ``i``."""
    perm = ordering(sample)
    X, n = sample.permuted(perm)
    levels = np.arange(1, sample.L + 1)
    if np.any(n - levels + nu0 < 1):
        bad = int(levels[np.argmax(n - levels + nu0 < 1)])
        raise DegenerateDF(f"n_i - i + nu0 < 1 at sorted level {bad}")
    if n.min() < 2:
        raise OutOfRange("every solution needs at least two observations")
    nu, lam, clamped, failed = kernels.posterior_plugin(X, n, nu0)
    if failed:
        raise SingularCovariance(f"estimated covariance block of level {failed} is singular")
    nu_o, lam_o = _unpermute(perm, nu, lam)
    return PosteriorState(nu_o, lam_o, perm, sample.n.copy(), nu0=nu0, kind="plugin",
                          n_clamped=int(clamped))


def posterior_marginal(sample: RaggedSample) -> PosteriorState:
    """Posterior ignoring dependence: sample means and a diagonal covariance
    with entries ``sigma_hat_ii / (n_i - 1)``."""
    if sample.n.min() < 2:
        raise OutOfRange("every solution needs at least two observations")
    nu = np.empty(sample.L)
    var = np.empty(sample.L)
    for i in range(sample.L):
        m = int(sample.n[i])
        nu[i] = sample.row(i).sum() / m
        var[i] = cov_estimate(sample, i, i, m) / (m - 1)
    return PosteriorState(nu, np.diag(var), ordering(sample), sample.n.copy(), kind="marginal")


def _conditional_terms(sigma_sorted):
    """``beta_i`` and ``sigma_tilde_(i-1)`` for every sorted level."""
    L = sigma_sorted.shape[0]
    betas = [np.zeros(0)]
    cond = [float(sigma_sorted[0, 0])]
    for i in range(1, L):
        block = sigma_sorted[:i, :i]
        b = spd_solve(block, sigma_sorted[i, :i])
        betas.append(b)
        cond.append(float(sigma_sorted[i, i] - b @ block @ b))
    return betas, cond


def _norm_logpdf(x, mean, var):
    return -0.5 * (LOG_2PI + math.log(var) + (x - mean) ** 2 / var)


def log_likelihood_known_sigma(sample: RaggedSample, sigma, mu) -> float:
    """Log-likelihood of ``mu`` up to a ``mu``-free constant, as a product of
    one-dimensional normal densities

        phi(mu_1; xbar_1, s_11/n_1) * prod_i phi(mu_i; xbar_i + beta_i (mu_<i - xbar^(n_i)_<i), s~_i / n_i)

    in the sorted frame.
    """
    sigma = as_symmetric(sigma)
    perm = ordering(sample)
    X, n = sample.permuted(perm)
    mu_s = np.asarray(mu, dtype=np.float64)[perm]
    betas, cond = _conditional_terms(sigma[np.ix_(perm, perm)])
    total = 0.0
    for i in range(sample.L):
        xbar = X[i, : n[i]].sum() / n[i]
        if i == 0:
            centre = xbar
        else:
            xr = np.array([X[k, : n[i]].sum() / n[i] for k in range(i)])
            centre = xbar + betas[i] @ (mu_s[:i] - xr)
        total += _norm_logpdf(mu_s[i], centre, cond[i] / n[i])
    return float(total)


def log_likelihood_blocks(sample: RaggedSample, sigma, mu) -> float:
    """Exact log-likelihood as a product over the column blocks of equal height.

    Column ``k`` contributes the ``l``-dimensional normal density of its first
    ``l`` (sorted) entries, where ``l`` is the number of solutions observed on
    scenario ``k``.
    """
    sigma = as_symmetric(sigma)
    perm = ordering(sample)
    X, n = sample.permuted(perm)
    s = sigma[np.ix_(perm, perm)]
    mu_s = np.asarray(mu, dtype=np.float64)[perm]
    total = 0.0
    for k in range(int(n[0])):
        h = int(np.sum(n > k))
        chol = cholesky(s[:h, :h])
        r = np.linalg.solve(chol, X[:h, k] - mu_s[:h])
        total += -0.5 * (h * LOG_2PI + r @ r) - np.log(np.diag(chol)).sum()
    return float(total)


def log_likelihood_conditional(sample: RaggedSample, sigma, mu) -> float:
    """Exact log-likelihood factorized into one-dimensional conditional
    densities per observation, grouped by solution."""
    sigma = as_symmetric(sigma)
    perm = ordering(sample)
    X, n = sample.permuted(perm)
    mu_s = np.asarray(mu, dtype=np.float64)[perm]
    betas, cond = _conditional_terms(sigma[np.ix_(perm, perm)])
    total = 0.0
    for i in range(sample.L):
        for j in range(int(n[i])):
            mean = mu_s[i] if i == 0 else mu_s[i] + betas[i] @ (X[:i, j] - mu_s[:i])
            total += _norm_logpdf(X[i, j], mean, cond[i])
    return float(total)
