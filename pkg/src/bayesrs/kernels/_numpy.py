"""Vectorised numpy implementations of the hot kernels.

These are the reference path when numba is unavailable or disabled. Every
function has a twin with the same signature in ``_numba``.
"""
import math

import numpy as np

FPMIN = 1e-300
CF_EPS = 1e-15
CF_MAXIT = 20000
PD_RTOL = 1e-12
COND_FLOOR = 1e-12


def cholesky(m):
    """Return ``(L, ok)``; ``ok`` is False when a pivot is below tolerance."""
    m = np.asarray(m, dtype=np.float64)
    d = m.shape[0]
    tol = PD_RTOL * max(float(np.max(np.diag(m))), 0.0)
    out = np.zeros_like(m)
    for j in range(d):
        pivot = m[j, j] - out[j, :j] @ out[j, :j]
        if not pivot > tol:
            return out, False
        out[j, j] = math.sqrt(pivot)
        if j + 1 < d:
            out[j + 1:, j] = (m[j + 1:, j] - out[j + 1:, :j] @ out[j, :j]) / out[j, j]
    return out, True


def chol_solve(chol, rhs):
    y = np.empty_like(rhs)
    d = chol.shape[0]
    for i in range(d):
        y[i] = (rhs[i] - chol[i, :i] @ y[:i]) / chol[i, i]
    x = np.empty_like(rhs)
    for i in range(d - 1, -1, -1):
        x[i] = (y[i] - chol[i + 1:, i] @ x[i + 1:]) / chol[i, i]
    return x


def _betacf(a, b, x):
    # modified Lentz evaluation, elementwise over equal-shape arrays
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < FPMIN, FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        step = d * c
        h = np.where(done, h, h * step)
        done |= np.abs(step - 1.0) < CF_EPS
        if done.all():
            break
    return h


def _lgamma(v):
    return np.vectorize(math.lgamma, otypes=[np.float64])(v)


def betainc_reg(a, b, x, y):
    """Regularized incomplete beta ``I_x(a, b)`` with ``y == 1 - x`` supplied."""
    a, b, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (a, b, x, y)))
    out = np.empty(x.shape)
    lo = x <= 0.0
    hi = y <= 0.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    if mid.any():
        am, bm, xm, ym = a[mid], b[mid], x[mid], y[mid]
        logbt = _lgamma(am + bm) - _lgamma(am) - _lgamma(bm) + am * np.log(xm) + bm * np.log(ym)
        bt = np.exp(logbt)
        direct = xm < (am + 1.0) / (am + bm + 2.0)
        # evaluate the fraction on whichever side converges
        ca = np.where(direct, am, bm)
        cb = np.where(direct, bm, am)
        cx = np.where(direct, xm, ym)
        cf = _betacf(ca, cb, cx)
        out[mid] = np.where(direct, bt * cf / am, 1.0 - bt * cf / bm)
    return out


def t_cdf_many(x, df, loc, scale):
    """Location/squared-scale Student-t CDF evaluated elementwise."""
    x, df, loc, scale = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.float64) for v in (x, df, loc, scale))
    )
    t = (x - loc) / np.sqrt(scale)
    t2 = t * t
    w = df / (df + t2)
    wc = t2 / (df + t2)
    tail = 0.5 * betainc_reg(0.5 * df, np.full(t.shape, 0.5), w, wc)
    return np.where(t > 0.0, 1.0 - tail, tail)


def _prefix_mean(X, k, m):
    return X[k, :m].sum() / m


def _ml_cov(X, rows, m, means):
    dev = X[:rows, :m] - means[:, None]
    return dev @ dev.T / m


def _ml_cross(X, i, rows, m, means, mean_i):
    dev = X[:rows, :m] - means[:, None]
    return dev @ (X[i, :m] - mean_i) / m


def posterior_plugin(X, n, nu0):
    """Plug-in posterior recursion on a row-sorted ragged matrix.

    Returns ``(nu, lam, n_clamped, failed_level)`` with ``failed_level == 0``
    on success, else the 1-based level whose covariance block is singular.
    """
    L = X.shape[0]
    nu = np.empty(L)
    lam = np.zeros((L, L))
    xbar = np.array([_prefix_mean(X, k, n[k]) for k in range(L)])
    nu[0] = xbar[0]
    dev0 = X[0, :n[0]] - xbar[0]
    lam[0, 0] = (dev0 @ dev0 / n[0]) / (n[0] - 1 + nu0)
    clamped = 0
    for i in range(1, L):
        mp, mi = n[i - 1], n[i]
        block_means = np.array([_prefix_mean(X, k, mp) for k in range(i)])
        block = _ml_cov(X, i, mp, block_means)
        xr = np.array([_prefix_mean(X, k, mi) for k in range(i)])
        cross = _ml_cross(X, i, i, mi, xr, xbar[i])
        chol, ok = cholesky(block)
        if not ok:
            return nu, lam, clamped, i + 1
        beta = chol_solve(chol, cross)
        nu[i] = xbar[i] + beta @ (nu[:i] - xr)
        lb = lam[:i, :i] @ beta
        lam[:i, i] = lb
        lam[i, :i] = lb
        dev = X[i, :mi] - xbar[i]
        cond = dev @ dev / mi - beta @ block @ beta
        if cond < COND_FLOOR:
            cond = COND_FLOOR
            clamped += 1
        lam[i, i] = cond / (mi - (i + 1) + nu0) + beta @ lb
    return nu, lam, clamped, 0


def posterior_known(X, n, sigma):
    """Exact known-covariance recursion; returns ``(nu, lam, failed_level)``."""
    L = X.shape[0]
    nu = np.empty(L)
    lam = np.zeros((L, L))
    xbar = np.array([_prefix_mean(X, k, n[k]) for k in range(L)])
    nu[0] = xbar[0]
    lam[0, 0] = sigma[0, 0] / n[0]
    for i in range(1, L):
        mi = n[i]
        block = sigma[:i, :i]
        chol, ok = cholesky(block)
        if not ok:
            return nu, lam, i + 1
        beta = chol_solve(chol, sigma[i, :i].copy())
        xr = np.array([_prefix_mean(X, k, mi) for k in range(i)])
        nu[i] = xbar[i] + beta @ (nu[:i] - xr)
        lb = lam[:i, :i] @ beta
        lam[:i, i] = lb
        lam[i, :i] = lb
        cond = sigma[i, i] - beta @ block @ beta
        lam[i, i] = cond / mi + beta @ lb
    return nu, lam, 0
