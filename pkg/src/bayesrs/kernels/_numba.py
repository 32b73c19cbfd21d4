"""numba-compiled twins of the kernels in ``_numpy``.

Loops are written out explicitly; ``fastmath`` stays off so that summation
order (and hence the exact complete-data identities) matches the contract.
"""
import math

import numpy as np
from numba import njit

from ._numpy import CF_EPS, CF_MAXIT, COND_FLOOR, FPMIN, PD_RTOL


@njit(cache=True)
def cholesky(m):
    d = m.shape[0]
    out = np.zeros((d, d))
    mx = 0.0
    for j in range(d):
        if m[j, j] > mx:
            mx = m[j, j]
    tol = PD_RTOL * mx
    for j in range(d):
        s = m[j, j]
        for k in range(j):
            s -= out[j, k] * out[j, k]
        if not s > tol:
            return out, False
        out[j, j] = math.sqrt(s)
        for i in range(j + 1, d):
            s = m[i, j]
            for k in range(j):
                s -= out[i, k] * out[j, k]
            out[i, j] = s / out[j, j]
    return out, True


@njit(cache=True)
def chol_solve(chol, rhs):
    d = chol.shape[0]
    y = np.empty(d)
    for i in range(d):
        s = rhs[i]
        for k in range(i):
            s -= chol[i, k] * y[k]
        y[i] = s / chol[i, i]
    x = np.empty(d)
    for i in range(d - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, d):
            s -= chol[k, i] * x[k]
        x[i] = s / chol[i, i]
    return x


@njit(cache=True)
def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < CF_EPS:
            break
    return h


@njit(cache=True)
def _betainc_scalar(a, b, x, y):
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    bt = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                  + a * math.log(x) + b * math.log(y))
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, y) / b


@njit(cache=True)
def betainc_reg(a, b, x, y):
    out = np.empty(x.shape[0])
    for k in range(x.shape[0]):
        out[k] = _betainc_scalar(a[k], b[k], x[k], y[k])
    return out


@njit(cache=True)
def _t_cdf_scalar(x, df, loc, scale):
    t = (x - loc) / math.sqrt(scale)
    t2 = t * t
    tail = 0.5 * _betainc_scalar(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2))
    if t > 0.0:
        return 1.0 - tail
    return tail


@njit(cache=True)
def _t_cdf_flat(x, df, loc, scale):
    out = np.empty(x.shape[0])
    for k in range(x.shape[0]):
        out[k] = _t_cdf_scalar(x[k], df[k], loc[k], scale[k])
    return out


def t_cdf_many(x, df, loc, scale):
    x, df, loc, scale = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.float64) for v in (x, df, loc, scale))
    )
    shape = x.shape
    # broadcast views are read-only; numba wants owned buffers
    flat = _t_cdf_flat(*(np.array(v, dtype=np.float64).ravel() for v in (x, df, loc, scale)))
    return flat.reshape(shape)


@njit(cache=True)
def _prefix_mean(X, k, m):
    s = 0.0
    for c in range(m):
        s += X[k, c]
    return s / m


@njit(cache=True)
def _ml_cov_entry(X, k, l, m, mk, ml):
    s = 0.0
    for c in range(m):
        s += (X[k, c] - mk) * (X[l, c] - ml)
    return s / m


@njit(cache=True)
def _quad(beta, block):
    d = beta.shape[0]
    s = 0.0
    for a in range(d):
        for b in range(d):
            s += beta[a] * block[a, b] * beta[b]
    return s


@njit(cache=True)
def _level_update(nu, lam, i, beta, xbar_i, xr):
    # shared tail of both recursions: mean update and off-diagonal column
    corr = 0.0
    for k in range(i):
        corr += beta[k] * (nu[k] - xr[k])
    nu[i] = xbar_i + corr
    blb = 0.0
    for a in range(i):
        s = 0.0
        for b in range(i):
            s += lam[a, b] * beta[b]
        lam[a, i] = s
        lam[i, a] = s
        blb += beta[a] * s
    return blb


@njit(cache=True)
def posterior_plugin(X, n, nu0):
    L = X.shape[0]
    nu = np.empty(L)
    lam = np.zeros((L, L))
    xbar = np.empty(L)
    for k in range(L):
        xbar[k] = _prefix_mean(X, k, n[k])
    nu[0] = xbar[0]
    lam[0, 0] = _ml_cov_entry(X, 0, 0, n[0], xbar[0], xbar[0]) / (n[0] - 1 + nu0)
    clamped = 0
    for i in range(1, L):
        mp = n[i - 1]
        mi = n[i]
        bm = np.empty(i)
        xr = np.empty(i)
        for k in range(i):
            bm[k] = _prefix_mean(X, k, mp)
            xr[k] = _prefix_mean(X, k, mi)
        block = np.empty((i, i))
        for a in range(i):
            for b in range(a + 1):
                v = _ml_cov_entry(X, a, b, mp, bm[a], bm[b])
                block[a, b] = v
                block[b, a] = v
        cross = np.empty(i)
        for k in range(i):
            cross[k] = _ml_cov_entry(X, k, i, mi, xr[k], xbar[i])
        chol, ok = cholesky(block)
        if not ok:
            return nu, lam, clamped, i + 1
        beta = chol_solve(chol, cross)
        blb = _level_update(nu, lam, i, beta, xbar[i], xr)
        cond = _ml_cov_entry(X, i, i, mi, xbar[i], xbar[i]) - _quad(beta, block)
        if cond < COND_FLOOR:
            cond = COND_FLOOR
            clamped += 1
        lam[i, i] = cond / (mi - (i + 1) + nu0) + blb
    return nu, lam, clamped, 0


@njit(cache=True)
def posterior_known(X, n, sigma):
    L = X.shape[0]
    nu = np.empty(L)
    lam = np.zeros((L, L))
    xbar = np.empty(L)
    for k in range(L):
        xbar[k] = _prefix_mean(X, k, n[k])
    nu[0] = xbar[0]
    lam[0, 0] = sigma[0, 0] / n[0]
    for i in range(1, L):
        mi = n[i]
        block = np.ascontiguousarray(sigma[:i, :i])
        chol, ok = cholesky(block)
        if not ok:
            return nu, lam, i + 1
        beta = chol_solve(chol, np.ascontiguousarray(sigma[i, :i]))
        xr = np.empty(i)
        for k in range(i):
            xr[k] = _prefix_mean(X, k, mi)
        blb = _level_update(nu, lam, i, beta, xbar[i], xr)
        lam[i, i] = (sigma[i, i] - _quad(beta, block)) / mi + blb
    return nu, lam, 0
