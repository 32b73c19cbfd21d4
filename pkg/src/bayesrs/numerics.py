"""Dense symmetric linear algebra, the Student-t CDF and normal sampling.

Matrices are plain ``numpy`` arrays; symmetry is checked, not wrapped in a
class. The factorization and the t CDF dispatch to the compiled or numpy
kernels (see :mod:`bayesrs.kernels`).
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidParameter, NotPositiveDefinite


def as_symmetric(m) -> np.ndarray:
    """Validate and return ``m`` as a square symmetric float array."""
    a = np.array(m, dtype=np.float64, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise InvalidParameter("matrix is not exactly symmetric")
    return a


def cholesky(m) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    Raises:
        NotPositiveDefinite: if a pivot is at most ``1e-12 * max(diag(m))``.
    """
    a = as_symmetric(m)
    chol, ok = kernels.cholesky(a)
    if not ok:
        raise NotPositiveDefinite("matrix is not positive definite")
    return chol


def spd_solve(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for symmetric positive definite ``m``."""
    chol = cholesky(m)
    b = np.asarray(rhs, dtype=np.float64)
    if b.shape != (chol.shape[0],):
        raise DimensionMismatch(f"rhs has shape {b.shape}, expected ({chol.shape[0]},)")
    return kernels.chol_solve(chol, b.copy())


def t_cdf_many(x, df, loc, scale) -> np.ndarray:
    """Vectorised :func:`t_cdf`; arguments broadcast against each other."""
    df_a = np.asarray(df, dtype=np.float64)
    sc_a = np.asarray(scale, dtype=np.float64)
    if np.any(df_a < 1):
        raise InvalidParameter("degrees of freedom must be >= 1")
    if np.any(~(sc_a > 0)):
        raise InvalidParameter("scale must be positive")
    return kernels.t_cdf_many(x, df_a, loc, sc_a)


def t_cdf(x: float, df: int, loc: float = 0.0, scale: float = 1.0) -> float:
    """CDF of the location-scale t distribution.

    ``scale`` is the *squared* scale: the argument is standardized as
    ``(x - loc) / sqrt(scale)`` and passed to the standard t CDF with ``df``
    degrees of freedom, evaluated through the regularized incomplete beta
    function.

    >>> round(t_cdf(1.0, 1), 12)
    0.75
    """
    return float(t_cdf_many(np.array([x]), np.array([df]), np.array([loc]), np.array([scale]))[0])


def mvn_sample(mu, chol, z) -> np.ndarray:
    """Deterministic map ``mu + chol @ z`` from standard normals to N(mu, chol chol^T).

    ``z`` may be a vector or an ``(n, d)`` array of row vectors.
    """
    mu = np.asarray(mu, dtype=np.float64)
    chol = np.asarray(chol, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    d = mu.shape[0]
    if chol.shape != (d, d) or z.shape[-1] != d:
        raise DimensionMismatch(f"mu {mu.shape}, chol {chol.shape}, z {z.shape}")
    return mu + z @ chol.T
