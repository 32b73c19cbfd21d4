"""Kernel dispatch: numba when available and not disabled, else numpy."""
import numpy as np

from .._accel import BACKEND

if BACKEND == "numba":
    from . import _numba as _impl
else:
    from . import _numpy as _impl

cholesky = _impl.cholesky
chol_solve = _impl.chol_solve
t_cdf_many = _impl.t_cdf_many


def posterior_plugin(X, n, nu0):
    return _impl.posterior_plugin(
        np.ascontiguousarray(X, dtype=np.float64), np.asarray(n, dtype=np.int64), float(nu0)
    )


def posterior_known(X, n, sigma):
    return _impl.posterior_known(
        np.ascontiguousarray(X, dtype=np.float64),
        np.asarray(n, dtype=np.int64),
        np.ascontiguousarray(sigma, dtype=np.float64),
    )


__all__ = ["BACKEND", "cholesky", "chol_solve", "t_cdf_many", "posterior_plugin", "posterior_known"]
