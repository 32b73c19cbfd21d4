"""Backend switch for the numeric kernels.

Set ``BAYESRS_PURE_NUMPY=1`` (or ``NUMBA_DISABLE_JIT=1``) before import to
force the vectorised numpy kernels instead of the numba ones.
"""
import os

_FLAG = os.environ.get("BAYESRS_PURE_NUMPY", "").strip().lower()
_FORCE_NUMPY = _FLAG not in ("", "0", "false", "no") or "NUMBA_DISABLE_JIT" in os.environ

try:
    if _FORCE_NUMPY:
        raise ImportError
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"
