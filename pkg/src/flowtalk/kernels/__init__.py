"""Hot numeric kernels with two interchangeable backends.

The numba backend compiles the inner loops with ``@njit``; the numpy
backend is a pure-vectorized fallback. Selection order:

1. ``FLOWTALK_KERNELS`` environment variable (``numba`` or ``numpy``),
   read once at import time;
2. ``numba`` when importable, else ``numpy``.

``set_backend``/``use_backend`` switch at runtime (used by the benchmark
and the cross-backend tests). Both backends implement the same math; they
may differ in the last float ulp because of different ``exp``/summation
code paths, so cross-backend comparisons are close-to, not bit-equal.
"""

from __future__ import annotations

import contextlib
import os

from . import _numpy_impl

_BACKENDS = {"numpy": _numpy_impl}

try:  # pragma: no cover - exercised implicitly on import
    from . import _numba_impl

    _BACKENDS["numba"] = _numba_impl
    _DEFAULT = "numba"
except ImportError:  # pragma: no cover
    _DEFAULT = "numpy"

_requested = os.environ.get("FLOWTALK_KERNELS", "").strip().lower()
if _requested:
    if _requested not in _BACKENDS:
        raise ImportError(
            f"FLOWTALK_KERNELS={_requested!r} is not available; "
            f"choose from {sorted(_BACKENDS)}"
        )
    _active = _requested
else:
    _active = _DEFAULT


def available_backends():
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choose from {sorted(_BACKENDS)}")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def softmax_rows(x):
    """Row-wise softmax of a 2-D array, numerically stabilized."""
    return _BACKENDS[_active].softmax_rows(x)


def softmax_rows_grad(p, dp):
    """Backward of ``softmax_rows``: returns dscores given p and dL/dp."""
    return _BACKENDS[_active].softmax_rows_grad(p, dp)


def gauss_splat(img, xs, ys, amps, sigma):
    """Accumulate isotropic Gaussian blobs into ``img`` in place.

    Each point (xs[i], ys[i]) adds ``amps[i] * exp(-d^2 / (2 sigma^2))``
    to pixels whose center lies within 4*sigma of the point; pixels
    farther away are left untouched (hard cutoff). ``sigma == 0`` paints
    a single unit-weight pixel at the rounded location.
    """
    _BACKENDS[_active].gauss_splat(img, xs, ys, amps, float(sigma))
