"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy fallback
takes over.  ``LW_KERNELS=python`` forces the fallback and ``LW_THREADS``
caps how many threads the compiled backend spreads rows over.  Rows are
independent, so the thread count never changes a result.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled


def default_backend() -> str:
    forced = os.environ.get("LW_KERNELS", "").strip().lower()
    if forced:
        if forced not in BACKENDS:
            raise ValueError(f"LW_KERNELS={forced!r} is not available; have {sorted(BACKENDS)}")
        return forced
    return "cython" if "cython" in BACKENDS else "python"


def thread_count() -> int:
    raw = os.environ.get("LW_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def twiddle(n_k: int) -> np.ndarray:
    """``exp(-2 pi i t / N)`` for ``t = 0..N-1``."""
    return np.exp(-2j * math.pi * np.arange(n_k) / n_k)


def _run_rows(fn, n_rows: int, backend: str, *args):
    n_threads = min(thread_count(), n_rows) if backend == "cython" else 1
    if n_threads <= 1:
        fn(*args[:-1], 0, n_rows, args[-1])
        return
    bounds = np.linspace(0, n_rows, n_threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        futures = [pool.submit(fn, *args[:-1], int(lo), int(hi), args[-1])
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        for fut in futures:
            fut.result()


def direct_grid(rho: np.ndarray, n_k: int, backend: str | None = None) -> np.ndarray:
    """Complex ``W`` rows ``m = 2 n_min + r`` by explicit summation over sites."""
    backend = backend or default_backend()
    rho = np.ascontiguousarray(rho, dtype=complex)
    n_rows = 2 * rho.shape[0] - 1
    out = np.zeros((n_rows, n_k), dtype=complex)
    impl = BACKENDS[backend]
    _run_rows(impl.direct_rows, n_rows, backend, rho, twiddle(n_k), out)
    return out


def sign_filter(values: np.ndarray, row_eps: np.ndarray, m_start: int,
                backend: str | None = None) -> np.ndarray:
    backend = backend or default_backend()
    values = np.ascontiguousarray(values, dtype=float)
    out = np.empty_like(values)
    impl = BACKENDS[backend]
    _run_rows(impl.sign_filter_rows, values.shape[0], backend,
              values, np.ascontiguousarray(row_eps, dtype=float), int(m_start), out)
    return out


def product_grid(w1: np.ndarray, w2: np.ndarray, backend: str | None = None) -> np.ndarray:
    backend = backend or default_backend()
    w1 = np.ascontiguousarray(w1, dtype=float)
    w2 = np.ascontiguousarray(w2, dtype=float)
    out = np.zeros(w1.shape, dtype=complex)
    impl = BACKENDS[backend]
    _run_rows(impl.product_rows, w1.shape[0], backend, w1, w2, twiddle(w1.shape[1]), out)
    return out
