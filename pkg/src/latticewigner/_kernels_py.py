"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built, and as the reference the compiled
kernels are tested against.  Phases are computed with ``np.exp`` directly
rather than through the twiddle table, so the two backends share no code.
"""
import math

import numpy as np


def _k_nodes(n_k):
    return -math.pi + 2.0 * math.pi * np.arange(n_k) / n_k


def direct_rows(rho, twiddle, row_start, row_stop, out):
    size = rho.shape[0]
    k = _k_nodes(twiddle.shape[0])
    for r in range(row_start, row_stop):
        lo, hi = max(0, r - size + 1), min(r, size - 1)
        i = np.arange(lo, hi + 1)
        coeff = rho[i, r - i]
        freq = 2 * i - r
        out[r, :] = coeff @ np.exp(-1j * np.outer(freq, k)) / (2.0 * math.pi)


def _signs(values, eps):
    return np.where(values > eps, 1, np.where(values < -eps, -1, 0))


def sign_filter_rows(values, row_eps, m_start, row_start, row_stop, out):
    n_rows = values.shape[0]
    for r in range(row_start, row_stop):
        w = values[r]
        if (m_start + r) % 2 == 0:
            out[r] = w
            continue
        s_lo = _signs(values[r - 1], row_eps[r - 1]) if r > 0 else 0
        s_hi = _signs(values[r + 1], row_eps[r + 1]) if r + 1 < n_rows else 0
        vote = 2 * s_lo + _signs(w, row_eps[r]) + 2 * s_hi
        out[r] = np.where(vote > 0, np.abs(w), np.where(vote < 0, -np.abs(w), w))


def product_rows(w1, w2, twiddle, row_start, row_stop, out):
    n_rows, n_k = w1.shape
    k = _k_nodes(n_k)
    offsets = np.arange(n_rows)
    shifts = np.arange(n_k)
    scale = (1.0 / (2.0 * math.pi)) * (2.0 * math.pi / n_k) ** 2
    for r in range(row_start, row_stop):
        d = offsets - r
        e_minus = np.exp(-1j * np.outer(d, k))  # (r1, j2)
        e_plus = np.exp(1j * np.outer(d, k))    # (r2, j1)
        for j in range(n_k):
            cols = (j + shifts - n_k // 2) % n_k
            x = w1[:, cols].T @ e_minus          # (j1, j2)
            y = w2[:, cols].T @ e_plus           # (j2, j1)
            out[r, j] = np.sum(x * y.T) * scale
