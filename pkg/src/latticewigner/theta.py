"""Jacobi theta function of the third kind.

Only the real-nome case ``0 <= q < 1`` is supported, which is all the
discretized Gaussian closed forms need.  The series is summed symmetrically,

    theta3(z, q) = 1 + sum_{n>=1} q**(n**2) * (exp(2izn) + exp(-2izn)),

so ``theta3(-z, q) == theta3(z, q)`` holds bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ThetaConvergenceError

MAX_TERMS = 10**6


@dataclass(frozen=True)
class ThetaResult:
    """Value of the truncated series together with its truncation audit."""

    value: complex | np.ndarray
    terms_used: int
    tail_bound: float


def _log_term(n: int, log_q: float, y: float, log_scale: float = 0.0) -> float:
    # log of the majorant 2 e^{log_scale} q**(n**2) exp(2 n |Im z|)
    return math.log(2.0) + log_scale + n * n * log_q + 2.0 * n * y


def terms_needed(q: float, imag_bound: float, tol: float, log_scale: float = 0.0,
                 max_terms: int = MAX_TERMS) -> tuple[int, float]:
    """Number of positive-index terms after which the tail is below ``tol``.

    Returns ``(N, tail_bound)``.  The tail ``sum_{n>N} 2 q^{n^2} e^{2n y}`` is
    bounded geometrically once the term ratio ``q^{2n+1} e^{2y}`` drops
    below one, and it keeps decreasing from there on.
    """
    if q == 0.0:
        return 0, 0.0
    log_q = math.log(q)
    y = abs(imag_bound)
    log_tol = math.log(tol)
    n = 0
    while True:
        nxt = n + 1
        log_ratio = (2 * nxt + 1) * log_q + 2.0 * y
        if log_ratio < 0.0:
            log_tail = (_log_term(nxt, log_q, y, log_scale)
                        - math.log1p(-math.exp(log_ratio)))
            if log_tail < log_tol:
                return n, math.exp(log_tail)
        n = nxt
        if n > max_terms:
            raise ThetaConvergenceError(
                f"theta3 needs more than {max_terms} terms (q={q!r}, |Im z|={y!r})"
            )


def theta3(z, q: float, tol: float = 1e-15, log_scale: float = 0.0,
           max_terms: int = MAX_TERMS) -> ThetaResult:
    """Evaluate ``exp(log_scale) * theta3(z, q)``, ``theta3 = sum_n q**(n**2) exp(2izn)``.

    Parameters
    ----------
    z : complex or array_like of complex
        Argument; arrays are evaluated elementwise with a common truncation
        chosen for the largest ``|Im z|``.
    q : float
        Real nome, ``0 <= q < 1``.
    tol : float
        Absolute bound on the discarded tail of the scaled series.
    log_scale : float
        Logarithm of a prefactor folded into every term.  Closed forms that
        multiply theta3 by a small Gaussian envelope pass it here so large
        ``|Im z|`` cannot overflow.

    Raises
    ------
    ValueError
        If ``q`` is outside ``[0, 1)`` or ``tol`` is not positive.
    ThetaConvergenceError
        If more than ``max_terms`` terms would be required.
    """
    q = float(q)
    if not 0.0 <= q < 1.0:
        raise ValueError(f"nome must satisfy 0 <= q < 1, got {q!r}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")

    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    imag_bound = float(np.max(np.abs(zz.imag))) if zz.size else 0.0
    n_terms, tail = terms_needed(q, imag_bound, tol, log_scale, max_terms)

    total = np.full(zz.shape, math.exp(log_scale), dtype=complex)
    if n_terms:
        log_q = math.log(q)
        for n in range(1, n_terms + 1):
            base = log_scale + n * n * log_q
            # +n and -n terms added as one pair; swapping z -> -z swaps the
            # operands of a commutative add, so evenness is exact
            total = total + (np.exp(base + 2j * n * zz) + np.exp(base - 2j * n * zz))
    value = complex(total) if scalar else total
    return ThetaResult(value=value, terms_used=n_terms, tail_bound=tail)


def theta3_value(z, q: float, tol: float = 1e-15):
    """Shorthand returning only the value of :func:`theta3`."""
    return theta3(z, q, tol).value
