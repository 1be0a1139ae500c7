"""Closed-form Wigner functions for localized and Gaussian states.

Each oracle has a point form taking a :class:`PhasePoint` and a row form
``*_row(params, m, k)`` that accepts an array of ``k``.  The numeric path in
:mod:`latticewigner.core` is checked against all of them in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, PhasePoint
from .errors import ImaginaryResidueError, StateError
from .states import (DEFAULT_TAIL_EPS, GaussianParams, PureState,
                     gaussian_half_width, gaussian_profile)
from .theta import theta3

THETA_TOL = 1e-15
IMAG_TOL = 1e-10


def _nome(sigma_tilde: float) -> float:
    return math.exp(-1.0 / sigma_tilde**2)


def _real_row(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    scale = 1.0 + np.abs(values.real)
    if np.any(np.abs(values.imag) >= IMAG_TOL * scale):
        raise ImaginaryResidueError("closed form left an imaginary residue above 1e-10")
    return values.real


def _point(row_fn, *args):
    pt = args[-1]
    return float(row_fn(*args[:-1], pt.m, np.array([pt.k]))[0])


# -- localized states --------------------------------------------------------

def delta_row(n0: int, m: int, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return np.full(k.shape, 1.0 / TWO_PI if m == 2 * n0 else 0.0)


def oracle_delta(n0: int, pt: PhasePoint) -> float:
    """``delta_{m, 2 n0} / 2pi``."""
    return _point(delta_row, n0, pt)


def two_delta_row(n1: int, n2: int, alpha: complex, m: int, k) -> np.ndarray:
    if n1 == n2:
        raise StateError("the two sites must differ")
    k = np.asarray(k, dtype=float)
    a = abs(alpha)
    phi = math.atan2(complex(alpha).imag, complex(alpha).real)
    out = np.zeros(k.shape)
    if m == 2 * n1:
        out += 1.0
    if m == 2 * n2:
        out += a * a
    if m == n1 + n2:
        # rho(n1, n2) = conj(alpha) carries exp(i (n2 - n1) k)
        out += 2.0 * a * np.cos((n2 - n1) * k - phi)
    return out / (TWO_PI * (1.0 + a * a))


def oracle_two_delta(n1: int, n2: int, alpha: complex, pt: PhasePoint) -> float:
    """Wigner function of ``(|n1> + alpha |n2>) / sqrt(1 + |alpha|^2)``."""
    return _point(two_delta_row, n1, n2, alpha, pt)


def oracle_eta_two_delta(alpha: complex) -> float:
    """``4 |alpha| / (pi (1 + |alpha|^2))``, the same for every separation."""
    a = abs(alpha)
    return 4.0 * a / (math.pi * (1.0 + a * a))


# -- single Gaussian ---------------------------------------------------------

def gaussian_row(p: GaussianParams, m: int, k, tol: float = THETA_TOL) -> np.ndarray:
    """Closed form of the normalized discretized Gaussian.

    ``(1/2pi) e^{i(k - q0a) m} e^{-((m-n0)^2 + n0^2) / 2s^2}
    theta3(k - q0a + i m / 2s^2, e^{-1/s^2}) / theta3(0, e^{-1/s^2})``
    """
    s2 = p.sigma_tilde**2
    q = _nome(p.sigma_tilde)
    k = np.asarray(k, dtype=float)
    shifted = k - p.q0a
    log_envelope = -((m - p.n0) ** 2 + p.n0**2) / (2.0 * s2)
    num = theta3(shifted + 1j * m / (2.0 * s2), q, tol, log_envelope).value
    den = theta3(0.0, q, tol).value.real
    return _real_row(np.exp(1j * shifted * m) * num / (den * TWO_PI))


def oracle_gaussian(p: GaussianParams, pt: PhasePoint) -> float:
    return _point(gaussian_row, p, pt)


# -- two Gaussians -----------------------------------------------------------

@dataclass(frozen=True)
class TwoGaussianParams:
    """``psi ~ g1 + alpha g2`` with ``g_i(n) = exp(-(n-n_i)^2/2 s_i^2) exp(i q_i a n)``."""

    n1: int
    n2: int
    sigma1_tilde: float
    sigma2_tilde: float
    q1a: float = 0.0
    q2a: float = 0.0
    alpha: complex = 1.0

    def __post_init__(self):
        if not (self.sigma1_tilde > 0 and self.sigma2_tilde > 0):
            raise StateError("Gaussian widths must be positive")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def first(self) -> GaussianParams:
        return GaussianParams(self.n1, self.sigma1_tilde, self.q1a)

    @property
    def second(self) -> GaussianParams:
        return GaussianParams(self.n2, self.sigma2_tilde, self.q2a)

    def swapped(self) -> "TwoGaussianParams":
        return TwoGaussianParams(self.n2, self.n1, self.sigma2_tilde, self.sigma1_tilde,
                                 self.q2a, self.q1a, self.alpha)


def two_gaussian_norm_squared(p: TwoGaussianParams, tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """``sum_n |g1(n) + alpha g2(n)|^2`` by direct summation over both windows."""
    h1 = gaussian_half_width(p.sigma1_tilde, tail_eps)
    h2 = gaussian_half_width(p.sigma2_tilde, tail_eps)
    n = np.arange(min(p.n1 - h1, p.n2 - h2), max(p.n1 + h1, p.n2 + h2) + 1)
    g1 = np.exp(-(n - p.n1) ** 2 / (2 * p.sigma1_tilde**2) + 1j * p.q1a * n)
    g2 = np.exp(-(n - p.n2) ** 2 / (2 * p.sigma2_tilde**2) + 1j * p.q2a * n)
    return math.fsum(np.abs(g1 + p.alpha * g2) ** 2)


def two_gaussian_state(p: TwoGaussianParams, a: float = 1.0,
                       tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """The state ``(g1 + alpha g2) / N`` built from unnormalized profiles."""
    amp1, lo1 = gaussian_profile(p.first, tail_eps)
    amp2, lo2 = gaussian_profile(p.second, tail_eps)
    lo = min(lo1, lo2)
    hi = max(lo1 + amp1.size, lo2 + amp2.size)
    amps = np.zeros(hi - lo, dtype=complex)
    amps[lo1 - lo:lo1 - lo + amp1.size] += amp1
    amps[lo2 - lo:lo2 - lo + amp2.size] += p.alpha * amp2
    norm2 = math.fsum(np.abs(amps) ** 2)
    return PureState(amps / math.sqrt(norm2), lo, a, truncation_eps=tail_eps)


def cross_row(p: TwoGaussianParams, m: int, k, norm2: float | None = None,
              tol: float = THETA_TOL) -> np.ndarray:
    """Crossed term multiplying ``alpha``: the ``g2(n) g1*(m-n)`` part of ``W``.

    ``(1 / 2pi N^2) e^{i(k - q1 a) m} e^{-n2^2/2s2^2 - (m-n1)^2/2s1^2}
    theta3(k - a(q1+q2)/2 + i(n2/2s2^2 + (m-n1)/2s1^2), e^{-(s1^2+s2^2)/2 s1^2 s2^2})``
    """
    if norm2 is None:
        norm2 = two_gaussian_norm_squared(p)
    s1sq, s2sq = p.sigma1_tilde**2, p.sigma2_tilde**2
    nome = math.exp(-(s1sq + s2sq) / (2.0 * s1sq * s2sq))
    k = np.asarray(k, dtype=float)
    z = k - 0.5 * (p.q1a + p.q2a) + 1j * (p.n2 / (2.0 * s2sq) + (m - p.n1) / (2.0 * s1sq))
    log_envelope = -p.n2**2 / (2.0 * s2sq) - (m - p.n1) ** 2 / (2.0 * s1sq)
    th = theta3(z, nome, tol, log_envelope).value
    return np.exp(1j * (k - p.q1a) * m) * th / (TWO_PI * norm2)


def oracle_two_gaussian_cross(p: TwoGaussianParams, pt: PhasePoint) -> complex:
    """Complex crossed term at one point; the ``alpha*`` term is the label swap."""
    return complex(cross_row(p, pt.m, np.array([pt.k]))[0])


def two_gaussian_row(p: TwoGaussianParams, m: int, k, tol: float = THETA_TOL) -> np.ndarray:
    """``W1 + |alpha|^2 W2 + alpha W12 + alpha* W21`` for the normalized superposition."""
    norm2 = two_gaussian_norm_squared(p)
    k = np.asarray(k, dtype=float)
    th1 = theta3(0.0, _nome(p.sigma1_tilde), tol).value.real
    th2 = theta3(0.0, _nome(p.sigma2_tilde), tol).value.real
    w1 = gaussian_row(p.first, m, k, tol) * th1 / norm2
    w2 = gaussian_row(p.second, m, k, tol) * th2 / norm2
    w12 = cross_row(p, m, k, norm2, tol)
    w21 = cross_row(p.swapped(), m, k, norm2, tol)
    a = p.alpha
    return _real_row(w1 + abs(a) ** 2 * w2 + a * w12 + a.conjugate() * w21)


def oracle_two_gaussian(p: TwoGaussianParams, pt: PhasePoint) -> float:
    return _point(two_gaussian_row, p, pt)


def two_gaussian_symmetric_row(n0: int, sigma_tilde: float, m: int, k,
                               tol: float = THETA_TOL) -> np.ndarray:
    """Even/odd-row closed form for ``g(n + n0) + g(n - n0)``, zero momenta.

    The ``e^{-n0^2/s^2} cosh(...)`` factors are rewritten as sums of two
    Gaussians so that narrow widths do not overflow.
    """
    s2 = sigma_tilde**2
    q = _nome(sigma_tilde)
    k = np.asarray(k, dtype=float)
    th0 = theta3(0.0, q, tol).value.real
    norm2 = 2.0 * (1.0 + math.exp(-n0**2 / s2)) * th0
    if m % 2 == 0:
        s = m // 2
        pair = 0.5 * (math.exp(-(s - n0) ** 2 / s2) + math.exp(-(s + n0) ** 2 / s2))
        bracket = pair + math.exp(-s * s / s2) * np.cos(2.0 * k * n0)
        val = theta3(k, q, tol).value * bracket / (math.pi * norm2)
        return _real_row(val)
    h = (m - 1) // 2 + 0.5
    pair = 0.5 * (math.exp(-(h - n0) ** 2 / s2) + math.exp(-(h + n0) ** 2 / s2))
    bracket = pair + math.exp(-h * h / s2) * np.cos(2.0 * k * n0)
    th = theta3(k + 1j / (2.0 * s2), q, tol).value
    val = np.exp(1j * k) * math.exp(-1.0 / (4.0 * s2)) * th * bracket / (math.pi * norm2)
    return _real_row(val)


def oracle_two_gaussian_symmetric(n0: int, sigma_tilde: float, pt: PhasePoint) -> float:
    return _point(two_gaussian_symmetric_row, n0, sigma_tilde, pt)


def oracle_grid(row_fn, *params, m_values, k_values) -> np.ndarray:
    """Stack ``row_fn(*params, m, k_values)`` over ``m_values``."""
    return np.vstack([row_fn(*params, int(m), k_values) for m in m_values])


__all__ = [
    "TwoGaussianParams", "delta_row", "oracle_delta", "two_delta_row", "oracle_two_delta",
    "oracle_eta_two_delta", "gaussian_row", "oracle_gaussian", "two_gaussian_norm_squared",
    "two_gaussian_state", "cross_row", "oracle_two_gaussian_cross", "two_gaussian_row", "oracle_two_gaussian",
    "two_gaussian_symmetric_row", "oracle_two_gaussian_symmetric", "oracle_grid",
]
