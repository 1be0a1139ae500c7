"""Lattice states: localized, discretized Gaussian and their superpositions.

A state lives on a finite window ``[n_min, n_max]`` of lattice sites with
spacing ``a``; amplitudes outside the window are zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import StateError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10
DEFAULT_TAIL_EPS = 1e-16


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _check_spacing(spacing: float) -> float:
    spacing = float(spacing)
    if not (spacing > 0.0 and math.isfinite(spacing)):
        raise StateError(f"lattice spacing must be positive and finite, got {spacing!r}")
    return spacing


@dataclass(frozen=True)
class PureState:
    """Normalized amplitudes ``psi(n)`` for ``n`` in ``[n_min, n_max]``.

    ``truncation_eps`` records the tail cutoff used when the state was cut
    out of an infinite-support profile (``None`` for exact finite states).
    """

    amplitudes: np.ndarray
    n_min: int = 0
    spacing: float = 1.0
    truncation_eps: float | None = field(default=None, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise StateError("amplitudes must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(amps)):
            raise StateError("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized: sum |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "n_min", int(self.n_min))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def n_max(self) -> int:
        return self.n_min + self.amplitudes.size - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def __len__(self) -> int:
        return self.amplitudes.size

    def amplitude(self, n: int) -> complex:
        if self.n_min <= n <= self.n_max:
            return complex(self.amplitudes[n - self.n_min])
        return 0j

    def padded(self, n_min: int, n_max: int) -> "PureState":
        """The same state represented on the larger window ``[n_min, n_max]``."""
        if n_min > self.n_min or n_max < self.n_max:
            raise StateError(
                f"window [{n_min}, {n_max}] does not contain [{self.n_min}, {self.n_max}]"
            )
        amps = np.zeros(n_max - n_min + 1, dtype=complex)
        amps[self.n_min - n_min:self.n_max - n_min + 1] = self.amplitudes
        return PureState(amps, n_min, self.spacing, self.truncation_eps)

    def translated(self, shift: int) -> "PureState":
        return PureState(self.amplitudes, self.n_min + int(shift), self.spacing,
                         self.truncation_eps)


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix ``rho[n1 - n_min, n2 - n_min] = <n1|rho|n2>``."""

    matrix: np.ndarray
    n_min: int = 0
    spacing: float = 1.0

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise StateError("density matrix must be square and non-empty")
        if not np.all(np.isfinite(mat)):
            raise StateError("density matrix must be finite")
        herm_err = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_err > HERMITIAN_TOL:
            raise StateError(f"density matrix is not Hermitian (max deviation {herm_err:.3e})")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix trace is {trace!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
        if lowest < -EIGEN_TOL:
            raise StateError(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", _frozen(mat))
        object.__setattr__(self, "n_min", int(self.n_min))
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_max(self) -> int:
        return self.n_min + self.size - 1

    def element(self, n1: int, n2: int) -> complex:
        lo, hi = self.n_min, self.n_max
        if lo <= n1 <= hi and lo <= n2 <= hi:
            return complex(self.matrix[n1 - lo, n2 - lo])
        return 0j

    def padded(self, n_min: int, n_max: int) -> "DensityOperator":
        if n_min > self.n_min or n_max < self.n_max:
            raise StateError(
                f"window [{n_min}, {n_max}] does not contain [{self.n_min}, {self.n_max}]"
            )
        size = n_max - n_min + 1
        mat = np.zeros((size, size), dtype=complex)
        lo = self.n_min - n_min
        mat[lo:lo + self.size, lo:lo + self.size] = self.matrix
        return DensityOperator(mat, n_min, self.spacing)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class GaussianParams:
    """Center ``n0``, width ``sigma_tilde`` (in sites) and phase per site ``q0a``."""

    n0: int
    sigma_tilde: float
    q0a: float = 0.0

    def __post_init__(self):
        if not (self.sigma_tilde > 0.0 and math.isfinite(self.sigma_tilde)):
            raise StateError(f"sigma_tilde must be positive, got {self.sigma_tilde!r}")
        if not math.isfinite(self.q0a):
            raise StateError("q0a must be finite")
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "sigma_tilde", float(self.sigma_tilde))
        object.__setattr__(self, "q0a", float(self.q0a))


def make_delta(n0: int, a: float = 1.0) -> PureState:
    """Particle localized on site ``n0``."""
    return PureState(np.ones(1, dtype=complex), int(n0), a)


def gaussian_half_width(sigma_tilde: float, tail_eps: float) -> int:
    """Half-width of the window outside which the Gaussian profile is below ``tail_eps``."""
    return int(math.ceil(sigma_tilde * math.sqrt(2.0 * math.log(1.0 / tail_eps))))


def gaussian_profile(p: GaussianParams, tail_eps: float = DEFAULT_TAIL_EPS):
    """Unnormalized amplitudes ``exp(-(n-n0)^2 / 2 s^2) exp(i q0a n)`` and the window start."""
    if not 0.0 < tail_eps < 1.0:
        raise StateError(f"tail_eps must lie in (0, 1), got {tail_eps!r}")
    half = gaussian_half_width(p.sigma_tilde, tail_eps)
    sites = np.arange(p.n0 - half, p.n0 + half + 1)
    offset = (sites - p.n0).astype(float)
    amps = np.exp(-offset**2 / (2.0 * p.sigma_tilde**2)) * np.exp(1j * p.q0a * sites)
    return amps, p.n0 - half


def make_gaussian(p: GaussianParams, a: float = 1.0,
                  tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Discretized Gaussian truncated where its amplitude falls below ``tail_eps``.

    The truncated profile is renormalized, so the state is exactly normalized
    while its squared norm before renormalization approximates
    ``theta3(0, exp(-1/sigma_tilde**2))``.
    """
    amps, n_start = gaussian_profile(p, tail_eps)
    amps = amps / math.sqrt(math.fsum(np.abs(amps) ** 2))
    return PureState(amps, n_start, a, truncation_eps=tail_eps)


def superpose(states: Sequence[PureState], coeffs: Sequence[complex]) -> PureState:
    """Normalized ``sum_i c_i psi_i`` on the union of the input windows."""
    if len(states) == 0 or len(states) != len(coeffs):
        raise StateError("need one coefficient per state and at least one state")
    spacing = states[0].spacing
    if any(s.spacing != spacing for s in states):
        raise StateError("all states must share the same lattice spacing")
    lo = min(s.n_min for s in states)
    hi = max(s.n_max for s in states)
    amps = np.zeros(hi - lo + 1, dtype=complex)
    for s, c in zip(states, coeffs):
        amps[s.n_min - lo:s.n_max - lo + 1] += complex(c) * s.amplitudes
    norm2 = math.fsum(np.abs(amps) ** 2)
    if norm2 <= 1e-28:
        raise StateError("superposition cancels to the zero vector")
    eps = [s.truncation_eps for s in states if s.truncation_eps is not None]
    return PureState(amps / math.sqrt(norm2), lo, spacing, max(eps) if eps else None)


def to_density(state: PureState) -> DensityOperator:
    """Rank-one projector ``|psi><psi|`` on the state's window."""
    psi = state.amplitudes
    return DensityOperator(np.outer(psi, psi.conj()), state.n_min, state.spacing)


def as_density(obj) -> DensityOperator:
    if isinstance(obj, DensityOperator):
        return obj
    if isinstance(obj, PureState):
        return to_density(obj)
    raise TypeError(f"expected PureState or DensityOperator, got {type(obj).__name__}")


def momentum_amplitude(state: PureState, kappa: float) -> complex:
    """Quasi-momentum amplitude ``<q = kappa/a | psi>``."""
    phases = np.exp(-1j * kappa * state.sites)
    return complex(math.sqrt(state.spacing / (2.0 * math.pi)) * np.sum(phases * state.amplitudes))


def momentum_density(rho: DensityOperator | PureState, kappa) -> np.ndarray | float:
    """Density per unit ``k``: ``(1/a) <kappa/a|rho|kappa/a>``.

    Accepts an array of ``kappa`` values.
    """
    rho = as_density(rho)
    sites = np.arange(rho.n_min, rho.n_max + 1)
    kap = np.atleast_1d(np.asarray(kappa, dtype=float))
    vec = np.exp(-1j * np.outer(kap, sites))
    val = np.einsum("ki,ij,kj->k", vec, rho.matrix, vec.conj()).real / (2.0 * math.pi)
    return float(val[0]) if np.ndim(kappa) == 0 else val


def random_pure_state(rng: np.random.Generator, size: int, n_min: int = 0,
                      spacing: float = 1.0) -> PureState:
    """Haar-like random state on ``size`` consecutive sites."""
    z = rng.normal(size=size) + 1j * rng.normal(size=size)
    return PureState(z / np.linalg.norm(z), n_min, spacing)


def random_density(rng: np.random.Generator, size: int, rank: int | None = None,
                   n_min: int = 0, spacing: float = 1.0) -> DensityOperator:
    """Random mixed state ``G G^dagger / tr`` with ``G`` of shape ``(size, rank)``."""
    rank = size if rank is None else rank
    g = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(rho / np.trace(rho).real, n_min, spacing)
