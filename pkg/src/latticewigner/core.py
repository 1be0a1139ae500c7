"""Wigner function on the hybrid lattice phase space.

Phase-space points carry an integer label ``m`` and a periodic label
``k`` in ``[-pi, pi)``.  For a density operator on sites ``[n_min, n_max]``

    W(m, k) = (1/2pi) sum_n <n|rho|m-n> exp(-i (2n - m) k),

which vanishes unless ``2 n_min <= m <= 2 n_max``.  For fixed ``m`` it is a
trigonometric polynomial in ``k`` of degree below the window size ``L``, so
a uniform grid of ``N_k >= 2L + 2`` nodes integrates every product of two
rows exactly.  All sums over phase space use ``math.fsum`` so reductions
are exact-rounded and independent of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (AxisMismatchError, ImaginaryResidueError, NyquistError,
                     StateError)
from .states import DensityOperator, PureState, as_density

TWO_PI = 2.0 * math.pi
DEFAULT_NK = 4096
IMAG_TOL = 1e-10
PRODUCT_MAX_CELLS = 1024


def canonical_k(k):
    """Map ``k`` into ``[-pi, pi)``."""
    out = np.mod(np.asarray(k, dtype=float) + math.pi, TWO_PI) - math.pi
    return float(out) if np.ndim(k) == 0 else out


def k_nodes(n_k: int) -> np.ndarray:
    """Uniform nodes ``k_j = -pi + 2 pi j / N_k``."""
    return -math.pi + TWO_PI * np.arange(n_k) / n_k


@dataclass(frozen=True)
class PhasePoint:
    m: int
    k: float

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "k", canonical_k(float(self.k)))


def nyquist_bound(window_size: int) -> int:
    """Smallest ``N_k`` accepted for a window of ``window_size`` sites."""
    return 2 * int(window_size) + 2


def check_nk(n_k: int, window_size: int) -> int:
    n_k = int(n_k)
    if n_k < 4 or n_k % 2:
        raise NyquistError(f"N_k must be even and >= 4, got {n_k}")
    bound = nyquist_bound(window_size)
    if n_k < bound:
        raise NyquistError(
            f"N_k={n_k} is below the Nyquist bound {bound} for a {window_size}-site window"
        )
    return n_k


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WignerGrid:
    """Real ``W(m, k_j)`` on rows ``m = m_start .. m_start + M - 1``.

    Rows outside the stored range are zero.  ``max_imag_residue`` is the
    largest imaginary part discarded when the grid was built.
    """

    m_start: int
    values: np.ndarray
    spacing: float = 1.0
    max_imag_residue: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] == 0 or vals.shape[1] < 2:
            raise ValueError("values must be a non-empty (rows, N_k) array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "m_start", int(self.m_start))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def n_k(self) -> int:
        return self.values.shape[1]

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.m_start, self.m_start + self.values.shape[0])

    @property
    def k_values(self) -> np.ndarray:
        return k_nodes(self.n_k)

    @property
    def dk(self) -> float:
        return TWO_PI / self.n_k

    @property
    def window_size(self) -> int:
        """Number of lattice sites the rows can describe."""
        return (self.values.shape[0] + 2) // 2

    def row(self, m: int) -> np.ndarray:
        r = int(m) - self.m_start
        if 0 <= r < self.values.shape[0]:
            return self.values[r]
        return np.zeros(self.n_k)

    def same_axes(self, other) -> bool:
        return (self.m_start == other.m_start and self.values.shape == other.values.shape
                and self.spacing == other.spacing)


@dataclass(frozen=True)
class ComplexGrid:
    """Complex-valued counterpart of :class:`WignerGrid` (non-Hermitian operators)."""

    m_start: int
    values: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=complex)))

    @property
    def n_k(self) -> int:
        return self.values.shape[1]

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.m_start, self.m_start + self.values.shape[0])

    @property
    def k_values(self) -> np.ndarray:
        return k_nodes(self.n_k)


def _operator_matrix(op, n_min: int = 0):
    if isinstance(op, (PureState, DensityOperator)):
        rho = as_density(op)
        return rho.matrix, rho.n_min
    return np.asarray(op, dtype=complex), int(n_min)


def wigner_value(op, m: int, k: float, n_min: int = 0) -> complex:
    """``tr(op A(m, k))`` for any operator, Hermitian or not.

    ``op`` is a state, a density operator, or a bare matrix on sites
    starting at ``n_min``.
    """
    mat, lo = _operator_matrix(op, n_min)
    size = mat.shape[0]
    m = int(m)
    i = np.arange(max(0, m - 2 * lo - size + 1), min(size - 1, m - 2 * lo) + 1)
    if i.size == 0:
        return 0j
    n = lo + i
    terms = mat[i, m - n - lo] * np.exp(-1j * (2 * n - m) * k)
    return complex(np.sum(terms)) / TWO_PI


def _audit_real(value: complex) -> float:
    if abs(value.imag) >= IMAG_TOL * (1.0 + abs(value.real)):
        raise ImaginaryResidueError(
            f"imaginary residue {value.imag:.3e} exceeds tolerance; operator is not Hermitian"
        )
    return value.real


def wigner_point(rho, p: PhasePoint) -> float:
    """Real value ``W(m, k)`` at a single phase-space point."""
    return _audit_real(wigner_value(rho, p.m, p.k))


def _dft_rows(mat: np.ndarray, n_k: int) -> np.ndarray:
    size = mat.shape[0]
    i, i2 = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    rows = (i + i2).ravel()
    freq = (i - i2).ravel()
    coeff = np.zeros((2 * size - 1, n_k), dtype=complex)
    # exp(-i f k_j) = (-1)^f exp(-2 pi i f j / N)
    coeff[rows, np.mod(freq, n_k)] = mat.ravel() * np.where(freq % 2, -1.0, 1.0)
    return np.fft.fft(coeff, axis=1) / TWO_PI


def wigner_grid_complex(op, n_k: int = DEFAULT_NK, n_min: int = 0,
                        method: str = "dft", backend: str | None = None) -> ComplexGrid:
    """Grid of ``tr(op A(m, k_j))`` without the reality audit."""
    mat, lo = _operator_matrix(op, n_min)
    spacing = op.spacing if isinstance(op, (PureState, DensityOperator)) else 1.0
    check_nk(n_k, mat.shape[0])
    if method == "dft":
        vals = _dft_rows(mat, n_k)
    elif method == "direct":
        vals = kernels.direct_grid(mat, n_k, backend)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ComplexGrid(2 * lo, vals, spacing)


def wigner_grid(rho, n_k: int = DEFAULT_NK, method: str = "dft",
                backend: str | None = None) -> WignerGrid:
    """Sample ``W`` on every supported row and ``N_k`` uniform ``k`` nodes.

    ``method="dft"`` places the anti-diagonals of ``rho`` in a length-``N_k``
    FFT; ``method="direct"`` sums over sites explicitly.  Both are exact up
    to roundoff once ``N_k`` clears the Nyquist bound.

    Raises
    ------
    NyquistError
        If ``n_k`` is odd, below 4, or below ``2 L + 2``.
    ImaginaryResidueError
        If any sample has an imaginary part above ``1e-10``.
    """
    rho = as_density(rho)
    cgrid = wigner_grid_complex(rho, n_k, method=method, backend=backend)
    residue = float(np.max(np.abs(cgrid.values.imag)))
    if residue >= IMAG_TOL:
        raise ImaginaryResidueError(f"grid imaginary residue {residue:.3e} >= {IMAG_TOL}")
    return WignerGrid(cgrid.m_start, cgrid.values.real, rho.spacing, residue)


class LatticeAmplitudes(NamedTuple):
    """Unnormalized amplitudes on sites ``n_min .. n_min + len(values) - 1``."""

    n_min: int
    values: np.ndarray


def apply_phase_point(psi: PureState, p: PhasePoint) -> LatticeAmplitudes:
    """``A(m, k) psi``: ``(A psi)(n') = exp(-i (m - 2n') k) psi(m - n') / 2pi``."""
    start = p.m - psi.n_max
    n_prime = np.arange(start, p.m - psi.n_min + 1)
    source = psi.amplitudes[(p.m - n_prime) - psi.n_min]
    vals = np.exp(-1j * (p.m - 2 * n_prime) * p.k) * source / TWO_PI
    return LatticeAmplitudes(int(start), vals)


def inner_product(psi: PureState, amps: LatticeAmplitudes) -> complex:
    """``<psi|phi>`` for amplitudes on an arbitrary window."""
    lo = max(psi.n_min, amps.n_min)
    hi = min(psi.n_max, amps.n_min + len(amps.values) - 1)
    if hi < lo:
        return 0j
    a = psi.amplitudes[lo - psi.n_min:hi - psi.n_min + 1]
    b = amps.values[lo - amps.n_min:hi - amps.n_min + 1]
    return complex(np.vdot(a, b))


def _fsum(arr) -> float:
    return math.fsum(np.ravel(arr).tolist())


def momentum_marginal(grid: WignerGrid, j: int) -> float:
    """``sum_m W(m, k_j)``, the quasi-momentum density per unit ``k``."""
    return _fsum(grid.values[:, int(j)])


def position_marginal(grid: WignerGrid, m: int) -> float:
    """``int dk W(m, k)``: the population of site ``m/2`` for even ``m``, zero for odd."""
    check_nk(grid.n_k, grid.window_size)
    return grid.dk * _fsum(grid.row(m))


def total_integral(grid: WignerGrid) -> float:
    """``sum_m int dk W``; equals the trace of the operator."""
    return grid.dk * _fsum(grid.values)


def _require_same_axes(g1, g2):
    if not g1.same_axes(g2):
        raise AxisMismatchError(
            "grids differ in rows, N_k or spacing: "
            f"({g1.m_start}, {g1.values.shape}, {g1.spacing}) vs "
            f"({g2.m_start}, {g2.values.shape}, {g2.spacing})"
        )


def overlap(g1: WignerGrid, g2: WignerGrid) -> float:
    """``2 pi sum_m int dk W1 W2 = tr(rho1 rho2)``."""
    _require_same_axes(g1, g2)
    return TWO_PI * g1.dk * _fsum(g1.values * g2.values)


def reconstruct_matrix(grid: WignerGrid) -> tuple[np.ndarray, int]:
    """Raw ``rho[n1, n2] = int dk W(n1 + n2, k) exp(i (n1 - n2) k)``, unvalidated."""
    check_nk(grid.n_k, grid.window_size)
    if grid.m_start % 2 or grid.values.shape[0] % 2 == 0:
        raise ValueError("grid rows must span [2 n_min, 2 n_max]")
    size = grid.window_size
    spectra = np.fft.ifft(grid.values, axis=1)
    i, i2 = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    d = i - i2
    mat = TWO_PI * np.where(d % 2, -1.0, 1.0) * spectra[i + i2, np.mod(d, grid.n_k)]
    return mat, grid.m_start // 2


def reconstruct_density(grid: WignerGrid) -> DensityOperator:
    """Density operator recovered from its Wigner grid (validated)."""
    mat, n_min = reconstruct_matrix(grid)
    return DensityOperator(mat, n_min, grid.spacing)


def product_nyquist_bound(window_size: int) -> int:
    """``N_k`` needed for the star-product quadrature to be exact."""
    bound = max(nyquist_bound(window_size), 3 * (window_size - 1) + 1)
    return bound + (bound % 2)


def wigner_of_product(g1: WignerGrid, g2: WignerGrid, backend: str | None = None,
                      max_cells: int = PRODUCT_MAX_CELLS) -> ComplexGrid:
    """Wigner function of ``rho2 rho1`` from the grids of ``rho1`` and ``rho2``.

    Evaluates the phase-space product integral

        (1/2pi) sum_{m1,m2} int dk1 dk2 W1(m+m1, k+k1) W2(m+m2, k+k2)
                exp(i (m2 k1 - m1 k2))

    by uniform quadrature, with ``k + k1`` wrapped onto the grid through the
    ``2 pi`` periodicity.  Cost grows like ``rows**2 * N_k**3``; grids with
    more than ``max_cells`` samples are refused.
    """
    _require_same_axes(g1, g2)
    cells = g1.values.size
    if cells > max_cells:
        raise ValueError(f"grid has {cells} cells; product is limited to {max_cells}")
    bound = product_nyquist_bound(g1.window_size)
    if g1.n_k < bound:
        raise NyquistError(f"product quadrature needs N_k >= {bound}, got {g1.n_k}")
    vals = kernels.product_grid(g1.values, g2.values, backend)
    return ComplexGrid(g1.m_start, vals, g1.spacing)


def continuum_gaussian_reference(x, p, x0: float = 0.0, sigma: float = 1.0,
                                 q0: float = 0.0):
    """Continuum Wigner function of a Gaussian wave packet.

    ``(1/pi) exp(-(x-x0)^2/sigma^2) exp(-sigma^2 (p-q0)^2)``
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    val = np.exp(-((x - x0) ** 2) / sigma**2 - sigma**2 * (p - q0) ** 2) / math.pi
    return float(val) if val.ndim == 0 else val


def regular_image_mask(grid: WignerGrid, q0a: float = 0.0) -> np.ndarray:
    """Columns within a quarter period of the packet momentum ``q0 a``."""
    return np.abs(canonical_k(grid.k_values - q0a)) < math.pi / 2


def continuum_deviation(grid: WignerGrid, x0: float = 0.0, sigma: float = 1.0,
                        q0: float = 0.0) -> float:
    """Max of ``|2 W(m, k) - W_c(m a / 2, k / a)|`` over the regular image."""
    a = grid.spacing
    cols = regular_image_mask(grid, q0 * a)
    x = grid.m_values[:, None] * a / 2.0
    p = grid.k_values[None, cols] / a
    ref = continuum_gaussian_reference(x, p, x0, sigma, q0)
    return float(np.max(np.abs(2.0 * grid.values[:, cols] - ref)))


def wigner_direct_value(rho, n: int, k: float) -> complex:
    """Naively discretized Wigner function ``tr(rho A_direct(n, k))``.

    ``A_direct(n, k) = (1/2pi) sum_n' |2n - n'><n'| exp(-i (2n' - 2n) k)``
    has period ``pi`` in ``k``.
    """
    rho = as_density(rho)
    size, lo = rho.size, rho.n_min
    n_prime = np.arange(lo, lo + size)
    partner = 2 * int(n) - n_prime
    ok = (partner >= lo) & (partner < lo + size)
    terms = rho.matrix[n_prime[ok] - lo, partner[ok] - lo] * np.exp(
        -1j * (2 * n_prime[ok] - 2 * int(n)) * k)
    return complex(np.sum(terms)) / TWO_PI


def wigner_direct(rho, p: PhasePoint) -> float:
    return _audit_real(wigner_direct_value(rho, p.m, p.k))


class AliasFit(NamedTuple):
    constant: float
    residual: float


def aliased_marginal_fit(rho, k_values) -> AliasFit:
    """Fit ``sum_n W_direct(n, k) = c [D(k) + D(k + pi)]``.

    ``D(k) = <k/a|rho|k/a>`` is the quasi-momentum density.  Returns the
    least-squares constant and the max absolute residual over ``k_values``.
    """
    from .states import momentum_density

    rho = as_density(rho)
    k_values = np.asarray(k_values, dtype=float)
    sites = range(rho.n_min, rho.n_max + 1)
    lhs = np.array([math.fsum(wigner_direct(rho, PhasePoint(n, k)) for n in sites)
                    for k in k_values])
    # momentum_density is (1/a)<q|rho|q>
    a = rho.spacing
    rhs = a * (momentum_density(rho, k_values) + momentum_density(rho, k_values + math.pi))
    c = float(np.dot(lhs, rhs) / np.dot(rhs, rhs))
    return AliasFit(c, float(np.max(np.abs(lhs - c * rhs))))
