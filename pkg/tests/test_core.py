import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from latticewigner import core
from latticewigner.core import PhasePoint, WignerGrid, wigner_grid
from latticewigner.errors import AxisMismatchError, ImaginaryResidueError, NyquistError
from latticewigner.states import (DensityOperator, GaussianParams, make_delta, make_gaussian,
                                  momentum_density, random_density, random_pure_state,
                                  superpose, to_density)

seeds = st.integers(0, 2**32 - 1)


def _phase_error(grid):
    half = grid.n_k // 2
    sign = np.where(grid.m_values % 2, -1.0, 1.0)[:, None]
    return np.max(np.abs(np.roll(grid.values, -half, axis=1) - sign * grid.values))


# -- axes and Nyquist ---------------------------------------------------------

def test_canonical_k():
    assert core.canonical_k(math.pi) == pytest.approx(-math.pi)
    assert core.canonical_k(-math.pi) == -math.pi
    assert PhasePoint(2, 3 * math.pi).k == pytest.approx(-math.pi)


def test_k_nodes():
    k = core.k_nodes(8)
    assert k[0] == -math.pi
    assert np.allclose(np.diff(k), math.pi / 4)


@pytest.mark.parametrize("n_k", [2, 7, 10])
def test_nyquist_rejected(n_k):
    with pytest.raises(NyquistError):
        wigner_grid(superpose([make_delta(0), make_delta(4)], [1, 1]), n_k)


def test_nyquist_bound_accepted():
    s = superpose([make_delta(0), make_delta(4)], [1, 1])
    assert wigner_grid(s, core.nyquist_bound(5)).n_k == 12


# -- point evaluation -------------------------------------------------------

def test_delta_grid():
    grid = wigner_grid(make_delta(0), 16)
    assert list(grid.m_values) == [0]
    assert np.allclose(grid.values, 1 / (2 * math.pi), atol=0)


def test_point_matches_grid_and_outside_zero():
    rng = np.random.default_rng(3)
    s = random_pure_state(rng, 5, n_min=-2)
    grid = wigner_grid(s, 32)
    for m in (-4, -1, 0, 3, 4):
        j = 11
        assert core.wigner_point(s, PhasePoint(m, grid.k_values[j])) == pytest.approx(
            grid.row(m)[j], abs=1e-15)
    assert core.wigner_point(s, PhasePoint(9, 0.3)) == 0.0
    assert np.all(grid.row(-7) == 0)


def test_point_rejects_non_hermitian():
    mat = np.array([[0.5, 1.0], [0.0, 0.5]])
    with pytest.raises(ImaginaryResidueError):
        core._audit_real(core.wigner_value(mat, 1, 0.3))


def test_phase_point_action():
    rng = np.random.default_rng(4)
    s = random_pure_state(rng, 4, n_min=1)
    for m, k in [(2, 0.1), (5, -1.2), (7, 2.9)]:
        p = PhasePoint(m, k)
        val = core.inner_product(s, core.apply_phase_point(s, p))
        assert val.real == pytest.approx(core.wigner_point(s, p), abs=1e-15)
        assert abs(val.imag) < 1e-15


@pytest.mark.parametrize("backend", ["python", "cython"])
def test_direct_matches_dft(backend):
    rho = random_density(np.random.default_rng(5), 6, n_min=-3)
    a = wigner_grid(rho, 64)
    b = wigner_grid(rho, 64, method="direct", backend=backend)
    assert np.max(np.abs(a.values - b.values)) < 1e-14


def test_unknown_method():
    with pytest.raises(ValueError):
        wigner_grid(make_delta(0), 8, method="nope")


# -- identities ---------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 12), st.integers(-5, 5))
def test_identities_pure(seed, size, n_min):
    s = random_pure_state(np.random.default_rng(seed), size, n_min)
    grid = wigner_grid(s, 2 * core.nyquist_bound(size))
    assert core.total_integral(grid) == pytest.approx(1.0, abs=1e-12)
    assert _phase_error(grid) < 1e-13
    mom = np.array([core.momentum_marginal(grid, j) for j in range(grid.n_k)])
    assert np.max(np.abs(mom - momentum_density(s, grid.k_values))) < 1e-13
    for m in grid.m_values:
        expect = abs(s.amplitude(m // 2)) ** 2 if m % 2 == 0 else 0.0
        assert core.position_marginal(grid, m) == pytest.approx(expect, abs=1e-13)
    assert core.overlap(grid, grid) == pytest.approx(1.0, abs=1e-12)
    mat, lo = core.reconstruct_matrix(grid)
    assert lo == n_min
    assert np.max(np.abs(mat - to_density(s).matrix)) < 1e-13


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 6))
def test_overlap_of_mixed_states(seed, size):
    rng = np.random.default_rng(seed)
    r1 = random_density(rng, size)
    r2 = random_density(rng, size)
    g1, g2 = wigner_grid(r1, 32), wigner_grid(r2, 32)
    expect = np.trace(r1.matrix @ r2.matrix).real
    assert core.overlap(g1, g2) == pytest.approx(expect, abs=1e-13)


def test_overlap_axis_mismatch():
    g1 = wigner_grid(make_delta(0), 8)
    g2 = wigner_grid(make_delta(1), 8)
    with pytest.raises(AxisMismatchError):
        core.overlap(g1, g2)


def test_reconstruct_density_validated():
    rho = random_density(np.random.default_rng(8), 3, n_min=2)
    back = core.reconstruct_density(wigner_grid(rho, 16))
    assert isinstance(back, DensityOperator)
    assert back.n_min == 2
    assert np.allclose(back.matrix, rho.matrix, atol=1e-14)


def test_reconstruct_needs_full_window():
    grid = WignerGrid(1, np.zeros((3, 8)))
    with pytest.raises(ValueError):
        core.reconstruct_matrix(grid)


def test_marginals_are_deterministic():
    s = make_gaussian(GaussianParams(2, 1.5, 0.4))
    g = wigner_grid(s, 256)
    a = [core.momentum_marginal(g, j) for j in range(g.n_k)]
    b = [core.momentum_marginal(g, j) for j in range(g.n_k)]
    assert a == b


# -- product ----------------------------------------------------------------

@pytest.mark.parametrize("backend", ["python", "cython"])
def test_product_of_pure_state_is_idempotent(backend):
    s = random_pure_state(np.random.default_rng(9), 4)
    n_k = core.product_nyquist_bound(4)
    g = wigner_grid(s, n_k)
    prod = core.wigner_of_product(g, g, backend)
    assert np.max(np.abs(prod.values - g.values)) < 1e-12


def test_product_order():
    rng = np.random.default_rng(10)
    r1, r2 = random_density(rng, 3), random_density(rng, 3)
    n_k = core.product_nyquist_bound(3)
    prod = core.wigner_of_product(wigner_grid(r1, n_k), wigner_grid(r2, n_k))
    ref = core.wigner_grid_complex(r2.matrix @ r1.matrix, n_k)
    assert np.max(np.abs(prod.values - ref.values)) < 1e-13


def test_product_guards():
    s = random_pure_state(np.random.default_rng(11), 6)
    g = wigner_grid(s, core.nyquist_bound(6))
    assert core.product_nyquist_bound(6) > g.n_k
    with pytest.raises(NyquistError):
        core.wigner_of_product(g, g)
    big = wigner_grid(random_pure_state(np.random.default_rng(12), 40), 128)
    with pytest.raises(ValueError):
        core.wigner_of_product(big, big)


# -- continuum and naive discretization ---------------------------------------

def test_continuum_reference_normalized():
    # the peak value of a minimum-uncertainty packet is 1/pi
    assert core.continuum_gaussian_reference(0.0, 0.0) == pytest.approx(1 / math.pi)
    total, _ = integrate.dblquad(
        lambda p, x: core.continuum_gaussian_reference(x, p, 0.3, 1.2, -0.4),
        -12, 12, -12, 12)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_continuum_deviation_shrinks():
    devs = []
    for a in (1.0, 0.5, 0.25):
        sigma_tilde = 1.0 / a
        s = make_gaussian(GaussianParams(0, sigma_tilde), a)
        devs.append(core.continuum_deviation(wigner_grid(s, 512), sigma=1.0))
    assert devs[0] > 10 * devs[1] > 100 * devs[2]


def test_direct_discretization_has_period_pi():
    s = random_pure_state(np.random.default_rng(13), 5, -2)
    for n in range(-2, 3):
        for k in (-2.0, 0.3, 1.1):
            assert core.wigner_direct(s, PhasePoint(n, k + math.pi)) == pytest.approx(
                core.wigner_direct(s, PhasePoint(n, k)), abs=1e-14)
            assert core.wigner_direct(s, PhasePoint(n, k)) == pytest.approx(
                core.wigner_point(s, PhasePoint(2 * n, k)), abs=1e-14)


@pytest.mark.parametrize("a", [1.0, 0.5])
def test_aliased_marginal_constant(a):
    s = random_pure_state(np.random.default_rng(14), 6, spacing=a)
    fit = core.aliased_marginal_fit(s, np.linspace(-3, 3, 25))
    assert fit.constant == pytest.approx(1 / (2 * a), rel=1e-12)
    assert fit.residual < 1e-12
