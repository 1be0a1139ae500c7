"""Worked examples with exact or closed-form values."""
import math

import numpy as np
import pytest

from latticewigner import core, negativity, oracles
from latticewigner.core import PhasePoint, wigner_grid
from latticewigner.states import (GaussianParams, make_delta, make_gaussian, superpose,
                                  to_density)

INV_2PI = 1 / (2 * math.pi)


def test_delta_amplitude():
    assert make_delta(4).amplitude(4) == 1.0


def test_displaced_gaussian_phases():
    still = make_gaussian(GaussianParams(0, 2.0, 0.0))
    moving = make_gaussian(GaussianParams(0, 2.0, math.pi / 3))
    assert np.allclose(np.abs(moving.amplitudes), np.abs(still.amplitudes), atol=0)
    assert np.allclose(moving.amplitudes, still.amplitudes * np.exp(1j * math.pi / 3 * still.sites))


def test_equal_superposition_amplitudes():
    s = superpose([make_delta(0), make_delta(1)], [1, 1])
    assert s.amplitude(0) == pytest.approx(1 / math.sqrt(2))
    assert s.amplitude(1) == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize("m,k,expected", [(0, 0.4, INV_2PI), (0, -2.0, INV_2PI), (1, 0.4, 0.0)])
def test_delta_point_values(m, k, expected):
    assert core.wigner_point(make_delta(0), PhasePoint(m, k)) == pytest.approx(expected)


def test_adjacent_pair_point_value():
    s = superpose([make_delta(0), make_delta(1)], [1, 1])
    assert core.wigner_point(s, PhasePoint(1, 0.0)) == pytest.approx(INV_2PI)
    assert core.wigner_point(s, PhasePoint(1, math.pi)) == pytest.approx(-INV_2PI)


def test_delta_grid_rows():
    grid = wigner_grid(to_density(make_delta(0)).padded(-2, 2), 64)
    for m, row in zip(grid.m_values, grid.values):
        assert np.allclose(row, INV_2PI if m == 0 else 0.0, atol=1e-17)
    assert core.position_marginal(grid, 0) == pytest.approx(1.0)


@pytest.mark.parametrize("pt", [PhasePoint(0, 1.3), PhasePoint(1, 0.0)])
def test_delta_oracle_points(pt):
    assert oracles.oracle_delta(0, pt) == (INV_2PI if pt.m == 0 else 0.0)


def test_translated_delta_oracle():
    assert oracles.oracle_delta(4, PhasePoint(8, -math.pi / 2)) == INV_2PI


def test_gaussian_grid_matches_oracle():
    p = GaussianParams(0, 2.0)
    grid = wigner_grid(make_gaussian(p), 256)
    ref = oracles.oracle_grid(oracles.gaussian_row, p, m_values=grid.m_values,
                              k_values=grid.k_values)
    assert np.max(np.abs(grid.values - ref)) < 1e-10


def test_gaussian_peak_matches_continuum():
    w = oracles.oracle_gaussian(GaussianParams(0, 2.0), PhasePoint(0, 0.0))
    assert 2 * w == pytest.approx(core.continuum_gaussian_reference(0.0, 0.0))


def test_displaced_oracle_is_shifted():
    k = np.linspace(-3, 3, 13)
    for m in (-3, 0, 2):
        moved = oracles.gaussian_row(GaussianParams(0, 2.0, math.pi / 3), m, k)
        base = oracles.gaussian_row(GaussianParams(0, 2.0, 0.0), m, k - math.pi / 3)
        assert np.allclose(moved, base, atol=1e-15)


def test_filtered_gaussian_nonnegative():
    grid = wigner_grid(make_gaussian(GaussianParams(0, 2.0)), 512)
    assert np.min(negativity.sign_filter(grid).values) >= -1e-12


@pytest.mark.parametrize("n1,n2", [(-4, 4), (0, 3), (2, 9)])
def test_two_delta_filter_is_identity(n1, n2):
    grid = wigner_grid(superpose([make_delta(n1), make_delta(n2)], [1, 1]), 128)
    assert np.array_equal(negativity.sign_filter(grid).values, grid.values)


def test_adjacent_two_delta_filter_is_not_identity():
    # the cross row has both diagonal rows as neighbours, and they outvote it
    grid = wigner_grid(superpose([make_delta(0), make_delta(1)], [1, 1]), 128)
    filtered = negativity.sign_filter(grid).values
    assert not np.array_equal(filtered, grid.values)
    assert np.min(filtered) >= 0.0


@pytest.mark.parametrize("alpha,expected", [(1.0, 2 / math.pi), (0.5, 0.509296), (2.0, 8 / (5 * math.pi))])
def test_two_delta_eta_values(alpha, expected):
    assert oracles.oracle_eta_two_delta(alpha) == pytest.approx(expected, abs=1e-6)
    rep = negativity.eta_of_state(superpose([make_delta(-4), make_delta(4)], [1, alpha]), 4096)
    assert rep.eta == pytest.approx(expected, abs=1e-5)
    assert rep.raw_negativity == pytest.approx(rep.eta, abs=1e-15)


def test_two_delta_fig_values():
    assert oracles.oracle_two_delta(-4, 4, 1.0, PhasePoint(0, 0.0)) == pytest.approx(INV_2PI)
    assert oracles.oracle_two_delta(-4, 4, 1.0, PhasePoint(8, 1.7)) == pytest.approx(1 / (4 * math.pi))
    assert oracles.oracle_two_delta(-4, 4, 1.0, PhasePoint(3, 1.7)) == 0.0


def test_delta_is_classified_nonnegative():
    assert negativity.classify_nonnegative(make_delta(7)).nonnegative


def test_adjacent_pair_witness():
    cls = negativity.classify_nonnegative(superpose([make_delta(0), make_delta(1)], [1, 1]))
    assert not cls.nonnegative
    assert cls.witness.m == 1
    assert abs(abs(cls.witness.k) - math.pi) < 0.05
