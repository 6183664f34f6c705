import numpy as np
import pytest
from numpy.testing import assert_allclose

from brodylab.common.errors import InvalidParameterError
from brodylab.geometry.lattice import (G4_UNIT, PeriodicCubicSum, choose_window_cells, lattice_window,
                                       psi_perturbation_bound, tail_perturbation_bound)


def direct_sum(x, L, cells):
    poles, _, _ = lattice_window(L, cells)
    return np.sum(1.0 / (x - poles) ** 3)


def test_eisenstein_constant_matches_a_direct_sum():
    poles, m, n = lattice_window(1.0, 80)
    keep = (m != 0) | (n != 0)
    assert G4_UNIT == pytest.approx(np.sum(poles[keep] ** -4.0).real, rel=1e-4)


def test_periodic_sum_matches_a_large_window():
    P = PeriodicCubicSum(2.0)
    x = 0.3 + 0.2j
    value, _ = P(np.array([x]))
    assert_allclose(value[0], direct_sum(x, 2.0, 80), rtol=1e-4)


def test_periodic_sum_is_periodic():
    P = PeriodicCubicSum(1.5)
    x = np.array([0.2 + 0.1j, -0.4 + 0.33j])
    base, dbase = P(x)
    for shift in (1.5, 1.5j, -3.0 + 4.5j):
        value, deriv = P(x + shift)
        assert_allclose(value, base, rtol=1e-10)
        assert_allclose(deriv, dbase, rtol=1e-10)


@pytest.mark.parametrize('L', [1.0, 2.0, 100.0])
def test_doubling_the_window_moves_values_below_1e8(L, rng):
    x = L * (rng.uniform(-0.5, 0.5, 1000) + 1j * rng.uniform(-0.5, 0.5, 1000))
    x = x[np.abs(x) > 0.05 * L]
    value, deriv = PeriodicCubicSum(L, 6)(x)
    wide, dwide = PeriodicCubicSum(L, 12)(x)
    assert_allclose(wide, value, rtol=1e-8, atol=1e-8)
    assert_allclose(dwide, deriv, rtol=1e-8, atol=1e-8)


def test_derivative_matches_finite_differences():
    P = PeriodicCubicSum(1.0)
    x = np.array([0.21 + 0.17j])
    h = 1e-6
    _, deriv = P(x)
    fd = (P(x + h)[0] - P(x - h)[0]) / (2 * h)
    assert_allclose(deriv, fd, rtol=1e-6)


def test_reduce_picks_the_nearest_pole():
    P = PeriodicCubicSum(1.0)
    zeta, km, kn = P.reduce(np.array([2.2 - 0.9j]))
    assert (km[0], kn[0]) == (2.0, -1.0)
    assert_allclose(zeta, [0.2 + 0.1j], atol=1e-12)


def test_bad_lattice_is_rejected():
    with pytest.raises(InvalidParameterError):
        PeriodicCubicSum(0.0)
    with pytest.raises(InvalidParameterError):
        PeriodicCubicSum(1.0, cells=1)


def test_tail_bound_shrinks_with_the_window():
    small = psi_perturbation_bound(*tail_perturbation_bound(10.0, 4, 5.0))
    large = psi_perturbation_bound(*tail_perturbation_bound(10.0, 12, 5.0))
    assert large < small


def test_tail_bound_is_infinite_for_a_window_inside_the_radius():
    assert tail_perturbation_bound(1.0, 3, 10.0) == (np.inf, np.inf)


def test_worst_mode_dominates_rms_for_wide_windows():
    worst = tail_perturbation_bound(1.0, 40, 1.0, mode='worst')
    assert worst[0] > 0 and worst[1] > 0
    with pytest.raises(InvalidParameterError):
        tail_perturbation_bound(1.0, 40, 1.0, mode='median')


def test_chosen_window_meets_the_tolerance():
    cells = choose_window_cells(100.0, 150.0, tol=1e-6)
    assert cells >= 3
    assert psi_perturbation_bound(*tail_perturbation_bound(100.0, cells, 150.0)) < 1e-6
    if cells > 3:
        assert psi_perturbation_bound(*tail_perturbation_bound(100.0, cells - 1, 150.0)) >= 1e-6
