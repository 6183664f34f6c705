import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from brodylab.common.errors import InvalidParameterError, UnsupportedCurveError
from brodylab.geometry.curves import LatticeSum, Rational, Square, translate
from brodylab.geometry.energy import (GridField, TranslationSearch, characteristic_ladder, disk_energy_profile,
                                      energy_density, energy_insensitivity_profile, energy_integral,
                                      normalized_characteristic, nsa_characteristic, psi, psi1, psi2)
from brodylab.verification.symbolic import line_square_energy


def test_line_has_unit_total_energy(line):
    est = energy_integral(line, Square(-50.0 - 50.0j, 100.0), resolution=256)
    assert est.value == pytest.approx(1.0, abs=1e-3)
    assert est.error_bound < 1e-3


def test_degree_two_curve_has_energy_two():
    est = energy_integral(Rational([[1.0], [0.0], [0.0, 0.0, 1.0]]), Square(-50.0 - 50.0j, 100.0), 256)
    assert est.value == pytest.approx(2.0, abs=2e-3)


def test_constant_has_no_energy(constant):
    assert energy_integral(constant, Square(0j, 1.0)).value == 0.0
    assert energy_density(constant, 4.0).value == 0.0


def test_energy_needs_enough_resolution(line):
    with pytest.raises(InvalidParameterError):
        energy_integral(line, Square(0j, 1.0), resolution=4)
    with pytest.raises(InvalidParameterError):
        GridField(Square(0j, 1.0), 1, np.zeros((1, 1)))


def test_grid_field_integral_matches_the_sum(line):
    fld = GridField.sample(line, Square(-1.0 - 1.0j, 2.0), 100)
    assert fld.values.shape == (100, 100)
    assert fld.integral() == pytest.approx(fld.values.sum() * fld.spacing ** 2, rel=1e-12)


def test_psi_of_the_line(line):
    assert psi(line) == pytest.approx(4.0 / math.pi)
    assert psi2(line) == pytest.approx(2.0 / math.pi, rel=1e-3)
    assert psi1(line) == pytest.approx(line_square_energy(1.0), rel=1e-3)


def test_disk_profile_is_monotone(line):
    bounds, energies = disk_energy_profile(line, 3.0, resolution=16)
    assert bounds[0] == 0.0 and energies[0] == 0.0
    assert bounds[-1] == pytest.approx(3.0)
    assert np.all(np.diff(energies) > 0)
    assert_allclose(energies, bounds ** 2 / (1 + bounds ** 2), atol=1e-3)


def test_characteristic_of_the_line(line):
    assert nsa_characteristic(line, 4.0, resolution=32) == pytest.approx(0.5 * math.log(8.5), rel=1e-3)
    ladder = characteristic_ladder(line, [2.0, 4.0])
    assert ladder[0] < ladder[1]
    assert ladder[1] == pytest.approx(nsa_characteristic(line, 4.0), rel=1e-12)
    assert normalized_characteristic(line, 4.0, resolution=32) == pytest.approx(
        8.0 / (math.pi * 16.0) * 0.5 * math.log(8.5), rel=1e-3)


def test_characteristic_needs_radii_above_one(line):
    with pytest.raises(InvalidParameterError):
        nsa_characteristic(line, 1.0)


def test_density_of_a_periodic_curve_is_the_cell_mean():
    curve = LatticeSum.periodic(2.0, 1.5)
    cell = energy_integral(curve, Square(0j, 2.0), resolution=128).value / 4.0
    est = energy_density(curve, 4.0)
    assert est.value == pytest.approx(cell, rel=1e-3)


def test_density_of_a_line_is_found_at_the_origin(line):
    est = energy_density(line, 2.0, TranslationSearch(resolution=32, coarse=4, refine=16))
    center = est.corner + (1.0 + 1.0j)
    assert abs(center) <= 0.5
    assert est.value <= 1.0 / 4.0


def test_density_rejects_short_sides(line):
    with pytest.raises(InvalidParameterError):
        energy_density(line, 0.5)


def test_translation_search_grid_must_nest():
    with pytest.raises(InvalidParameterError):
        TranslationSearch(resolution=60, coarse=4, refine=16)


def test_density_needs_a_carrier_or_a_period(line):
    class Unbounded(Rational):
        def carrier(self):
            return None

    with pytest.raises(UnsupportedCurveError):
        energy_density(Unbounded([[1.0], [0.0, 1.0]]), 2.0)


def test_identical_curves_are_energy_insensitive(line):
    profile = energy_insensitivity_profile(line, line, sides=(2, 4, 8), resolution=32)
    assert profile.below_floor
    assert profile.linear
    assert profile.sup_distance < 1e-7


def test_nearby_curves_differ_by_little(line):
    g = translate(line, 1e-3)
    profile = energy_insensitivity_profile(line, g, sides=(2, 4, 8), resolution=64)
    assert max(profile.differences) < 1e-2
    assert profile.sup_distance < 1e-3
