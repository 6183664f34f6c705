import math

import pytest

from brodylab.common.errors import InvalidParameterError, UnsupportedMeasureError
from brodylab.dynamics.measures import FamilyParams, LatticeFamily, PeriodicOrbit, PointMass, TranslatedAverage
from brodylab.geometry.curves import LatticeSum, Square
from brodylab.information.dynamical import (LATTICE_ASSUMPTIONS, disk_rate_curve, dynamical_rd_curve,
                                           dynamical_rd_estimate, kawabata_dembo_check, offset_correction)
from brodylab.information.quantizers import QuantizerSpec

WINDOW = Square(0j, 40.0)


def test_point_mass_has_zero_rate(line):
    est = dynamical_rd_estimate(PointMass(line), WINDOW, 0.1)
    assert est.rate_per_area == 0.0
    assert est.finite_window_rate == 0.0
    assert est.sampler == 'point_mass'


def test_periodic_orbit_only_pays_for_its_offset():
    orbit = PeriodicOrbit(LatticeSum.periodic(2.0, 1.5), 2.0)
    est = dynamical_rd_estimate(orbit, WINDOW, 0.1)
    assert est.rate_per_area == 0.0
    assert est.offset_correction == pytest.approx(math.log2(20 ** 2) / 1600.0)
    assert est.finite_window_rate == est.offset_correction


def test_offset_correction_vanishes_with_the_window():
    assert offset_correction(4.0, 0.1, 1e6) < offset_correction(4.0, 0.1, 1e2)
    assert offset_correction(4.0, 0.25, 16.0) == pytest.approx(math.log2(256) / 16.0)


def test_samplers_without_parameters_are_unsupported(small_family):
    with pytest.raises(UnsupportedMeasureError):
        dynamical_rd_estimate(TranslatedAverage(small_family, 10.0), WINDOW, 0.1)


def test_distortion_must_be_positive(small_family):
    with pytest.raises(InvalidParameterError):
        dynamical_rd_estimate(small_family, WINDOW, 0.0)


def test_lattice_family_rate_counts_coefficients(small_family):
    est = dynamical_rd_estimate(small_family, WINDOW, 0.25)
    assert est.per_parameter_rate > 0.0
    assert est.parameters_in_window == pytest.approx(1600.0 / 16.0)
    assert est.rate_per_area == pytest.approx(est.per_parameter_rate / 16.0)
    assert est.offset_correction > 0.0
    assert est.assumptions == list(LATTICE_ASSUMPTIONS)
    assert est.to_dict()['sampler'] == 'lattice_family'


def test_lattice_family_rate_at_a_fine_distortion(small_family):
    est = dynamical_rd_estimate(small_family, WINDOW, 2.0 ** -4)
    assert math.isfinite(est.per_parameter_rate)
    assert est.per_parameter_rate > dynamical_rd_estimate(small_family, WINDOW, 0.25).per_parameter_rate


def test_rescaled_family_packs_more_coefficients():
    base = dynamical_rd_estimate(LatticeFamily(FamilyParams(L=4.0, cells=3)), WINDOW, 0.25)
    dense = dynamical_rd_estimate(LatticeFamily(FamilyParams(L=4.0, cells=3, scale=2.0)), WINDOW, 0.25)
    assert dense.per_parameter_rate == base.per_parameter_rate
    assert dense.rate_per_area == pytest.approx(4.0 * base.rate_per_area, rel=1e-12)


def test_deterministic_curves_have_a_flat_rate_curve(line):
    est = dynamical_rd_curve(PointMass(line), WINDOW, [0.2, 0.1, 0.05])
    assert est.rates == [0.0, 0.0, 0.0]
    assert est.slope == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_lattice_family_rate_slope_per_area():
    family = LatticeFamily(FamilyParams(L=4.0, cells=3))
    ladder = [2.0 ** -k for k in range(4, 9)]
    est = dynamical_rd_curve(family, WINDOW, ladder)
    per_cell = disk_rate_curve(tuple(ladder), QuantizerSpec())
    assert est.slope == pytest.approx(per_cell.slope / 16.0, rel=1e-9)
    assert per_cell.slope == pytest.approx(2.0, rel=0.1)
    assert est.nonincreasing


def test_kawabata_dembo_dimension_must_be_small():
    with pytest.raises(InvalidParameterError):
        kawabata_dembo_check(3)


@pytest.mark.slow
def test_uniform_interval_has_slope_one():
    report = kawabata_dembo_check(1)
    assert report.verdict == 'pass'
    assert 0.9 <= report.slope <= 1.2
    assert len(report.constants) == len(report.epsilons) == 4
    assert report.to_dict()['dimension'] == 1
