import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from brodylab.common.errors import InvalidParameterError, NotLocallyConstantError, ValidationError
from brodylab.geometry.curves import (GLUING_TARGET, Constant, Glued, LatticeSum, Rational, Square, Translated,
                                      curve_from_dict, curve_from_json, curve_to_json, evaluate, evaluate_many, glue,
                                      gluing_norm, lipschitz_field, local_lipschitz, rescale, solve_gluing_amplitude,
                                      spherical_derivative_sq, translate)
from brodylab.geometry.projective import base_point, fs_distance, fs_distance_array

POINTS = np.array([0.0, 0.5, -1.0 + 2.0j, 3.0j, 0.25 - 0.75j])


def test_line_matches_the_closed_form(line, line_df2):
    assert_allclose(lipschitz_field(line, POINTS), line_df2(POINTS), rtol=1e-12)
    assert local_lipschitz(line, 0.0) == pytest.approx(1.0 / math.sqrt(math.pi))


def test_constant_has_zero_derivative(constant):
    assert_allclose(lipschitz_field(constant, POINTS), 0.0)
    assert evaluate(constant, 7.0 - 1j).isclose(constant.point)


def test_common_zero_is_divided_out(line):
    doubled = Rational([[0.0, 1.0], [0.0, 0.0, 1.0]])
    assert_allclose(lipschitz_field(doubled, POINTS), lipschitz_field(line, POINTS), rtol=1e-12)
    assert evaluate(doubled, 0.0).isclose(evaluate(line, 0.0))


@pytest.mark.parametrize('components', [[[1.0]], [[0.0], [0.0]]])
def test_degenerate_rational_curves_are_rejected(components):
    with pytest.raises(ValidationError):
        Rational(components)


def test_frame_multiplier_leaves_the_derivative_alone(rng):
    F = rng.standard_normal((10, 3)) + 1j * rng.standard_normal((10, 3))
    dF = rng.standard_normal((10, 3)) + 1j * rng.standard_normal((10, 3))
    # (hF)' = h' F + h F' for a holomorphic multiplier h with h(z0) = h, h'(z0) = hp
    h, hp = 2.0 - 1j, 0.3 + 0.7j
    assert_allclose(spherical_derivative_sq(h * F, hp * F + h * dF), spherical_derivative_sq(F, dF), rtol=1e-12)


def test_rescale_scales_the_derivative(line):
    g = rescale(line, 2.5)
    for z in POINTS:
        assert local_lipschitz(g, z) == pytest.approx(2.5 * local_lipschitz(line, 2.5 * z), rel=1e-12)
    assert rescale(line, 1.0) is line
    with pytest.raises(InvalidParameterError):
        rescale(line, 0.0)


def test_translations_compose(line):
    g = translate(translate(line, 1.0), 2.0j)
    assert isinstance(g, Translated)
    assert g.a == 1.0 + 2.0j
    assert evaluate(g, 0.5).isclose(evaluate(line, 1.5 + 2.0j))
    assert translate(line, 0.0) is line


def test_rational_carrier_contains_the_roots():
    curve = Rational([[1.0], [-4.0 + 1j, 1.0]])
    sq = curve.carrier()
    root = 4.0 - 1j
    assert sq.corner.real <= root.real <= sq.corner.real + sq.side
    assert sq.corner.imag <= root.imag <= sq.corner.imag + sq.side


def test_constant_has_no_carrier(constant):
    assert constant.carrier() is None
    assert constant.period() is None


def test_square_grids():
    sq = Square(1.0 + 1.0j, 2.0)
    mids = sq.midpoints(4)
    assert mids.shape == (4, 4)
    assert mids[0, 0] == pytest.approx(1.25 + 1.25j)
    assert mids[0, 1].real > mids[0, 0].real
    assert mids[1, 0].imag > mids[0, 0].imag
    assert sq.lattice(4).shape == (5, 5)
    with pytest.raises(InvalidParameterError):
        Square(0j, 0.0)


def test_bounding_union_covers_both():
    u = Square(0j, 1.0).bounding_union(Square(2.0 - 1j, 1.0))
    assert u.corner == -1j
    assert u.side == pytest.approx(3.0)


class TestLatticeSum:

    def test_periodic_curve_has_its_period(self):
        curve = LatticeSum.periodic(2.0, 1.5)
        assert curve.period() == 2.0
        z = np.array([0.3 + 0.4j, -0.7 + 0.1j])
        gap = fs_distance_array(evaluate_many(curve, z), evaluate_many(curve, z + 2.0 + 4.0j))
        assert gap.max() < 1e-9

    def test_deviating_coefficient_breaks_periodicity(self):
        curve = LatticeSum.periodic(2.0, 1.5)
        coeffs = np.array(curve.coefficients)
        coeffs[3, 3] = 0.5
        assert LatticeSum(2.0, coeffs, tail=1.5).period() is None

    def test_charts_agree(self):
        curve = LatticeSum.periodic(2.0, 1.0 + 0.5j, offset=0.1)
        z = np.array([0.3 + 0.4j, 0.9 - 0.2j, 0.05 + 0.01j])
        a = spherical_derivative_sq(*curve.frame(z, chart=0))
        b = spherical_derivative_sq(*curve.frame(z, chart=1))
        assert_allclose(a, b, rtol=1e-8)

    def test_charts_agree_on_random_points(self, rng):
        curve = LatticeSum.periodic(2.0, 1.0 + 0.5j, offset=0.1)
        z = 2.0 * (rng.uniform(size=1000) + 1j * rng.uniform(size=1000))
        F, dF = curve.frame(z, chart=0)
        # the affine chart loses digits next to the poles
        keep = np.abs(F[:, 1]) < 100.0
        assert keep.sum() > 900
        a = spherical_derivative_sq(F[keep], dF[keep])
        b = spherical_derivative_sq(*curve.frame(z[keep], chart=1))
        assert_allclose(a, b, rtol=1e-8, atol=1e-12)

    def test_doubling_the_window_keeps_a_random_curve(self, rng):
        coeffs = 2.0 + 0.5 * (rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7)))
        small = LatticeSum(2.0, coeffs, tail=2.0)
        big = small.with_window(7)
        assert big.window_radius > 2.0 * small.window_radius
        z = 3.0 * (rng.uniform(-1, 1, 1000) + 1j * rng.uniform(-1, 1, 1000))
        assert fs_distance_array(evaluate_many(small, z), evaluate_many(big, z)).max() < 1e-8
        assert_allclose(lipschitz_field(big, z), lipschitz_field(small, z), rtol=1e-8, atol=1e-8)

    def test_poles_are_regular(self):
        curve = LatticeSum.periodic(2.0, 1.0)
        values = lipschitz_field(curve, np.array([0.0, 2.0, 2.0j]))
        assert np.all(np.isfinite(values))
        assert_allclose(values, 0.0, atol=1e-12)
        assert evaluate(curve, 0.0).isclose(evaluate(curve, 2.0))

    def test_derivative_matches_finite_differences(self):
        curve = LatticeSum.periodic(2.0, 1.5)
        z = np.array([0.45 + 0.3j])
        h = 1e-4

        def log_norm(w):
            F, _ = curve.frame(w, chart=0)
            return np.log(np.sum(np.abs(F) ** 2, axis=-1))

        lap = (log_norm(z + h) + log_norm(z - h) + log_norm(z + 1j * h) + log_norm(z - 1j * h)
               - 4.0 * log_norm(z)) / h ** 2
        assert_allclose(lipschitz_field(curve, z), lap / (4.0 * math.pi), rtol=1e-4)

    def test_window_can_grow_but_not_shrink(self):
        curve = LatticeSum.periodic(2.0, 1.0, cells=3)
        coeffs = np.array(curve.coefficients)
        coeffs[3, 4] = 0.25
        small = LatticeSum(2.0, coeffs, tail=1.0)
        big = small.with_window(5)
        assert big.cells == 5
        assert big.coefficient(np.array([0]), np.array([1]))[0] == 0.25
        assert big.coefficient(np.array([9]), np.array([0]))[0] == 1.0
        z = np.array([0.1 + 0.3j, 1.7 - 0.4j])
        assert_allclose(lipschitz_field(big, z), lipschitz_field(small, z), rtol=1e-12)
        with pytest.raises(InvalidParameterError):
            big.with_window(4)

    def test_bad_coefficient_shapes(self):
        with pytest.raises(ValidationError):
            LatticeSum(1.0, np.zeros((2, 2)))
        with pytest.raises(InvalidParameterError):
            LatticeSum(-1.0, np.zeros((3, 3)))


class TestGluing:

    def test_amplitude_matches_the_target_norm(self):
        a = solve_gluing_amplitude(1, 'fs')
        assert gluing_norm(1, a, 'fs') == pytest.approx(GLUING_TARGET, abs=1e-8)
        assert solve_gluing_amplitude(1, 'modulus') > 0
        with pytest.raises(InvalidParameterError):
            solve_gluing_amplitude(1, 'sup')

    def test_glued_constant_stays_near_the_base_outside_the_unit_disk(self):
        q = base_point(1)
        glued = glue(Constant(q), 0.0, q)
        far = np.array([1.0, 1j, -2.0, 10.0 + 10.0j])
        gaps = fs_distance_array(evaluate_many(glued, far), q.coords)
        assert gaps.max() <= GLUING_TARGET + 1e-8
        assert fs_distance(evaluate(glued, 0.0), q) > GLUING_TARGET

    def test_glue_needs_a_nearly_constant_curve(self, line):
        with pytest.raises(NotLocallyConstantError):
            glue(line, 0.0, base_point(1))

    def test_glue_rejects_mixed_dimensions(self, line):
        with pytest.raises(InvalidParameterError):
            glue(line, 0.0, base_point(2))

    def test_glued_curve_carrier_includes_the_disk(self):
        q = base_point(1)
        glued = glue(Constant(q), 5.0 + 5.0j, q)
        assert isinstance(glued, Glued)
        sq = glued.carrier()
        assert sq.corner == pytest.approx(4.0 + 4.0j)
        assert sq.side == pytest.approx(2.0)


def test_curve_serialization_preserves_values(line):
    curve = translate(rescale(line, 2.0), 0.5j)
    again = curve_from_json(curve_to_json(curve))
    assert_allclose(lipschitz_field(again, POINTS), lipschitz_field(curve, POINTS), rtol=1e-14)


def test_lattice_sum_serialization_preserves_coefficients():
    curve = LatticeSum.periodic(3.0, 0.5 + 0.5j, offset=0.2j)
    again = curve_from_dict(curve.to_dict())
    assert_allclose(again.coefficients, curve.coefficients)
    assert again.offset == curve.offset


def test_unknown_kind_is_rejected():
    with pytest.raises(ValidationError):
        curve_from_dict({'kind': 'spiral'})
