import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from brodylab.geometry.curves import Rational, lipschitz_field
from brodylab.verification.symbolic import (R, line_characteristic_value, line_square_energy, monomial_disk_energy,
                                            monomial_total_energy, rational_df2, to_serializable)

POINTS = np.array([0.1 + 0.2j, -0.7j, 1.3 - 0.4j])


def test_line_formula_matches_the_frame(line, line_df2):
    assert_allclose(rational_df2([[1.0], [0.0, 1.0]])(POINTS), line_df2(POINTS), rtol=1e-10)


@pytest.mark.parametrize('components', [
    [[1.0], [0.0, 0.0, 1.0]],
    [[1.0, 1.0], [0.0, 1.0], [2.0, 0.0, 1.0]],
    [[0.5j, 1.0], [1.0, -1.0]],
])
def test_symbolic_and_numerical_derivatives_agree(components):
    assert_allclose(rational_df2(components)(POINTS), lipschitz_field(Rational(components), POINTS), rtol=1e-9)


@pytest.mark.parametrize('degree', [1, 2, 3])
def test_monomial_energy_equals_the_degree(degree):
    assert float(monomial_total_energy(degree)) == pytest.approx(degree)


def test_line_disk_energy():
    assert float(monomial_disk_energy(1).subs(R, 2)) == pytest.approx(0.8)


def test_line_characteristic_closed_form():
    assert line_characteristic_value(4.0) == pytest.approx(0.5 * math.log(8.5), rel=1e-12)


def test_line_square_energy_tends_to_one():
    assert line_square_energy(1.0) < line_square_energy(10.0) < 1.0
    assert line_square_energy(100.0) == pytest.approx(1.0, abs=2e-4)


def test_serialized_values_keep_precision():
    assert float(to_serializable(monomial_total_energy(2))) == 2.0
