import math

import pytest

from brodylab.common.errors import InvalidParameterError
from brodylab.geometry.curves import Square, rescale
from brodylab.verification.certificates import FAIL, PASS, brody_verify, nondegeneracy_check

REGION = Square(-4.0 - 4.0j, 8.0)


def test_line_passes_with_its_exact_maximum(line):
    cert = brody_verify(line, REGION, resolution=64)
    assert cert.verdict == PASS
    assert cert.passed
    assert cert.max_df == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-9)
    assert abs(cert.argmax) < 1e-9
    assert cert.to_dict()['verdict'] == 'pass'


def test_fast_line_fails_with_a_witness(line):
    cert = brody_verify(rescale(line, 4.0), REGION, resolution=64)
    assert cert.verdict == FAIL
    assert cert.max_df > 1.0
    assert cert.max_df <= 4.0 / math.sqrt(math.pi) + 1e-9


def test_constant_passes_trivially(constant):
    cert = brody_verify(constant, REGION)
    assert cert.passed
    assert cert.max_df == 0.0


def test_bad_certification_parameters(line):
    with pytest.raises(InvalidParameterError):
        brody_verify(line, REGION, resolution=4)
    with pytest.raises(InvalidParameterError):
        brody_verify(line, REGION, margin=0.0)


def test_line_is_nondegenerate_near_the_origin(line):
    report = nondegeneracy_check(line, 3.0, Square(-2.0 - 2.0j, 4.0), resolution=32)
    assert report
    assert report.witness is None
    assert report.centers_checked == 33 * 33


def test_constant_is_degenerate(constant):
    report = nondegeneracy_check(constant, 2.0, Square(0j, 1.0), resolution=8)
    assert not report
    assert report.witness is not None
    assert report.to_dict()['nondegenerate'] is False


def test_far_centres_of_a_line_are_degenerate(line):
    report = nondegeneracy_check(line, 1.0, Square(-10.0 - 10.0j, 20.0), resolution=20)
    assert not report.nondegenerate


def test_nondegeneracy_rejects_bad_radius(line):
    with pytest.raises(InvalidParameterError):
        nondegeneracy_check(line, 0.0, REGION)
