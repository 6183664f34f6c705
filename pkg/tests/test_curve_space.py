import numpy as np
import pytest

from brodylab.common.errors import InvalidParameterError, ValidationError
from brodylab.dynamics.curve_space import (CurveEnsemble, DynMetricSpec, metric_comparison_check, metric_eval,
                                           pairwise_distance_brackets)
from brodylab.geometry.curves import Constant, rescale, translate
from brodylab.geometry.projective import ProjectivePoint, base_point, fs_distance

P = ProjectivePoint([1.0, 0.0])
Q = ProjectivePoint([1.0, 0.5])


@pytest.mark.parametrize('kwargs', [
    {'kind': 'sup'},
    {'grid_spacing': 0.0},
    {'grid_spacing': 0.3},
    {'grid_spacing': 1.0},
    {'kind': 'd_L', 'L': 0},
    {'kind': 'dbar_L', 'L': 1.5},
])
def test_bad_metric_specs(kwargs):
    with pytest.raises(InvalidParameterError):
        DynMetricSpec(**kwargs)


def test_grid_covers_the_window():
    spec = DynMetricSpec('d_L', 3, 0.25)
    grid = spec.grid()
    assert grid.shape == (17, 17)
    assert grid[-1, -1] == pytest.approx(4.0 + 4.0j)
    assert DynMetricSpec('d', 7, 0.25).grid().shape == (5, 5)


def test_distance_to_itself_is_bracketed_by_zero(line):
    for kind in ('d', 'd_L', 'dbar_L', 'dbar1_Z_L'):
        spec = DynMetricSpec(kind, 2, 0.125)
        b = metric_eval(spec, line, line)
        assert b.lower == pytest.approx(0.0, abs=1e-7)
        assert b.contains(0.0, tol=1e-7)
        assert not b.wide_margin


@pytest.mark.parametrize('kind', ['d', 'd_L', 'dbar_L', 'dbar1_Z_L'])
def test_constant_curves_have_exact_lower_brackets(kind):
    b = metric_eval(DynMetricSpec(kind, 2, 0.25), Constant(P), Constant(Q))
    assert b.lower == pytest.approx(fs_distance(P, Q), rel=1e-12)
    assert b.upper >= b.lower


def test_window_metrics_are_ordered(line):
    g = translate(line, 0.3)
    d = metric_eval(DynMetricSpec('d', 1, 0.125), line, g)
    dL = metric_eval(DynMetricSpec('d_L', 3, 0.125), line, g)
    dbar = metric_eval(DynMetricSpec('dbar_L', 3, 0.125), line, g)
    assert d.lower <= dL.lower + 1e-15
    assert dbar.lower <= dL.lower + 1e-15
    assert dbar.lower <= dbar.upper


def test_fast_curves_widen_the_bracket(line):
    spec = DynMetricSpec('d', 1, 0.125)
    b = metric_eval(spec, rescale(line, 4.0), line)
    assert b.wide_margin
    assert b.upper - b.lower > spec.margin


def test_metric_needs_matching_dimensions(line):
    with pytest.raises(InvalidParameterError):
        metric_eval(DynMetricSpec(), line, Constant(base_point(2)))


def test_pairwise_brackets_are_symmetric():
    points = [P, Q, ProjectivePoint([0.0, 1.0])]
    ensemble = CurveEnsemble([Constant(p) for p in points], {'kind': 'constants'})
    spec = DynMetricSpec('dbar_L', 2, 0.25)
    lower, upper = pairwise_distance_brackets(ensemble, spec)
    np.testing.assert_allclose(lower, lower.T)
    np.testing.assert_allclose(np.diag(lower), 0.0)
    np.testing.assert_allclose(np.diag(upper), spec.margin)
    assert lower[0, 1] == pytest.approx(fs_distance(P, Q), rel=1e-12)
    assert np.all(upper >= lower)


def test_ensembles_must_be_homogeneous(line):
    with pytest.raises(ValidationError):
        CurveEnsemble([])
    with pytest.raises(ValidationError):
        CurveEnsemble([line, Constant(base_point(2))])
    assert len(CurveEnsemble([line, line])) == 2


def test_comparison_holds_for_constant_curves():
    result = metric_comparison_check(Constant(P), Constant(Q), 2, grid_spacing=0.25)
    assert result.holds
    assert result.left.lower == pytest.approx(fs_distance(P, Q), rel=1e-12)
    assert result.to_dict()['L'] == 2


def test_comparison_holds_for_a_curve_and_itself(line):
    assert metric_comparison_check(line, line, 2, grid_spacing=0.25).holds


def test_default_slack_only_fails_proven_violations(line):
    g = translate(line, 0.3 + 0.1j)
    res = metric_comparison_check(line, g, 1, grid_spacing=0.25)
    assert res.slack == pytest.approx((res.left.upper - res.left.lower) + 4.0 * (res.right.upper - res.right.lower))
    assert res.holds == (res.left.lower <= 4.0 * res.right.upper + 1e-12)
    strict = metric_comparison_check(line, g, 1, grid_spacing=0.25, slack=0.0)
    assert strict.holds == (strict.left.upper <= 4.0 * strict.right.lower)
