import json
import math
import os

import pytest

from brodylab.common.errors import UsageError, ValidationError
from brodylab.lab.cli import EXIT_PASS, EXIT_USAGE, main
from brodylab.lab.config import Param, complex_value, float_list, load_config
from brodylab.lab.experiments import REGISTRY, get_experiment, run_experiment
from brodylab.lab.plotting import plot_series
from brodylab.lab.report import ExperimentReport, dumps, format_float, write_series

SCHEMA = (Param('a', 'float', 1.0), Param('xs', 'floats', '0.5, 0.25'), Param('p', 'complex', 0j))
CONSTANT_RUN = ['--curve', 'constant', '--resolution', '8']


def test_registry_lists_every_experiment_with_an_anchor():
    assert len(REGISTRY) == 12
    for name, exp in REGISTRY.items():
        assert exp.name == name
        assert exp.anchor
    with pytest.raises(UsageError):
        get_experiment('nope')


def test_defaults_run_at_the_acceptance_scale():
    def defaults(name):
        exp = get_experiment(name)
        return load_config(exp.name, exp.schema).params

    assert defaults('tame-growth')['ensemble'] == 1000
    assert defaults('nsa-ergodic')['n'] == 1000
    assert defaults('example-random-family')['eps_ladder'] == [2.0 ** -k for k in range(4, 9)]


def test_list_prints_the_registry(capsys):
    assert main(['list']) == EXIT_PASS
    out = capsys.readouterr().out
    assert 'brody-bound' in out
    assert 'information-suite' in out


@pytest.mark.parametrize('argv', [['run', 'nope'], [], ['frobnicate'], ['list', '--extra']])
def test_usage_errors_exit_with_two(argv):
    assert main(argv) == EXIT_USAGE


def test_unknown_experiment_key_is_a_usage_error(tmp_path):
    assert main(['run', 'brody-bound', '--bogus', '1', '--out', str(tmp_path)]) == EXIT_USAGE


class TestConfig:

    def test_defaults_are_converted(self):
        cfg = load_config('x', SCHEMA)
        assert cfg.params == {'a': 1.0, 'xs': [0.5, 0.25], 'p': 0j}
        assert cfg.seed == 0

    def test_unknown_key_raises(self):
        with pytest.raises(UsageError):
            load_config('x', SCHEMA, overrides=['--bogus', '1'])

    def test_bad_values_raise(self):
        with pytest.raises(UsageError):
            load_config('x', SCHEMA, overrides=['--a', 'many'])
        with pytest.raises(UsageError):
            load_config('x', SCHEMA, overrides=['--xs', '1, two'])
        with pytest.raises(UsageError):
            load_config('x', SCHEMA, overrides=['--p', 'i'])
        with pytest.raises(UsageError):
            load_config('x', SCHEMA, seed=-1)

    def test_file_then_command_line(self, tmp_path):
        path = tmp_path / 'run.cfg'
        path.write_text('a = 2.5\nxs = 0.1, 0.2\nseed = 9\n')
        cfg = load_config('x', SCHEMA, str(path))
        assert cfg.params['a'] == 2.5
        assert cfg.params['xs'] == [0.1, 0.2]
        assert cfg.seed == 9
        cfg = load_config('x', SCHEMA, str(path), seed=4, overrides=['--a', '3'])
        assert cfg.params['a'] == 3.0
        assert cfg.seed == 4

    def test_value_parsers(self):
        assert float_list('[1, 2.5]') == [1.0, 2.5]
        assert float_list('') == []
        assert complex_value('1 + 2j') == 1 + 2j
        with pytest.raises(UsageError):
            complex_value('abc')

    def test_to_dict_splits_complex(self):
        cfg = load_config('x', SCHEMA, overrides=['--p', '1-2j'])
        assert cfg.to_dict()['params']['p'] == [1.0, -2.0]


class TestReport:

    def test_floats_keep_seventeen_digits(self):
        assert format_float(0.1) == '0.10000000000000001'
        assert format_float(1.0) == '1.0'
        assert format_float(math.inf) == 'null'
        text = dumps({'a': 0.1, 'b': math.nan, 'c': 3, 'd': [1.0, True], 'e': 1 + 2j})
        assert json.loads(text) == {'a': 0.1, 'b': None, 'c': 3, 'd': [1.0, True], 'e': [1.0, 2.0]}
        assert '"a": 0.10000000000000001' in text

    def test_unserializable_raises(self):
        with pytest.raises(TypeError):
            dumps({'a': object()})

    def test_verdicts(self):
        report = ExperimentReport('x', {})
        assert not report.passed
        assert report.exit_code == 1
        with pytest.raises(ValidationError):
            report.verdict('missing', True)
        report.metric('m', 1.0, 0.5)
        with pytest.raises(ValidationError):
            report.verdict('m', 'maybe')
        assert report.verdict('m', True) == 'pass'
        assert report.exit_code == 0
        report.metric('n', 2.0)
        report.verdict('n', 'inconclusive')
        assert report.exit_code == 1

    def test_write_series_checks_columns(self, tmp_path):
        path = write_series(str(tmp_path), 'x', 'curve', ['eps', 'rate'], [[0.1, 1.0], [0.05, 2.0]])
        with open(path) as fh:
            assert fh.readline().strip() == 'eps,rate'
        with pytest.raises(ValidationError):
            write_series(str(tmp_path), 'x', 'bad', ['eps'], [[0.1, 1.0]])

    def test_plot_series_writes_a_png(self, tmp_path):
        path = write_series(str(tmp_path), 'x', 'curve', ['eps', 'rate'], [[0.1, 1.0], [0.05, 2.0], [0.025, 3.0]])
        png = plot_series(path)
        assert png.endswith('.png')
        assert os.path.getsize(png) > 0


class TestRun:

    def test_constant_brody_bound_passes(self, tmp_path):
        code = main(['run', 'brody-bound', *CONSTANT_RUN, '--out', str(tmp_path), '--plot'])
        assert code == EXIT_PASS
        with open(tmp_path / 'brody-bound.json') as fh:
            data = json.load(fh)
        assert data['schema_version'] == 1
        assert data['verdicts'] == {'max_df': 'pass'}
        assert data['metrics']['max_df']['value'] == 0.0
        assert 'brody-bound_certificates.csv' in data['artifacts']
        assert (tmp_path / 'brody-bound_certificates.png').exists()

    def test_reports_are_deterministic(self, tmp_path):
        exp = get_experiment('brody-bound')
        cfg = load_config(exp.name, exp.schema, out=str(tmp_path), overrides=CONSTANT_RUN)
        first = run_experiment(cfg, write=False).to_dict()
        second = run_experiment(cfg, write=False).to_dict()
        first.pop('runtime_seconds')
        second.pop('runtime_seconds')
        assert dumps(first) == dumps(second)

    def test_bad_curve_choice_is_a_usage_error(self, tmp_path):
        exp = get_experiment('brody-bound')
        cfg = load_config(exp.name, exp.schema, out=str(tmp_path), overrides=['--curve', 'spiral'])
        with pytest.raises(UsageError):
            run_experiment(cfg, write=False)

    def test_fs_normalization_antipodes(self, tmp_path):
        exp = get_experiment('fs-normalization')
        cfg = load_config(exp.name, exp.schema, out=str(tmp_path), overrides=['--points', '20'])
        report = run_experiment(cfg)
        assert report.verdicts['antipodal_distance'] == 'pass'
        assert (tmp_path / 'fs-normalization.json').exists()

    def test_glue_tail_decays_like_the_inverse_cube(self, tmp_path):
        exp = get_experiment('glue-decay')
        report = run_experiment(load_config(exp.name, exp.schema, out=str(tmp_path)))
        assert report.verdicts == {'decay_slope': 'pass', 'calibration': 'pass'}
        assert report.metrics['decay_slope'][0] == pytest.approx(-3.0, abs=0.3)

    def test_tame_growth_counts_a_small_ensemble(self, tmp_path):
        exp = get_experiment('tame-growth')
        cfg = load_config(exp.name, exp.schema, out=str(tmp_path),
                          overrides=['--ensemble', '40', '--grid_spacing', '0.25'])
        report = run_experiment(cfg)
        counts = report.details['profile']['counts']
        assert len(counts) == 4
        assert all(a <= b for a, b in zip(counts, counts[1:]))
        assert 1 <= counts[0] and counts[-1] <= 40
        assert report.verdicts['final_profile'] in ('pass', 'fail')
        assert (tmp_path / 'tame-growth_profile.csv').exists()

    @pytest.mark.slow
    def test_family_samples_are_brody(self, tmp_path):
        exp = get_experiment('brody-bound')
        report = run_experiment(load_config(exp.name, exp.schema, out=str(tmp_path)))
        assert report.verdicts['max_df'] == 'pass'
        assert report.metrics['certified_fraction'][0] == 1.0

    @pytest.mark.slow
    def test_metric_lemma_holds_on_certified_pairs(self, tmp_path):
        exp = get_experiment('metric-lemma')
        cfg = load_config(exp.name, exp.schema, out=str(tmp_path), overrides=['--pairs', '5'])
        report = run_experiment(cfg)
        assert report.metrics['pairs_checked'][0] >= 1
        assert report.verdicts['violations'] == 'pass'
        with open(tmp_path / 'metric-lemma_comparisons.csv') as fh:
            assert fh.readline().strip() == 'L,pair,left_upper,right_lower,slack,holds'
