"""Registered experiments.

Each experiment declares the law it checks (its anchor), a parameter schema,
and a body that fills an ExperimentReport with metrics, verdicts and CSV series.
"""
import math
import os
import time
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..common.errors import NumericError, UsageError
from ..dynamics.covering import tame_growth_profile
from ..dynamics.curve_space import CurveEnsemble, DynMetricSpec, metric_comparison_check, pairwise_distance_brackets
from ..dynamics.measures import (FamilyParams, LatticeFamily, PeriodicOrbit, ergodic_average_check, expectation,
                                 design_rescaling, periodic_psi_identity, sample_curve)
from ..geometry.curves import (Constant, LatticeSum, Rational, Square, evaluate_many, glue, gluing_norm,
                               lipschitz_field, rescale)
from ..geometry.energy import energy_density, energy_integral, psi
from ..geometry.projective import DIAMETER, ProjectivePoint, base_point, fs_distance, fs_distance_array
from ..information.dynamical import dynamical_rd_curve, kawabata_dembo_check
from ..information.entropy import DistortionMatrix, Pmf, entropy
from ..information.properties import run_suite
from ..information.quantizers import QuantizerSpec
from ..information.rate_distortion import rate_at_distortion, rd_curve
from ..verification.certificates import FAIL, INCONCLUSIVE, PASS, brody_verify, nondegeneracy_check
from ..verification.symbolic import line_square_energy
from .config import ExperimentConfig, Param
from .report import ExperimentReport, write_series

logger = logging.getLogger(__name__)

PSI_TARGET = 12.0
RDIM_TARGET = 2.0
DEFAULT_LADDER = '0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625'


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    schema: Tuple[Param, ...]
    body: Callable[[ExperimentConfig, ExperimentReport], None]


REGISTRY: Dict[str, Experiment] = {}


def register(name: str, anchor: str, *schema: Param):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, anchor, tuple(schema), fn)
        return fn
    return wrap


def get_experiment(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UsageError(f"unknown experiment {name!r}; run 'brodylab list' for the registered ones") from None


def _series(cfg: ExperimentConfig, report: ExperimentReport, series: str, columns, rows) -> None:
    path = write_series(cfg.output_dir, cfg.name, series, columns, rows)
    report.artifacts.append(os.path.basename(path))


def _family(p, seed: int, scale: float = 1.0) -> LatticeFamily:
    return LatticeFamily(FamilyParams(L=p['L'], a_center=p['a_center'], seed=seed, scale=scale))


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentReport:
    """Run one experiment; numeric failures become an inconclusive verdict.

    Raises:
        UsageError: if the experiment is not registered.
    """
    exp = get_experiment(config.name)
    report = ExperimentReport(config.name, config.to_dict(), exp.anchor)
    logger.info(f"Running {config.name} (seed {config.seed})")
    start = time.perf_counter()
    try:
        exp.body(config, report)
    except (NumericError, FloatingPointError) as err:
        index = getattr(err, 'sample_index', None)
        logger.error(f"{config.name}: numeric failure: {err}")
        report.metric('numeric_failure', -1 if index is None else index)
        report.verdict('numeric_failure', INCONCLUSIVE)
        report.details['error'] = str(err)
    report.runtime_seconds = time.perf_counter() - start
    for key, verdict in report.verdicts.items():
        logger.info(f"{config.name}: {key} -> {verdict}")
    if write:
        report.write(config.output_dir)
    return report


# -- geometry ---------------------------------------------------------------

@register('fs-normalization', 'd_FS([1:0], [0:1]) = sqrt(pi)/2; d_FS(f(z), f(z+h))/h -> |df|(z)',
          Param('N', 'int', 1, 'target dimension of the test curve'),
          Param('points', 'int', 1000, 'random points of the ratio test'),
          Param('step', 'float', 1e-6, 'finite-difference step'),
          Param('tolerance', 'float', 1e-3, 'relative tolerance of the ratio test'))
def fs_normalization(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    d = fs_distance(ProjectivePoint([1, 0]), ProjectivePoint([0, 1]))
    report.metric('antipodal_distance', d, abs(d - DIAMETER))
    report.verdict('antipodal_distance', abs(d - DIAMETER) <= 1e-9)

    rng = np.random.default_rng(cfg.seed)
    comps = rng.normal(size=(p['N'] + 1, 3)) + 1j * rng.normal(size=(p['N'] + 1, 3))
    curve = Rational(comps)
    z = rng.uniform(-2, 2, p['points']) + 1j * rng.uniform(-2, 2, p['points'])
    u = np.exp(2j * math.pi * rng.uniform(size=p['points']))
    ratio = fs_distance_array(evaluate_many(curve, z), evaluate_many(curve, z + p['step'] * u)) / p['step']
    lip = np.sqrt(lipschitz_field(curve, z))
    live = lip > 1e-6
    rel = np.abs(ratio[live] - lip[live]) / lip[live]
    report.metric('ratio_relative_error', float(np.max(rel)))
    report.verdict('ratio_relative_error', float(np.max(rel)) <= p['tolerance'])
    report.details['test_curve'] = curve.to_dict()
    _series(cfg, report, 'ratio', ['re', 'im', 'ratio', 'lipschitz'],
            np.column_stack([z.real, z.imag, ratio, lip]))


@register('degree-energy', 'the energy of a rational curve of degree d over C equals d',
          Param('half_side', 'float', 50.0, 'the square is [-T, T]^2'),
          Param('resolution', 'int', 1024, 'midpoint cells per side'),
          Param('tolerance', 'float', 1e-3, 'allowed gap to the degree'))
def degree_energy(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    T, res = p['half_side'], p['resolution']
    line = Rational([[1], [0, 1]])
    whole = energy_integral(line, Square(complex(-T, -T), 2 * T), res)
    report.metric('total_energy', whole.value, whole.error_bound)
    report.verdict('total_energy', abs(whole.value - 1.0) <= p['tolerance'])

    oracle = line_square_energy(T)
    report.metric('oracle_gap', abs(whole.value - oracle), whole.error_bound)
    report.verdict('oracle_gap', abs(whole.value - oracle) <= whole.error_bound + 1e-9)

    corners = [complex(-T, -T), complex(0, -T), complex(-T, 0), 0j]
    parts = [energy_integral(line, Square(c, T), res // 2) for c in corners]
    gap = abs(sum(q.value for q in parts) - whole.value)
    bound = sum(q.error_bound for q in parts) + whole.error_bound
    report.metric('quadrant_additivity', gap, bound)
    report.verdict('quadrant_additivity', gap <= bound + 1e-12)
    report.details['oracle'] = oracle
    _series(cfg, report, 'quadrants', ['quadrant', 'energy', 'error_bound'],
            [[k, q.value, q.error_bound] for k, q in enumerate(parts)])


@register('brody-bound', '|df|(z) <= 1 for all z',
          Param('curve', 'str', 'family', "'family' samples, 'constant' or 'periodic'"),
          Param('samples', 'int', 100, 'number of family samples'),
          Param('L', 'float', 100.0, 'cell side'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('resolution', 'int', 256, 'scan resolution'),
          Param('margin', 'float', 1e-6, 'tolerance above 1'),
          Param('region_side', 'float', 0.0, 'side of the certified square centred at 0; 0 means L'),
          Param('nondegeneracy_R', 'float', 0.0, 'also check R-nondegeneracy when positive'))
def brody_bound(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    side = p['region_side'] or p['L']
    region = Square(complex(-side / 2, -side / 2), side)
    if p['curve'] == 'constant':
        curves = [Constant(base_point(1))]
    elif p['curve'] == 'periodic':
        curves = [LatticeSum.periodic(p['L'], p['a_center'])]
    elif p['curve'] == 'family':
        family = _family(p, cfg.seed)
        curves = [sample_curve(family, i) for i in range(p['samples'])]
    else:
        raise UsageError(f"unknown curve choice {p['curve']!r}")

    certs = [brody_verify(c, region, p['resolution'], p['margin']) for c in curves]
    verdicts = [c.verdict for c in certs]
    worst = max(certs, key=lambda c: c.max_df)
    report.metric('max_df', worst.max_df, max(c.uncertainty for c in certs))
    if FAIL in verdicts:
        outcome = FAIL
    elif INCONCLUSIVE in verdicts:
        outcome = INCONCLUSIVE
    else:
        outcome = PASS
    report.verdict('max_df', outcome)
    report.metric('certified_fraction', verdicts.count(PASS) / len(certs))
    report.details['worst_certificate'] = worst.to_dict()
    _series(cfg, report, 'certificates', ['sample', 'max_df', 'uncertainty'],
            [[k, c.max_df, c.uncertainty] for k, c in enumerate(certs)])

    if p['nondegeneracy_R'] > 0:
        checks = [nondegeneracy_check(c, p['nondegeneracy_R'], region) for c in curves]
        report.metric('nondegenerate_fraction', sum(bool(c) for c in checks) / len(checks))
        report.verdict('nondegenerate_fraction', all(bool(c) for c in checks))
        failing = next((c for c in checks if not c), None)
        if failing is not None:
            report.details['nondegeneracy_witness'] = failing.to_dict()


@register('glue-decay', 'd_FS(f, Psi(f))(z) <= C / |z - p|^3',
          Param('N', 'int', 1, 'target dimension'),
          Param('convention', 'str', 'fs', "amplitude norm: 'fs', 'modulus' or 'derivative'"),
          Param('p', 'complex', 0j, 'gluing point'),
          Param('r_min', 'float', 1.0, 'smallest |z - p|'),
          Param('r_max', 'float', 50.0, 'largest |z - p|'),
          Param('points', 'int', 24, 'radii on the log ladder'),
          Param('angles', 'int', 64, 'angles per radius'),
          Param('target', 'float', 0.1, 'calibrated norm of the tail'))
def glue_decay(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    q = base_point(p['N'])
    base = Constant(q)
    glued = glue(base, p['p'], q, convention=p['convention'])
    r = np.geomspace(p['r_min'], p['r_max'], p['points'])
    theta = 2 * math.pi * np.arange(p['angles']) / p['angles']
    z = p['p'] + r[:, None] * np.exp(1j * theta[None, :])
    dist = np.max(fs_distance_array(evaluate_many(base, z), evaluate_many(glued, z)), axis=1)
    slope, intercept = np.polyfit(np.log(r), np.log(dist), 1)
    report.metric('decay_slope', float(slope))
    report.verdict('decay_slope', abs(slope + 3.0) <= 0.3)

    norm = gluing_norm(p['N'], glued.amplitude, p['convention'])
    report.metric('calibration', norm, abs(norm - p['target']))
    report.verdict('calibration', abs(norm - p['target']) <= 1e-6)
    report.details['amplitude'] = glued.amplitude
    report.details['decay_constant'] = float(math.exp(intercept))
    _series(cfg, report, 'decay', ['distance', 'fs_gap'], np.column_stack([r, dist]))


# -- curve space ------------------------------------------------------------

@register('metric-lemma', 'd_L(T^a f, T^a g) <= 4 dbar1_Z_{L+1}(f, g), a = (1 + i)/2',
          Param('pairs', 'int', 100, 'number of curve pairs'),
          Param('L_values', 'floats', '1, 2, 4', 'window sides'),
          Param('L', 'float', 100.0, 'cell side of the family'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('grid_spacing', 'float', 1.0 / 16, 'metric grid step'),
          Param('certify_resolution', 'int', 64, 'Brody scan resolution for each curve'))
def metric_lemma(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    family = _family(p, cfg.seed)
    windows = [int(w) for w in p['L_values']]
    region = Square(0j, float(max(windows) + 2))
    certified = []
    index = 0
    while len(certified) < 2 * p['pairs'] and index < 4 * p['pairs']:
        curve = sample_curve(family, index)
        index += 1
        if brody_verify(curve, region, p['certify_resolution']).passed:
            certified.append(curve)
    if len(certified) < 2:
        report.metric('pairs_checked', 0)
        report.verdict('pairs_checked', INCONCLUSIVE)
        return

    rows = []
    for L in windows:
        for k in range(len(certified) // 2):
            res = metric_comparison_check(certified[2 * k], certified[2 * k + 1], L, p['grid_spacing'])
            rows.append([L, k, res.left.upper, res.right.lower, res.slack, float(res.holds)])
    rows = np.asarray(rows)
    violations = int(np.sum(rows[:, 5] == 0))
    report.metric('pairs_checked', len(certified) // 2)
    report.metric('violations', violations)
    report.verdict('violations', violations == 0)
    ratio = rows[:, 2] / np.maximum(rows[:, 3], 1e-300)
    report.metric('worst_ratio', float(np.max(ratio)))
    _series(cfg, report, 'comparisons', ['L', 'pair', 'left_upper', 'right_lower', 'slack', 'holds'], rows)


@register('tame-growth', 'eps^delta log #(X, d, eps) -> 0 as eps -> 0',
          Param('ensemble', 'int', 1000, 'number of sampled curves'),
          Param('L', 'float', 100.0, 'cell side of the family'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('window', 'int', 1, 'metric window side'),
          Param('grid_spacing', 'float', 1.0 / 8, 'metric grid step'),
          Param('delta', 'float', 0.5, 'growth exponent'),
          Param('eps_ladder', 'floats', '0.2, 0.1, 0.05, 0.025', 'covering scales'))
def tame_growth(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    family = _family(p, cfg.seed)
    ensemble = CurveEnsemble([sample_curve(family, i) for i in range(p['ensemble'])], family.to_dict())
    spec = DynMetricSpec('dbar1_Z_L', p['window'], p['grid_spacing'])
    lower, _ = pairwise_distance_brackets(ensemble, spec)
    profile = tame_growth_profile(lower, p['eps_ladder'], p['delta'], metric=None)
    report.metric('final_profile', profile.profile[-1])
    report.verdict('final_profile', profile.verdict)
    report.details['profile'] = profile.to_dict()
    _series(cfg, report, 'profile', ['epsilon', 'log_count', 'profile'],
            np.column_stack([profile.epsilons, profile.log_counts, profile.profile]))


# -- measures ---------------------------------------------------------------

@register('example-random-family', 'lattice family: E[psi] = 12/L^2 and rdim = 2/L^2',
          Param('L', 'float', 100.0, 'cell side'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('n', 'int', 10000, 'Monte-Carlo samples'),
          Param('eps_ladder', 'floats', DEFAULT_LADDER, 'distortion ladder of the coefficient rates'),
          Param('oversample', 'int', 2, 'quantiser grid points per eps'),
          Param('psi_tolerance', 'float', 0.05, 'relative tolerance on E[psi] L^2'),
          Param('rd_tolerance', 'float', 0.1, 'relative tolerance on the rate slope times L^2'))
def example_random_family(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    family = _family(p, cfg.seed)
    L2 = p['L'] ** 2
    mc = expectation(family, psi, p['n'], name='psi')
    report.metric('psi_L2', mc.mean * L2, mc.ci * L2)
    report.verdict('psi_L2', mc.contains(PSI_TARGET / L2)
                   and abs(mc.mean * L2 - PSI_TARGET) <= p['psi_tolerance'] * PSI_TARGET)

    est = dynamical_rd_curve(family, Square(0j, p['L']), p['eps_ladder'], QuantizerSpec(p['oversample']))
    report.metric('rd_slope_L2', est.slope * L2, est.fit_residual * L2)
    report.verdict('rd_slope_L2', abs(est.slope * L2 - RDIM_TARGET) <= p['rd_tolerance'] * RDIM_TARGET)
    report.details['psi'] = mc.to_dict()
    report.details['rd_fit'] = est.fit_summary()
    _series(cfg, report, 'rd', ['epsilon', 'rate_per_area'], np.column_stack([est.distortions, est.rates]))


@register('ruelle-check', 'urdim(T, d, mu) <= integral of psi dmu; both sides scale by lam^2 under rescaling',
          Param('L', 'float', 100.0, 'cell side'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('n', 'int', 2000, 'Monte-Carlo samples per family'),
          Param('scales', 'floats', '1, 0.7071067811865476, 0.5', 'rescaling factors lam'),
          Param('eps_ladder', 'floats', DEFAULT_LADDER, 'distortion ladder'),
          Param('oversample', 'int', 2, 'quantiser grid points per eps'),
          Param('tolerance', 'float', 0.05, 'relative tolerance of the lam^2 scaling'))
def ruelle_check(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    spec = QuantizerSpec(p['oversample'])
    rows = []
    for lam in p['scales']:
        family = _family(p, cfg.seed, lam)
        mc = expectation(family, psi, p['n'], name='psi')
        est = dynamical_rd_curve(family, Square(0j, p['L'] / lam), p['eps_ladder'], spec)
        rows.append([lam, mc.mean, mc.ci, est.slope])
    ref, base_psi, base_rd = rows[0][0], rows[0][1], rows[0][3]
    for lam, mean, ci, slope in rows:
        key = f"ruelle_{lam:.6g}"
        report.metric(key, mean / slope if slope > 0 else math.inf, ci / slope if slope > 0 else 0.0)
        report.verdict(key, slope <= mean + ci)
        key = f"scaling_{lam:.6g}"
        factor = (lam / ref) ** 2
        gap = max(abs(mean / base_psi / factor - 1), abs(slope / base_rd / factor - 1))
        report.metric(key, gap)
        report.verdict(key, gap <= p['tolerance'])
    _series(cfg, report, 'scales', ['scale', 'psi_mean', 'psi_ci', 'rd_slope'], rows)


@register('nsa-ergodic', 'T(R, f) = (pi R^2 / 4(N+1)) integral of psi dmu + o(R^2) almost surely',
          Param('L', 'float', 100.0, 'cell side'),
          Param('a_center', 'float', 2.0, 'coefficient disk centre'),
          Param('n', 'int', 1000, 'Monte-Carlo samples'),
          Param('radii', 'floats', '25, 50, 100', 'radius ladder'),
          Param('resolution', 'int', 4, 'ring samples per unit length'),
          Param('tolerance', 'float', 0.1, 'final relative gap'))
def nsa_ergodic(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    family = _family(p, cfg.seed)
    res = ergodic_average_check(family, p['radii'], p['n'], p['resolution'], tolerance=p['tolerance'])
    report.metric('psi', res.psi.mean, res.psi.ci)
    for R, r in zip(res.radii, res.characteristic):
        report.metric(f"normalized_T_{R:g}", r.mean, r.ci)
    report.metric('final_relative_gap', res.relative_gaps[-1])
    report.verdict('final_relative_gap', res.verdict)
    report.details['ergodic'] = res.to_dict()
    _series(cfg, report, 'characteristic', ['radius', 'mean', 'ci', 'gap'],
            [[R, r.mean, r.ci, g] for R, r, g in zip(res.radii, res.characteristic, res.gaps)])


@register('rescale-family', 'lam = sqrt(c / (2(N+1) rho(g))) gives 2(N+1) rho(f) = c, rho(f) = lam^2 rho(g)',
          Param('L', 'float', 100.0, 'period of the base curve'),
          Param('a_center', 'float', 2.0, 'coefficient of the periodic base curve'),
          Param('c', 'float', 0.0, 'target; 0 means half the reachable ceiling'),
          Param('n', 'int', 1000, 'Monte-Carlo samples of the periodic psi identity'),
          Param('tolerance', 'float', 0.05, 'relative tolerance'))
def rescale_family(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    g = LatticeSum.periodic(p['L'], p['a_center'])
    c = p['c']
    if c <= 0:
        c = (g.N + 1) * energy_density(g, p['L']).value
    design = design_rescaling(g, c)
    f = rescale(g, design.lam)
    period = p['L'] / design.lam
    rho_f = energy_density(f, period).value
    achieved = 2.0 * (f.N + 1) * rho_f
    report.metric('target_gap', abs(achieved / c - 1.0))
    report.verdict('target_gap', abs(achieved / c - 1.0) <= p['tolerance'])
    scaling = abs(rho_f / (design.lam ** 2 * design.rho_hat) - 1.0)
    report.metric('density_scaling', scaling)
    report.verdict('density_scaling', scaling <= p['tolerance'])

    identity = periodic_psi_identity(PeriodicOrbit(f, period, seed=cfg.seed), p['n'], seed=cfg.seed)
    report.metric('periodic_psi', identity.monte_carlo.mean, identity.monte_carlo.ci)
    report.verdict('periodic_psi', identity.verdict)
    report.details['design'] = design.to_dict()
    report.details['periodic_identity'] = identity.to_dict()


# -- information ------------------------------------------------------------

@register('information-suite', 'I >= 0, symmetric, data processing, subadditivity, concave in mu, convex in nu',
          Param('trials', 'int', 1000, 'random instances per law'),
          Param('instances', 'int', 50, 'Blahut-Arimoto vs brute-force instances'))
def information_suite(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    results = run_suite(p['trials'], p['instances'], cfg.seed)
    for res in results[:4] + results[5:]:
        report.metric(res.name, res.worst_violation, res.tolerance)
        report.verdict(res.name, res.verdict)
    continuity = results[4]
    report.metric('continuity_in_law', continuity.worst_gaps[-1])
    report.verdict('continuity_in_law', continuity.verdict)
    report.details['continuity_in_law'] = continuity.to_dict()

    binary = Pmf([0.5, 0.5])
    hamming = DistortionMatrix.hamming(2)
    point = rate_at_distortion(binary, hamming, 0.11)
    expected = 1.0 - entropy([0.11, 0.89])
    report.metric('binary_hamming_rate', point.rate, abs(point.rate - expected))
    report.verdict('binary_hamming_rate', abs(point.rate - expected) <= 1e-3)

    ladder = [0.4, 0.3, 0.2, 0.1, 0.05]
    est = rd_curve(binary, hamming, ladder)
    report.metric('ladder_shape', float(est.nonincreasing and est.convex))
    report.verdict('ladder_shape', est.nonincreasing and est.convex)
    _series(cfg, report, 'binary_rd', ['distortion', 'rate_bits'], np.column_stack([est.distortions, est.rates]))


@register('kawabata-dembo', 'I(X; Y) >= s log(1/eps) - K(s+1) when mu(E) <= diam(E)^s',
          Param('dimensions', 'floats', '1, 2', 'cube dimensions s'),
          Param('eps_ladder', 'floats', '0.125, 0.0625, 0.03125, 0.015625', 'distortion ladder'),
          Param('oversample', 'int', 2, 'quantiser grid points per eps'),
          Param('tolerance', 'float', 0.1, 'allowed slope deficit'))
def kawabata_dembo(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    p = cfg.params
    rows: List[List[float]] = []
    for s in (int(d) for d in p['dimensions']):
        check = kawabata_dembo_check(s, p['eps_ladder'], QuantizerSpec(p['oversample']), p['tolerance'])
        report.metric(f"slope_{s}", check.slope, check.fit_residual)
        report.verdict(f"slope_{s}", check.verdict)
        report.details[f"dimension_{s}"] = check.to_dict()
        rows += [[s, e, r, k] for e, r, k in zip(check.epsilons, check.rates, check.constants)]
    _series(cfg, report, 'rates', ['dimension', 'epsilon', 'rate_bits', 'constant'], rows)
