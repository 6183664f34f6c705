"""Randomised checks of the laws of entropy, mutual information and rate distortion.

Each checker draws its instances from ``numpy.random.default_rng(seed)`` and
returns the worst violation seen; a law holds when the worst violation stays
within the tolerance.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from ..common.parallel import map_ordered
from .entropy import DistortionMatrix, JointPmf, Pmf, channel_mutual_information, mutual_information
from .rate_distortion import distortion_range, rate_at_distortion, rd_brute_force

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12
AGREEMENT_TOLERANCE = 1e-3


@dataclass
class PropertyResult:
    name: str
    trials: int
    worst_violation: float
    tolerance: float = TOLERANCE
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.tolerance

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'trials': self.trials, 'worst_violation': self.worst_violation,
                'tolerance': self.tolerance, 'verdict': self.verdict, **self.details}


def _simplex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Dirichlet(1, ..., 1) draws along the last axis."""
    w = rng.exponential(size=shape)
    return w / w.sum(axis=-1, keepdims=True)


def _joint(rng: np.random.Generator, max_size: int) -> JointPmf:
    kx, ky = rng.integers(2, max_size + 1, size=2)
    return JointPmf.normalized(_simplex(rng, int(kx) * int(ky)).reshape(kx, ky))


def _report(name: str, violations: Sequence[float], tolerance: float = TOLERANCE) -> PropertyResult:
    worst = float(max(violations)) if len(violations) else 0.0
    result = PropertyResult(name, len(violations), worst, tolerance)
    log = logger.info if result.passed else logger.warning
    log(f"{name}: worst violation {worst:.3g} over {len(violations)} trials")
    return result


def check_nonnegativity_symmetry(trials: int = 1000, seed: int = 0, max_size: int = 6) -> PropertyResult:
    """I(X; Y) >= 0 and I(X; Y) = I(Y; X)."""
    rng = np.random.default_rng(seed)
    violations = []
    for _ in range(trials):
        j = _joint(rng, max_size)
        forward = mutual_information(j)
        violations.append(max(-forward, abs(forward - mutual_information(j.T))))
    return _report('nonnegativity_symmetry', violations)


def check_data_processing(trials: int = 1000, seed: int = 0, max_size: int = 6) -> PropertyResult:
    """I(f(X); g(Y)) <= I(X; Y) for deterministic maps onto smaller alphabets."""
    rng = np.random.default_rng(seed)
    violations = []
    for _ in range(trials):
        j = _joint(rng, max_size)
        kx, ky = j.matrix.shape
        fx = rng.integers(0, kx - 1, size=kx) if kx > 2 else np.zeros(kx, dtype=int)
        gy = rng.integers(0, ky - 1, size=ky) if ky > 2 else rng.integers(0, 2, size=ky)
        violations.append(mutual_information(j.push_forward(fx, gy)) - mutual_information(j))
    return _report('data_processing', violations)


def check_subadditivity(trials: int = 1000, seed: int = 0, max_size: int = 4) -> PropertyResult:
    """I(X, Y; Z) <= I(X; Z) + I(Y; Z) when X and Y are independent given Z."""
    rng = np.random.default_rng(seed)
    violations = []
    for _ in range(trials):
        kx, ky, kz = (int(k) for k in rng.integers(2, max_size + 1, size=3))
        pz = _simplex(rng, kz)
        a = _simplex(rng, kz, kx)
        b = _simplex(rng, kz, ky)
        joint = np.einsum('z,zx,zy->xyz', pz, a, b)
        pair = mutual_information(JointPmf(joint.reshape(kx * ky, kz)))
        x_z = mutual_information(JointPmf(joint.sum(axis=1)))
        y_z = mutual_information(JointPmf(joint.sum(axis=0)))
        violations.append(pair - x_z - y_z)
    return _report('subadditivity', violations)


def check_concavity_convexity(trials: int = 1000, seed: int = 0, max_size: int = 5,
                              components: int = 3) -> PropertyResult:
    """I(mu, nu) is concave in the source mu and convex in the channel nu."""
    rng = np.random.default_rng(seed)
    violations = []
    for _ in range(trials):
        kx, ky = (int(k) for k in rng.integers(2, max_size + 1, size=2))
        w = _simplex(rng, components)
        mus = _simplex(rng, components, kx)
        nus = _simplex(rng, components, kx, ky)
        nu = nus[0]
        mu = Pmf(mus[0])
        mixed_source = channel_mutual_information(Pmf.normalized(w @ mus), nu)
        concave_gap = sum(wi * channel_mutual_information(Pmf(m), nu) for wi, m in zip(w, mus)) - mixed_source
        mixed_channel = channel_mutual_information(mu, np.einsum('k,kxy->xy', w, nus))
        convex_gap = mixed_channel - sum(wi * channel_mutual_information(mu, n) for wi, n in zip(w, nus))
        violations.append(max(concave_gap, convex_gap))
    return _report('concavity_convexity', violations)


@dataclass
class ContinuityResult:
    """|I(j_t) - I(j)| for joints j_t = (1 - t) j + t r along a shrinking ladder of t."""
    perturbations: List[float]
    worst_gaps: List[float]

    @property
    def converges(self) -> bool:
        g = self.worst_gaps
        return all(b <= a for a, b in zip(g, g[1:])) and g[-1] < 1e-2

    @property
    def verdict(self) -> str:
        return 'pass' if self.converges else 'fail'

    def to_dict(self) -> Dict[str, Any]:
        return {'perturbations': self.perturbations, 'worst_gaps': self.worst_gaps, 'verdict': self.verdict}


def check_continuity_in_law(trials: int = 200, seed: int = 0, max_size: int = 5,
                            ladder: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> ContinuityResult:
    rng = np.random.default_rng(seed)
    gaps = np.zeros((trials, len(ladder)))
    for i in range(trials):
        j = _joint(rng, max_size)
        r = _simplex(rng, j.matrix.size).reshape(j.matrix.shape)
        base = mutual_information(j)
        for k, t in enumerate(ladder):
            gaps[i, k] = abs(mutual_information(JointPmf.normalized((1 - t) * j.matrix + t * r)) - base)
    result = ContinuityResult([float(t) for t in ladder], [float(g) for g in gaps.max(axis=0)])
    logger.info(f"continuity in law: worst gaps {result.worst_gaps}")
    return result


def _agreement_instance(rng_seed: int, max_size: int) -> Dict[str, float]:
    rng = np.random.default_rng(rng_seed)
    kx, ky = (int(k) for k in rng.integers(2, max_size + 1, size=2))
    source = Pmf(_simplex(rng, kx))
    d = DistortionMatrix(rng.uniform(size=(kx, ky)))
    d_min, d_max = distortion_range(source, d)
    target = d_min + rng.uniform(0.05, 0.95) * (d_max - d_min)
    ba = rate_at_distortion(source, d, target).rate
    brute = rd_brute_force(source, d, target)
    return {'shape': (kx, ky), 'target': target, 'ba': ba, 'brute_force': brute}


def check_ba_agreement(instances: int = 50, seed: int = 0, max_size: int = 3) -> PropertyResult:
    """Blahut-Arimoto rates against the brute-force oracle on random small instances."""
    seeds = np.random.SeedSequence(seed).generate_state(instances)
    rows = map_ordered(lambda s: _agreement_instance(int(s), max_size), list(seeds))
    result = _report('ba_agreement', [abs(r['ba'] - r['brute_force']) for r in rows], AGREEMENT_TOLERANCE)
    result.details['instances'] = [{k: (list(v) if isinstance(v, tuple) else v) for k, v in r.items()} for r in rows]
    return result


def run_suite(trials: int = 1000, instances: int = 50, seed: int = 0) -> List[Any]:
    """All checkers with their default sizes."""
    return [
        check_nonnegativity_symmetry(trials, seed),
        check_data_processing(trials, seed + 1),
        check_subadditivity(trials, seed + 2),
        check_concavity_convexity(trials, seed + 3),
        check_continuity_in_law(max(trials // 5, 1), seed + 4),
        check_ba_agreement(instances, seed + 5),
    ]
