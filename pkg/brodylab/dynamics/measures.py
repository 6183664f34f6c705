"""Samplers of translation-invariant measures on the curve space and Monte-Carlo estimates.

Sample i of a sampler with seed s is a pure function of (s, i): every random
quantity is read from the counter-based streams of ``SampleStream(s, i)``.
"""
import math
import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import norm
from tqdm.autonotebook import tqdm

from ..common.errors import (InvalidParameterError, NumericError, TargetUnreachableError,
                             ValidationError)
from ..common.parallel import map_ordered, row_blocks
from ..common.rng import OFFSET_BLOCK, TRANSLATION_BLOCK, SampleStream
from ..geometry.curves import CurveRep, LatticeSum, Square, evaluate_many, rescale, translate
from ..geometry.energy import (TranslationSearch, characteristic_ladder, energy_density, energy_integral,
                               psi, psi1, psi2)
from ..geometry.lattice import choose_window_cells
from ..geometry.projective import fs_distance_array

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
Z_SCORE = float(norm.ppf(0.5 + CONFIDENCE / 2.0))

OBSERVABLES: Dict[str, Callable[[CurveRep], float]] = {
    'psi': psi,
    'psi1': psi1,
    'psi2': psi2,
}


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of the random lattice-sum family.

    Args:
        L: cell side of the lattice.
        a_center: centre of the coefficient disk; also the value of every coefficient
            outside the explicit window.
        cells: window half-width; None picks the smallest width whose tail moves psi by < 1e-6.
        N: target dimension (the family maps to CP^1).
        seed: 64-bit seed.
        scale: draws g(scale * z) instead of g(z).
    """
    L: float = 100.0
    a_center: float = 2.0
    cells: Optional[int] = None
    N: int = 1
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidParameterError(f"cell side must be positive, got {self.L}")
        if not self.a_center > 0:
            raise InvalidParameterError(f"a_center must be positive, got {self.a_center}")
        if self.cells is not None and self.cells < 3:
            raise InvalidParameterError(f"window needs at least 3 cells, got {self.cells}")
        if self.N != 1:
            raise InvalidParameterError(f"the lattice family maps to CP^1, got N={self.N}")
        if not self.scale > 0:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")

    @property
    def window_cells(self) -> int:
        if self.cells is not None:
            return self.cells
        # z is read up to distance L from 0, the offset adds at most sqrt(2) L
        return choose_window_cells(self.L, (1.0 + math.sqrt(2.0)) * self.L)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out['window_cells'] = self.window_cells
        return out


class MeasureSampler(ABC):
    """Generative description of a translation-invariant probability measure."""

    kind: str = ''
    seed: int = 0

    @property
    @abstractmethod
    def N(self) -> int:
        ...

    @abstractmethod
    def draw(self, stream: SampleStream) -> CurveRep:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...


class LatticeFamily(MeasureSampler):
    """w uniform on [0, L]^2 and u_lam uniform on |u - a_center| <= 1, independently."""
    kind = 'lattice_family'

    def __init__(self, params: FamilyParams):
        self.params = params
        self.seed = params.seed
        self._cells = params.window_cells
        logger.debug(f"lattice family L={params.L}, a={params.a_center} uses {self._cells} window cells")

    @property
    def N(self) -> int:
        return 1

    def draw(self, stream: SampleStream) -> CurveRep:
        p = self.params
        w = stream.uniform_square(OFFSET_BLOCK, p.L)
        coeffs = stream.lattice_disk_coefficients(self._cells, complex(p.a_center))
        return rescale(LatticeSum(p.L, coeffs, offset=w, tail=p.a_center), p.scale)

    def to_dict(self):
        return {'kind': self.kind, **self.params.to_dict()}


class PeriodicOrbit(MeasureSampler):
    """Uniform measure on the orbit of a curve with periods L and L i."""
    kind = 'periodic_orbit'

    def __init__(self, curve: CurveRep, L: float, seed: int = 0, checks: int = 64, tol: float = 1e-9):
        if not L > 0:
            raise InvalidParameterError(f"period must be positive, got {L}")
        rng = np.random.default_rng(seed)
        z = L * (rng.uniform(size=checks) + 1j * rng.uniform(size=checks))
        base = evaluate_many(curve, z)
        gap = max(float(np.max(fs_distance_array(base, evaluate_many(curve, z + L)))),
                  float(np.max(fs_distance_array(base, evaluate_many(curve, z + 1j * L)))))
        if gap >= tol:
            raise ValidationError(f"curve is not periodic with period {L}: periodicity gap {gap:.3g}")
        self.curve = curve
        self.L = float(L)
        self.seed = seed

    @property
    def N(self) -> int:
        return self.curve.N

    def draw(self, stream: SampleStream) -> CurveRep:
        return translate(self.curve, stream.uniform_square(TRANSLATION_BLOCK, self.L))

    def to_dict(self):
        return {'kind': self.kind, 'L': self.L, 'seed': self.seed, 'curve': self.curve.to_dict()}


class TranslatedAverage(MeasureSampler):
    """(1/L_n^2) times the integral over u in [0, L_n]^2 of the push-forward of a base measure by T^u."""
    kind = 'translated_average'

    def __init__(self, base: MeasureSampler, L_n: float, seed: Optional[int] = None):
        if not L_n > 0:
            raise InvalidParameterError(f"averaging side must be positive, got {L_n}")
        self.base = base
        self.L_n = float(L_n)
        self.seed = base.seed if seed is None else seed

    @property
    def N(self) -> int:
        return self.base.N

    def draw(self, stream: SampleStream) -> CurveRep:
        return translate(self.base.draw(stream), stream.uniform_square(TRANSLATION_BLOCK, self.L_n))

    def to_dict(self):
        return {'kind': self.kind, 'L_n': self.L_n, 'seed': self.seed, 'base': self.base.to_dict()}


class PointMass(MeasureSampler):
    """Delta measure of a translation-invariant curve."""
    kind = 'point_mass'

    def __init__(self, curve: CurveRep, seed: int = 0):
        self.curve = curve
        self.seed = seed

    @property
    def N(self) -> int:
        return self.curve.N

    def draw(self, stream: SampleStream) -> CurveRep:
        return self.curve

    def to_dict(self):
        return {'kind': self.kind, 'seed': self.seed, 'curve': self.curve.to_dict()}


def sample_curve(sampler: MeasureSampler, index: int, seed: Optional[int] = None) -> CurveRep:
    """Draw sample ``index`` of the sampler's stream (or of ``seed``)."""
    return sampler.draw(SampleStream(sampler.seed if seed is None else seed, index))


def _evaluate_samples(sampler: MeasureSampler, fn: Callable[[CurveRep], Any], n: int, seed: int,
                      desc: str, progress: bool) -> List[Any]:
    def block(sl: slice) -> List[Any]:
        return [fn(sampler.draw(SampleStream(seed, i))) for i in range(sl.start, sl.stop)]

    out = []
    blocks = row_blocks(n, 256)
    with tqdm(total=n, desc=desc, disable=not progress) as bar:
        for chunk in (blocks[k:k + 8] for k in range(0, len(blocks), 8)):
            for part in map_ordered(block, chunk):
                out.extend(part)
                bar.update(len(part))
    return out


def _check_finite(values: np.ndarray, offset: int = 0):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0]) + offset
        raise NumericError(f"observable is not finite at sample {i}: {values[bad[0]]}", sample_index=i)


@dataclass
class ExpectationReport:
    observable: str
    n: int
    mean: float
    ci: float
    seed: int
    values: np.ndarray = field(repr=False, default=None)

    @property
    def interval(self):
        return self.mean - self.ci, self.mean + self.ci

    def contains(self, value: float) -> bool:
        lo, hi = self.interval
        return lo <= value <= hi

    def overlaps(self, other: 'ExpectationReport') -> bool:
        return abs(self.mean - other.mean) <= self.ci + other.ci

    def to_dict(self) -> Dict[str, Any]:
        return {'observable': self.observable, 'n': self.n, 'mean': self.mean, 'ci': self.ci, 'seed': self.seed}


def _summarize(name: str, values: np.ndarray, seed: int) -> ExpectationReport:
    n = values.size
    mean = float(np.mean(values))
    ci = Z_SCORE * float(np.std(values, ddof=1)) / math.sqrt(n)
    return ExpectationReport(name, n, mean, ci, seed, values)


def expectation(sampler: MeasureSampler, observable: Callable[[CurveRep], float], n: int,
                seed: Optional[int] = None, name: Optional[str] = None, progress: bool = True) -> ExpectationReport:
    """Monte-Carlo mean of an observable with a 95% normal-approximation half-width.

    Raises:
        InvalidParameterError: if n < 2.
        NumericError: if the observable is not finite on some sample (index attached).
    """
    if n < 2:
        raise InvalidParameterError(f"expectation needs at least 2 samples, got {n}")
    seed = sampler.seed if seed is None else seed
    name = name or getattr(observable, '__name__', 'observable')
    values = np.asarray(_evaluate_samples(sampler, observable, n, seed, name, progress), dtype=float)
    _check_finite(values)
    report = _summarize(name, values, seed)
    logger.info(f"E[{name}] = {report.mean:.6g} +/- {report.ci:.2g} over {n} samples")
    return report


@dataclass
class InvarianceReport:
    shift: complex
    base: ExpectationReport
    shifted: ExpectationReport

    @property
    def gap(self) -> float:
        return abs(self.base.mean - self.shifted.mean)

    @property
    def verdict(self) -> str:
        return 'pass' if self.base.overlaps(self.shifted) else 'fail'

    def to_dict(self):
        return {'shift': [self.shift.real, self.shift.imag], 'base': self.base.to_dict(),
                'shifted': self.shifted.to_dict(), 'gap': self.gap, 'verdict': self.verdict}


def invariance_test(sampler: MeasureSampler, observable: Callable[[CurveRep], float], a: complex, n: int = 100,
                    seed: Optional[int] = None, progress: bool = True) -> InvarianceReport:
    """Compare E[obs] with E[obs o T^a] on common samples.

    Raises:
        InvalidParameterError: if n < 100.
    """
    if n < 100:
        raise InvalidParameterError(f"invariance test needs at least 100 samples, got {n}")
    seed = sampler.seed if seed is None else seed
    a = complex(a)
    pairs = _evaluate_samples(sampler, lambda c: (observable(c), observable(translate(c, a))), n, seed,
                              'invariance', progress)
    values = np.asarray(pairs, dtype=float)
    _check_finite(values.reshape(-1))
    name = getattr(observable, '__name__', 'observable')
    return InvarianceReport(a, _summarize(name, values[:, 0], seed), _summarize(name, values[:, 1], seed))


@dataclass
class RescalingDesign:
    lam: float
    rho_hat: float
    target: float
    N: int

    def to_dict(self):
        return asdict(self)


def design_rescaling(g: CurveRep, c: float, L: Optional[float] = None,
                     search: Optional[TranslationSearch] = None) -> RescalingDesign:
    """lam = sqrt(c / (2(N+1) rho_hat(g))), rho_hat the energy-density estimate at side L.

    ``L`` defaults to the period of g.

    Raises:
        TargetUnreachableError: if c <= 0 or c > 2(N+1) rho_hat.
    """
    if L is None:
        L = g.period()
        if L is None:
            raise InvalidParameterError("design_rescaling needs L for a curve without a period")
    rho_hat = energy_density(g, L, search).value
    ceiling = 2.0 * (g.N + 1) * rho_hat
    if not c > 0 or c > ceiling * (1.0 + 1e-12):
        raise TargetUnreachableError(f"target {c} is outside (0, {ceiling:.6g}]")
    lam = min(1.0, math.sqrt(c / ceiling))
    return RescalingDesign(lam, rho_hat, float(c), g.N)


@dataclass
class ErgodicReport:
    radii: List[float]
    characteristic: List[ExpectationReport]
    psi: ExpectationReport
    tolerance: float

    @property
    def gaps(self) -> List[float]:
        return [abs(r.mean - self.psi.mean) for r in self.characteristic]

    @property
    def relative_gaps(self) -> List[float]:
        scale = abs(self.psi.mean)
        return [g / scale if scale > 0 else g for g in self.gaps]

    @property
    def shrinking(self) -> bool:
        g = self.gaps
        return all(b <= a + 1e-15 for a, b in zip(g, g[1:]))

    @property
    def verdict(self) -> str:
        return 'pass' if self.shrinking and self.relative_gaps[-1] < self.tolerance else 'fail'

    def to_dict(self):
        return {'radii': self.radii, 'characteristic': [r.to_dict() for r in self.characteristic],
                'psi': self.psi.to_dict(), 'gaps': self.gaps, 'relative_gaps': self.relative_gaps,
                'verdict': self.verdict}


def ergodic_average_check(sampler: MeasureSampler, radii: Sequence[float], n: int, resolution: int = 4,
                          seed: Optional[int] = None, tolerance: float = 0.1,
                          progress: bool = True) -> ErgodicReport:
    """Monte-Carlo means of (4(N+1)/(pi R^2)) T(R, f) along a ladder against E[psi].

    Both sides are read from the same samples.

    Raises:
        InvalidParameterError: if the ladder is not increasing or starts below 4.
    """
    radii = [float(r) for r in radii]
    if not radii or radii[0] < 4 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidParameterError(f"radius ladder must be increasing and start at >= 4, got {radii}")
    if n < 2:
        raise InvalidParameterError(f"ergodic check needs at least 2 samples, got {n}")
    seed = sampler.seed if seed is None else seed
    N = sampler.N

    def observe(curve: CurveRep) -> List[float]:
        T = characteristic_ladder(curve, radii, resolution)
        return [psi(curve)] + [4.0 * (N + 1) / (math.pi * R ** 2) * t for R, t in zip(radii, T)]

    values = np.asarray(_evaluate_samples(sampler, observe, n, seed, 'characteristic', progress), dtype=float)
    _check_finite(values.reshape(-1))
    psi_report = _summarize('psi', values[:, 0], seed)
    char = [_summarize(f"T({R:g})", values[:, k + 1], seed) for k, R in enumerate(radii)]
    return ErgodicReport(radii, char, psi_report, tolerance)


@dataclass
class PeriodicIdentityReport:
    monte_carlo: ExpectationReport
    quadrature: float
    quadrature_error: float

    @property
    def verdict(self) -> str:
        gap = abs(self.monte_carlo.mean - self.quadrature)
        return 'pass' if gap <= self.monte_carlo.ci + self.quadrature_error else 'fail'

    def to_dict(self):
        return {'monte_carlo': self.monte_carlo.to_dict(), 'quadrature': self.quadrature,
                'quadrature_error': self.quadrature_error, 'verdict': self.verdict}


def periodic_psi_identity(orbit: PeriodicOrbit, n: int = 1000, resolution: int = 128,
                          seed: Optional[int] = None, progress: bool = True) -> PeriodicIdentityReport:
    """E[psi] over a periodic orbit against (2(N+1)/L^2) times the energy of one cell."""
    mc = expectation(orbit, psi, n, seed=seed, name='psi', progress=progress)
    cell = energy_integral(orbit.curve, Square(0j, orbit.L), resolution)
    factor = 2.0 * (orbit.N + 1) / orbit.L ** 2
    return PeriodicIdentityReport(mc, factor * cell.value, factor * cell.error_bound)
