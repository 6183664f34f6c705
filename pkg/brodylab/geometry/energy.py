"""Energy integrals, energy density and the potentials built from |df|^2."""
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..common.errors import InvalidParameterError, UnsupportedCurveError
from ..common.parallel import map_ordered, ordered_sum, row_blocks
from .curves import Constant, CurveRep, Square, evaluate_many, lipschitz_field
from .projective import fs_distance_array

logger = logging.getLogger(__name__)


@dataclass
class GridField:
    """Midpoint samples of |df|^2 on a square, indexed [row(y), col(x)]."""
    square: Square
    resolution: int
    values: np.ndarray
    row_sums: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.resolution < 2:
            raise InvalidParameterError(f"grid resolution must be at least 2, got {self.resolution}")

    @classmethod
    def sample(cls, curve: CurveRep, square: Square, resolution: int) -> 'GridField':
        """Sample |df|^2 at the cell midpoints, row blocks in parallel."""
        pts = square.midpoints(resolution)
        blocks = row_blocks(resolution)
        rows = map_ordered(lambda sl: lipschitz_field(curve, pts[sl]), blocks)
        values = np.concatenate(rows, axis=0)
        return cls(square, resolution, values, row_sums=np.array([r.sum() for r in rows]))

    @property
    def spacing(self) -> float:
        return self.square.side / self.resolution

    def integral(self) -> float:
        partials = self.row_sums if self.row_sums is not None else [self.values.sum()]
        return ordered_sum(partials) * self.spacing ** 2

    def max(self) -> float:
        return float(np.max(self.values))

    def to_csv(self, path: str) -> None:
        pts = self.square.midpoints(self.resolution).reshape(-1)
        table = np.column_stack([pts.real, pts.imag, self.values.reshape(-1)])
        np.savetxt(path, table, delimiter=',', header='re,im,df2', comments='', fmt='%.17g')


@dataclass
class EnergyEstimate:
    value: float
    error_bound: float
    resolution: int


def energy_integral(curve: CurveRep, square: Square, resolution: int = 128) -> EnergyEstimate:
    """Midpoint-rule integral of |df|^2 over a square.

    The error bound is the difference to the same rule at half the resolution.

    Raises:
        InvalidParameterError: if resolution < 8.
    """
    if resolution < 8:
        raise InvalidParameterError(f"energy quadrature needs resolution >= 8, got {resolution}")
    if isinstance(curve, Constant):
        return EnergyEstimate(0.0, 0.0, resolution)
    fine = GridField.sample(curve, square, resolution).integral()
    coarse = GridField.sample(curve, square, resolution // 2).integral()
    return EnergyEstimate(fine, abs(fine - coarse), resolution)


@dataclass(frozen=True)
class TranslationSearch:
    """Translation grid for the sup over squares.

    Args:
        resolution: quadrature samples per side of an L-square (multiple of 16).
        coarse: the coarse corner step is L / coarse.
        refine: the refinement corner step is L / refine.
        domain: square of admissible corners; derived from the curve when None.
    """
    resolution: int = 64
    coarse: int = 4
    refine: int = 16
    domain: Optional[Square] = None

    def __post_init__(self):
        if self.resolution % self.refine or self.resolution % self.coarse or self.refine % self.coarse:
            raise InvalidParameterError(f"resolution {self.resolution} must be a multiple of the refine "
                                        f"factor {self.refine}, itself a multiple of {self.coarse}")


@dataclass
class DensityEstimate:
    """Largest square average of |df|^2 found by the search; a lower bound on the sup."""
    value: float
    L: float
    corner: complex
    domain: Optional[Square]


def _search_domain(curve: CurveRep, L: float) -> Square:
    period = curve.period()
    if period is not None:
        return Square(0j, period)
    carrier = curve.carrier()
    if carrier is None:
        raise UnsupportedCurveError(f"{type(curve).__name__} has no bounded translation search domain")
    return Square(carrier.corner - L * (1 + 1j), carrier.side + L)


def energy_density(curve: CurveRep, L: float, search: Optional[TranslationSearch] = None) -> DensityEstimate:
    """sup over corners a of (1/L^2) * energy on a + [0, L]^2, by a coarse-then-refined corner grid.

    One |df|^2 field covers every candidate square; square sums come from its
    summed-area table.

    Raises:
        InvalidParameterError: if L < 1.
        UnsupportedCurveError: if the curve has neither a carrier nor a period.
    """
    if L < 1:
        raise InvalidParameterError(f"energy density needs L >= 1, got {L}")
    search = search or TranslationSearch()
    if isinstance(curve, Constant):
        return DensityEstimate(0.0, L, 0j, None)
    domain = search.domain or _search_domain(curve, L)

    res = search.resolution
    h = L / res
    n_corner = int(math.ceil(domain.side / h))
    n = n_corner + res
    region = Square(domain.corner, n * h)
    fld = GridField.sample(curve, region, n)
    sat = np.zeros((n + 1, n + 1))
    sat[1:, 1:] = np.cumsum(np.cumsum(fld.values, axis=0), axis=1)

    def square_sum(i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return sat[i + res, j + res] - sat[i, j + res] - sat[i + res, j] + sat[i, j]

    step = res // search.coarse
    idx = np.arange(0, n_corner + 1, step)
    I, J = np.meshgrid(idx, idx, indexing='ij')
    sums = square_sum(I, J)
    bi, bj = np.unravel_index(int(np.argmax(sums)), sums.shape)
    ci, cj = int(idx[bi]), int(idx[bj])

    fine = res // search.refine
    local = np.arange(-step, step + 1, fine)
    li = np.clip(ci + local, 0, n_corner)
    lj = np.clip(cj + local, 0, n_corner)
    I, J = np.meshgrid(li, lj, indexing='ij')
    sums = square_sum(I, J)
    bi, bj = np.unravel_index(int(np.argmax(sums)), sums.shape)
    row, col = int(li[bi]), int(lj[bj])
    value = float(sums[bi, bj]) * h ** 2 / L ** 2
    corner = domain.corner + complex(col * h, row * h)
    logger.debug(f"energy density at L={L}: {value:.6g} at corner {corner}")
    return DensityEstimate(value, L, corner, domain)


# -- potentials -------------------------------------------------------------

def psi(curve: CurveRep) -> float:
    """2(N+1) |df|^2(0)."""
    return 2.0 * (curve.N + 1) * float(lipschitz_field(curve, 0j))


def psi1(curve: CurveRep, resolution: int = 64) -> float:
    """2(N+1) times the energy on the unit square [0, 1]^2."""
    return 2.0 * (curve.N + 1) * energy_integral(curve, Square(0j, 1.0), resolution).value


def disk_energy_profile(curve: CurveRep, R: float, resolution: int = 16,
                        min_angles: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """Energy of the disks |z| < r at the ring boundaries r = b / resolution.

    Rings are sampled at their mid-radius with an angular count proportional to the
    circumference, so a larger R only appends rings.

    Returns:
        Tuple[np.ndarray, np.ndarray]: boundaries r_b and energies E(r_b), E(0) = 0.
    """
    if resolution < 1:
        raise InvalidParameterError(f"radial resolution must be positive, got {resolution}")
    dr = 1.0 / resolution
    n_rings = int(math.ceil(R * resolution - 1e-9))
    mids = (np.arange(n_rings) + 0.5) * dr
    counts = np.maximum(min_angles, np.ceil(2.0 * math.pi * mids * resolution).astype(int))
    if isinstance(curve, Constant):
        return np.arange(n_rings + 1) * dr, np.zeros(n_rings + 1)

    def ring_energy(ring_slice: slice) -> np.ndarray:
        out = np.empty(ring_slice.stop - ring_slice.start)
        for k, i in enumerate(range(ring_slice.start, ring_slice.stop)):
            theta = (np.arange(counts[i]) + 0.5) * (2.0 * math.pi / counts[i])
            vals = lipschitz_field(curve, mids[i] * np.exp(1j * theta))
            out[k] = vals.sum() * (2.0 * math.pi / counts[i]) * mids[i] * dr
        return out

    rings = np.concatenate(map_ordered(ring_energy, row_blocks(n_rings, 16)))
    energies = np.concatenate([[0.0], np.cumsum(rings)])
    return np.arange(n_rings + 1) * dr, energies


def psi2(curve: CurveRep, resolution: int = 64) -> float:
    """(2(N+1)/pi) times the energy on the unit disk."""
    _, energies = disk_energy_profile(curve, 1.0, resolution)
    return 2.0 * (curve.N + 1) / math.pi * float(energies[-1])


def nsa_characteristic(curve: CurveRep, R: float, resolution: int = 16) -> float:
    """T(R, f) = integral from 1 to R of E(r) dr / r, E(r) the energy of |z| < r.

    Raises:
        InvalidParameterError: if R <= 1.
    """
    return characteristic_ladder(curve, [R], resolution)[0]


def characteristic_ladder(curve: CurveRep, radii: Sequence[float], resolution: int = 16) -> List[float]:
    """T(R, f) for every R of a ladder from one disk-energy profile."""
    if not radii or min(radii) <= 1:
        raise InvalidParameterError(f"characteristic needs every R > 1, got {list(radii)}")
    bounds, energies = disk_energy_profile(curve, max(radii), resolution)
    out = []
    for R in radii:
        upto = (bounds > 1.0) & (bounds < R)
        r = np.concatenate([[1.0], bounds[upto], [R]])
        e = np.interp(r, bounds, energies)
        out.append(float(trapezoid(e / r, r)))
    return out


def normalized_characteristic(curve: CurveRep, R: float, resolution: int = 16) -> float:
    """(4(N+1)/(pi R^2)) T(R, f), whose mean tends to the mean of psi."""
    return 4.0 * (curve.N + 1) / (math.pi * R ** 2) * nsa_characteristic(curve, R, resolution)


@dataclass
class InsensitivityProfile:
    sides: List[float]
    differences: List[float]
    exponent: float
    sup_distance: float
    floor: float

    @property
    def below_floor(self) -> bool:
        return max(self.differences) <= self.floor

    @property
    def linear(self) -> bool:
        return self.below_floor or self.exponent <= 1.2

    def to_dict(self) -> Dict[str, object]:
        return {'sides': self.sides, 'differences': self.differences, 'exponent': self.exponent,
                'sup_distance': self.sup_distance, 'linear': self.linear}


def energy_insensitivity_profile(f: CurveRep, g: CurveRep, sides: Sequence[float] = (4, 8, 16, 32),
                                 center: complex = 0j, resolution: int = 128,
                                 floor: float = 1e-10) -> InsensitivityProfile:
    """Energy differences of two nearby curves over centred squares of growing side.

    The growth exponent is the least-squares slope of log difference against log side.
    """
    diffs = []
    for side in sides:
        sq = Square(complex(center) - side / 2.0 * (1 + 1j), float(side))
        ef = GridField.sample(f, sq, resolution).integral()
        eg = GridField.sample(g, sq, resolution).integral()
        diffs.append(abs(ef - eg))
    big = Square(complex(center) - max(sides) / 2.0 * (1 + 1j), float(max(sides)))
    pts = big.lattice(resolution)
    sup = float(np.max(fs_distance_array(evaluate_many(f, pts), evaluate_many(g, pts))))
    logs = np.log(np.maximum(np.asarray(diffs), floor))
    exponent = float(np.polyfit(np.log(np.asarray(sides, dtype=float)), logs, 1)[0])
    return InsensitivityProfile([float(s) for s in sides], diffs, exponent, sup, floor)
