"""Grid certification of the Brody bound and of nondegeneracy.

``brody_verify`` follows a verify/refine loop: a global grid scan proposes the
largest local maxima of |df| as candidate counterexamples, and each candidate is
refined by zooming a local grid onto its argmax until the local maximum is
stable. Sampled values are genuine values of |df|, so a sample above the bound
is a witness of failure; a pass relies on refinement convergence.
"""
import math
import time
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import ndimage

from ..common.errors import InvalidParameterError
from ..common.parallel import map_ordered
from ..geometry.curves import Constant, CurveRep, Square, lipschitz_field
from ..geometry.energy import GridField

logger = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE = 'pass', 'fail', 'inconclusive'


@dataclass
class RefinementStep:
    """One zoom round around a candidate."""
    candidate: int
    window: float
    local_max: float
    change: float


@dataclass
class BrodyCertificate:
    """Outcome of a Brody certification.

    Attributes:
        max_df: largest sampled |df|.
        uncertainty: last change of the refined maximum.
        verdict: 'pass', 'fail' or 'inconclusive'.
        argmax: point where max_df was sampled.
        resolution: global scan resolution.
        refinements: zoom rounds used by the slowest candidate.
        margin: tolerance above 1.
        region: scanned square.
    """
    max_df: float
    uncertainty: float
    verdict: str
    argmax: complex
    resolution: int
    refinements: int
    margin: float
    region: Square
    runtime_seconds: float = 0.0
    history: List[RefinementStep] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> Dict[str, Any]:
        return {'max_df': self.max_df, 'uncertainty': self.uncertainty, 'verdict': self.verdict,
                'argmax': [self.argmax.real, self.argmax.imag], 'resolution': self.resolution,
                'refinements': self.refinements, 'margin': self.margin, 'region': self.region.to_dict()}


def _candidates(values: np.ndarray, top_k: int) -> List[tuple]:
    """Grid indices of the largest local maxima, largest first."""
    peaks = values == ndimage.maximum_filter(values, size=3, mode='nearest')
    rows, cols = np.nonzero(peaks)
    order = np.argsort(-values[rows, cols], kind='stable')[:top_k]
    return [(int(rows[i]), int(cols[i])) for i in order]


def _zoom(curve: CurveRep, center: complex, window: float, local_resolution: int):
    sq = Square(center - window / 2.0 * (1 + 1j), window)
    pts = sq.lattice(local_resolution)
    vals = lipschitz_field(curve, pts)
    k = int(np.argmax(vals))
    return float(math.sqrt(vals.reshape(-1)[k])), complex(pts.reshape(-1)[k])


def brody_verify(curve: CurveRep, region: Square, resolution: int = 256, margin: float = 1e-6,
                 top_k: int = 16, local_resolution: int = 16, max_refinements: int = 24) -> BrodyCertificate:
    """Certify max |df| <= 1 + margin on a region by scan and local refinement.

    Every candidate window starts at two coarse cells and halves each round
    around the current local argmax, so the effective resolution doubles; a
    candidate is stable once its maximum changes by less than margin/10.

    A zoomed maximum is accepted only when it has settled: the last change of
    every candidate becomes the certificate's uncertainty, and PASS needs
    max + uncertainty <= 1 + margin. A candidate still moving after
    ``max_refinements`` rounds makes the verdict INCONCLUSIVE. Scan cells that
    are not among the ``top_k`` local maxima are bounded by their sampled
    values only, so the scan spacing must be small against the scale on which
    |df| varies (about 1 / max |df| for a curve close to the bound).

    Args:
        curve: the curve to certify.
        region: square covering the curve's carrier plus a halo.
        resolution: samples per side of the global scan.
        margin: tolerance above the Brody bound.
        top_k: number of local maxima refined.
        local_resolution: grid intervals per side of a zoom window.
        max_refinements: zoom rounds per candidate before giving up.

    Returns:
        BrodyCertificate: the verdict with its witness.
    """
    if resolution < 8:
        raise InvalidParameterError(f"scan resolution must be at least 8, got {resolution}")
    if not margin > 0:
        raise InvalidParameterError(f"certification margin must be positive, got {margin}")
    start = time.time()
    if isinstance(curve, Constant):
        return BrodyCertificate(0.0, 0.0, PASS, region.corner, resolution, 0, margin, region,
                                time.time() - start)

    scan = GridField.sample(curve, region, resolution)
    pts = region.midpoints(resolution)
    h = scan.spacing
    best = float(math.sqrt(scan.max()))
    best_at = complex(pts.reshape(-1)[int(np.argmax(scan.values))])
    uncertainty = 0.0
    rounds_used = 0
    stable = True
    history = []
    tol = margin / 10.0

    for idx, (i, j) in enumerate(_candidates(scan.values, top_k)):
        center = complex(pts[i, j])
        window = 2.0 * h
        previous = math.sqrt(float(scan.values[i, j]))
        change = math.inf
        for step in range(1, max_refinements + 1):
            local_max, center = _zoom(curve, center, window, local_resolution)
            change = abs(local_max - previous)
            history.append(RefinementStep(idx, window, local_max, change))
            previous = local_max
            window /= 2.0
            if local_max > best:
                best, best_at = local_max, center
            if change < tol:
                break
        rounds_used = max(rounds_used, step)
        if change >= tol:
            stable = False
        uncertainty = max(uncertainty, change)
        logger.debug(f"candidate {idx} at {center}: |df| = {previous:.12g} after {step} rounds")

    if best > 1.0 + margin:
        verdict = FAIL
    elif stable and best + uncertainty <= 1.0 + margin:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
        logger.warning(f"Brody certification inconclusive: max |df| = {best:.9g}, uncertainty {uncertainty:.3g}")
    return BrodyCertificate(best, uncertainty, verdict, best_at, resolution, rounds_used, margin, region,
                            time.time() - start, history)


@dataclass
class NondegeneracyReport:
    """``nondegenerate`` is True when every scanned centre sees |df| >= 1/R within distance R."""
    nondegenerate: bool
    witness: Optional[complex]
    R: float
    centers_checked: int
    region: Square

    def __bool__(self):
        return self.nondegenerate

    def to_dict(self) -> Dict[str, Any]:
        witness = None if self.witness is None else [self.witness.real, self.witness.imag]
        return {'nondegenerate': self.nondegenerate, 'witness': witness, 'R': self.R,
                'centers_checked': self.centers_checked, 'region': self.region.to_dict()}


def nondegeneracy_check(curve: CurveRep, R: float, region: Square, resolution: int = 128) -> NondegeneracyReport:
    """Check max over |z - a| <= R of |df| >= 1/R for the grid centres a of a region.

    The set {|df| >= 1/R} is sampled on a grid extended by R around the region
    and dilated by a disk of radius R; a centre passes iff the dilation covers it.
    Only the scanned region is certified.

    Raises:
        InvalidParameterError: if R <= 0 or resolution < 2.
    """
    if not R > 0:
        raise InvalidParameterError(f"nondegeneracy radius must be positive, got {R}")
    if resolution < 2:
        raise InvalidParameterError(f"scan resolution must be at least 2, got {resolution}")
    h = region.side / resolution
    halo = int(math.ceil(R / h))
    n = resolution + 2 * halo
    grid = Square(region.corner - halo * h * (1 + 1j), n * h).lattice(n)
    centers = slice(halo, halo + resolution + 1)

    if isinstance(curve, Constant):
        hit = np.zeros(grid.shape, dtype=bool)
    else:
        rows = map_ordered(lambda r: lipschitz_field(curve, r), list(grid))
        hit = np.vstack(rows) >= 1.0 / R ** 2

    k = np.arange(-halo, halo + 1)
    disk = (k[:, None] ** 2 + k[None, :] ** 2) * h ** 2 <= R ** 2
    covered = ndimage.binary_dilation(hit, structure=disk)[centers, centers]
    failing = np.argwhere(~covered)
    witness = None
    if failing.size:
        i, j = failing[0]
        witness = complex(grid[centers, centers][i, j])
    return NondegeneracyReport(witness is None, witness, float(R), int(covered.size), region)
