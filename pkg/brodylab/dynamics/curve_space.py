"""Dynamical metrics on the space of curves, as certified grid brackets.

Every metric is a functional of D(z) = d_FS(f(z), g(z)) sampled at the grid
points z = h (i + j i), h = 1/m, of the square [0, L+1]^2:

    d          max of D over [0, 1]^2
    d_L        max over u in [0, L]^2 of d(T^u f, T^u g) = max of D over [0, L+1]^2
    dbar_L     (1/L^2) * integral over u in [0, L]^2 of d(T^u f, T^u g)
    dbar1_Z_L  max over integer u in [0, L-1]^2 of the integral over u + [0, 1]^2 of d(T^v f, T^v g)

For Brody curves D is 2-Lipschitz, and every point lies within h/sqrt(2) of a
grid point; grid maxima over points inside a set are lower bounds and grid maxima
over a covering set plus lip * h / sqrt(2) are upper bounds.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..common.errors import InvalidParameterError, ValidationError
from ..common.parallel import map_ordered
from ..geometry.curves import CurveRep, Square, evaluate_many, lipschitz_field, translate
from ..geometry.projective import fs_distance_array

logger = logging.getLogger(__name__)

METRIC_KINDS = ('d', 'd_L', 'dbar_L', 'dbar1_Z_L')


@dataclass
class CurveEnsemble:
    """A finite list of curves with the descriptor of the sampler that drew them."""
    curves: List[CurveRep]
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.curves:
            raise ValidationError("a curve ensemble must not be empty")
        dims = {c.N for c in self.curves}
        if len(dims) != 1:
            raise ValidationError(f"ensemble mixes target dimensions {sorted(dims)}")

    @property
    def N(self) -> int:
        return self.curves[0].N

    def __len__(self):
        return len(self.curves)

    def __getitem__(self, i):
        return self.curves[i]


@dataclass(frozen=True)
class DynMetricSpec:
    """Which dynamical metric, and the grid on which it is bracketed.

    Args:
        kind: one of 'd', 'd_L', 'dbar_L', 'dbar1_Z_L'.
        L: window side (ignored by 'd'); a positive integer.
        grid_spacing: grid step h; 1/h must be an integer >= 2.
        lipschitz: Lipschitz constant of z -> d_FS(f(z), g(z)).
    """
    kind: str = 'd'
    L: int = 1
    grid_spacing: float = 1.0 / 16
    lipschitz: float = 2.0

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise InvalidParameterError(f"unknown metric kind {self.kind!r}; expected one of {METRIC_KINDS}")
        if not self.grid_spacing > 0:
            raise InvalidParameterError(f"grid spacing must be positive, got {self.grid_spacing}")
        m = 1.0 / self.grid_spacing
        if abs(m - round(m)) > 1e-9 or round(m) < 2:
            raise InvalidParameterError(f"1/grid_spacing must be an integer >= 2, got {m}")
        if self.kind != 'd' and (int(self.L) != self.L or self.L < 1):
            raise InvalidParameterError(f"window side must be a positive integer, got {self.L}")

    @property
    def per_unit(self) -> int:
        return int(round(1.0 / self.grid_spacing))

    @property
    def window(self) -> int:
        return 0 if self.kind == 'd' else int(self.L)

    @property
    def margin(self) -> float:
        return self.lipschitz * self.grid_spacing / math.sqrt(2.0)

    def grid(self) -> np.ndarray:
        """Grid points of [0, L+1]^2 indexed [row(y), col(x)]."""
        n = (self.window + 1) * self.per_unit
        return Square(0j, float(self.window + 1)).lattice(n)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'L': self.L, 'grid_spacing': self.grid_spacing,
                'lipschitz': self.lipschitz, 'margin': self.margin}


@dataclass
class MetricBracket:
    lower: float
    upper: float
    wide_margin: bool = False

    @property
    def estimate(self) -> float:
        return self.lower

    def contains(self, value: float, tol: float = 1e-12) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def bracket_from_distances(spec: DynMetricSpec, D: np.ndarray, lipschitz: Optional[float] = None) -> MetricBracket:
    """Bracket the metric of ``spec`` from D sampled on ``spec.grid()``."""
    lip = spec.lipschitz if lipschitz is None else lipschitz
    margin = lip * spec.grid_spacing / math.sqrt(2.0)
    if spec.kind in ('d', 'd_L'):
        lower = float(np.max(D))
        return MetricBracket(lower, lower + margin)

    m = spec.per_unit
    # u-cell k covers [k h, (k+1) h]; u + [0, 1] contains grid indices k+1..k+m and
    # is contained in the span of k..k+m+1
    inner = sliding_window_view(D, (m, m))[1:, 1:]
    outer = sliding_window_view(D, (m + 2, m + 2))
    cells = spec.window * m
    low_cell = inner.max(axis=(-2, -1))[:cells, :cells]
    up_cell = outer.max(axis=(-2, -1))[:cells, :cells] + margin
    if spec.kind == 'dbar_L':
        return MetricBracket(float(low_cell.mean()), float(up_cell.mean()))
    # dbar1_Z_L: block means over the unit squares of integer corners
    L = spec.window
    low_blocks = low_cell.reshape(L, m, L, m).mean(axis=(1, 3))
    up_blocks = up_cell.reshape(L, m, L, m).mean(axis=(1, 3))
    return MetricBracket(float(low_blocks.max()), float(up_blocks.max()))


def _observed_lipschitz(spec: DynMetricSpec, f: CurveRep, g: CurveRep, grid: np.ndarray) -> Tuple[bool, float]:
    df = math.sqrt(float(np.max(lipschitz_field(f, grid))))
    dg = math.sqrt(float(np.max(lipschitz_field(g, grid))))
    if max(df, dg) > 1.0:
        return True, max(spec.lipschitz, df + dg)
    return False, spec.lipschitz


def metric_eval(spec: DynMetricSpec, f: CurveRep, g: CurveRep) -> MetricBracket:
    """Bracket (lower, upper) of the dynamical metric between two curves.

    Raises:
        InvalidParameterError: if the curves live in different dimensions.
    """
    if f.N != g.N:
        raise InvalidParameterError(f"curves live in CP^{f.N} and CP^{g.N}")
    grid = spec.grid()
    D = fs_distance_array(evaluate_many(f, grid), evaluate_many(g, grid))
    wide, lip = _observed_lipschitz(spec, f, g, grid)
    if wide:
        logger.warning(f"sampled |df| exceeds 1; widening the {spec.kind} bracket with Lipschitz bound {lip:.4g}")
    bracket = bracket_from_distances(spec, D, lip)
    bracket.wide_margin = wide
    return bracket


def pairwise_distance_brackets(ensemble: Sequence[CurveRep], spec: DynMetricSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper matrices of the metric over an ensemble.

    Each curve is evaluated once on the grid; rows are filled in parallel.
    """
    curves = list(ensemble)
    grid = spec.grid()
    values = map_ordered(lambda c: evaluate_many(c, grid), curves)
    n = len(curves)

    def row(i: int) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.zeros(n)
        up = np.zeros(n)
        for j in range(i + 1, n):
            b = bracket_from_distances(spec, fs_distance_array(values[i], values[j]))
            lo[j], up[j] = b.lower, b.upper
        return lo, up

    rows = map_ordered(row, range(n))
    lower = np.vstack([r[0] for r in rows])
    upper = np.vstack([r[1] for r in rows])
    lower = lower + lower.T
    upper = upper + upper.T
    np.fill_diagonal(upper, spec.margin)
    return lower, upper


@dataclass
class MetricComparison:
    """Bounds of d on a + [0, L]^2 (a = (1 + i)/2) against 4 dbar1_Z on L+1."""
    L: int
    left: MetricBracket
    right: MetricBracket
    slack: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {'L': self.L, 'left': [self.left.lower, self.left.upper],
                'right': [self.right.lower, self.right.upper], 'slack': self.slack, 'holds': self.holds}


def metric_comparison_check(f: CurveRep, g: CurveRep, L: int, grid_spacing: float = 1.0 / 16,
                            slack: Optional[float] = None) -> MetricComparison:
    """Check left.upper <= 4 right.lower + slack.

    The default slack is the width of the left bracket plus 4 times that of the right
    one, so the check reduces to left.lower <= 4 right.upper: it fails only when the
    brackets prove a violation.
    """
    a = 0.5 + 0.5j
    left = metric_eval(DynMetricSpec('d_L', L, grid_spacing), translate(f, a), translate(g, a))
    right = metric_eval(DynMetricSpec('dbar1_Z_L', L + 1, grid_spacing), f, g)
    if slack is None:
        slack = (left.upper - left.lower) + 4.0 * (right.upper - right.lower)
    holds = left.upper <= 4.0 * right.lower + slack
    return MetricComparison(int(L), left, right, float(slack), bool(holds))
