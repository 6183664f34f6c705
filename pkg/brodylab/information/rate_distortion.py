"""Rate-distortion functions by Blahut-Arimoto, with a brute-force oracle.

The iteration is parameterised by the slope s >= 0 of the Lagrangian I + s D
(s in nats per unit distortion): with A = exp(-s d) and the reproduction law q,

    alpha_x = sum_y q_y A_xy,   c_y = sum_x p_x A_xy / alpha_x,   q <- q c.

A distortion target is met by root finding on log s.
"""
import itertools
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import fft as sp_fft
from scipy.optimize import brentq
from scipy.special import rel_entr

from ..common.errors import InfeasibleError, InvalidParameterError, NumericError, ValidationError
from ..common.parallel import map_ordered, thread_count
from .entropy import DistortionMatrix, Pmf
from .quantizers import GridSource

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
KERNEL_CUTOFF = 40.0


@dataclass
class BAResult:
    """One point of the rate-distortion curve."""
    distortion: float
    rate: float
    slope: float
    iterations: int
    converged: bool
    output: np.ndarray = field(repr=False, default=None)
    conditional: Optional[np.ndarray] = field(repr=False, default=None)

    def to_dict(self) -> Dict[str, Any]:
        return {'distortion': self.distortion, 'rate_bits': self.rate, 'slope': self.slope,
                'iterations': self.iterations, 'converged': self.converged}


def _check_shapes(source: Pmf, d: DistortionMatrix):
    if d.shape[0] != len(source):
        raise ValidationError(f"distortion matrix has {d.shape[0]} rows for a source of size {len(source)}")


def channel_rate(p: np.ndarray, Q: np.ndarray) -> float:
    """I(X; Y) in bits for input law p and channel Q."""
    r = p @ Q
    return max(float(np.sum(p[:, None] * rel_entr(Q, r[None, :]))) / LN2, 0.0)


def blahut_arimoto(source: Pmf, d: DistortionMatrix, slope: float, tol: float = 1e-10,
                   max_iter: int = 10_000, q0: Optional[np.ndarray] = None) -> BAResult:
    """Blahut-Arimoto at a fixed slope.

    Stops when the Lagrangian changes by less than ``tol`` relative to max(1, |value|);
    after ``max_iter`` iterations the result is flagged unconverged.

    Raises:
        InvalidParameterError: if slope < 0.
        ValidationError: if the shapes disagree.
    """
    if not slope >= 0:
        raise InvalidParameterError(f"slope must be nonnegative, got {slope}")
    _check_shapes(source, d)
    p = source.probs
    dm = d.matrix
    # row shift keeps A in (0, 1] without changing Q or c
    A = np.exp(-slope * (dm - dm.min(axis=1, keepdims=True)))
    q = np.full(dm.shape[1], 1.0 / dm.shape[1]) if q0 is None else np.asarray(q0, dtype=float).copy()
    live = p > 0

    objective = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        alpha = A @ q
        c = (p[live] / alpha[live]) @ A[live]
        q = q * c
        q /= q.sum()
        value = -float(np.sum(p[live] * np.log(alpha[live])))
        if abs(value - objective) <= tol * max(1.0, abs(value)):
            converged = True
            break
        objective = value
        if it % 1000 == 0:
            logger.debug(f"BA slope {slope:.6g}: iteration {it}, objective {value:.15g}")
    if not converged:
        logger.warning(f"Blahut-Arimoto did not converge in {max_iter} iterations at slope {slope:.6g}")

    alpha = A @ q
    Q = A * q[None, :] / alpha[:, None]
    Q[~live] = 1.0 / dm.shape[1]
    D = float(np.sum(p[:, None] * Q * dm))
    return BAResult(D, channel_rate(p, Q), float(slope), it, converged, q, Q)


def distortion_range(source: Pmf, d: DistortionMatrix):
    """(D_min, D_max): the least achievable distortion and the distortion of the best constant code."""
    _check_shapes(source, d)
    p = source.probs
    return float(p @ d.matrix.min(axis=1)), float(np.min(p @ d.matrix))


def _root_on_log_slope(run, target: float, lo: float, hi: float, what: str, factor: float = 10.0,
                       xtol: float = 1e-6):
    """Find s with D(s) = target; D is nonincreasing in s.

    The bracket widens by ``factor`` until it holds the target.

    Raises:
        NumericError: if a run yields a non-finite distortion or the target cannot be bracketed.
    """
    cache = {}

    def gap(log_s: float) -> float:
        res = run(math.exp(log_s))
        if not math.isfinite(res.distortion):
            raise NumericError(f"{what}: non-finite distortion at slope {math.exp(log_s):.6g}")
        cache[log_s] = res
        return res.distortion - target

    g_lo = gap(math.log(lo))
    while g_lo < 0 and lo > 1e-12:
        lo /= factor
        g_lo = gap(math.log(lo))
    g_hi = gap(math.log(hi))
    while g_hi > 0 and hi < 1e12:
        hi *= factor
        g_hi = gap(math.log(hi))
    if g_lo < 0 or g_hi > 0:
        raise NumericError(f"{what}: distortion target {target} not bracketed by slopes [{lo:.3g}, {hi:.3g}]")
    try:
        log_s = brentq(gap, math.log(lo), math.log(hi), xtol=xtol, rtol=1e-10, maxiter=200)
    except (ValueError, RuntimeError) as err:
        raise NumericError(f"{what}: root search on the slope failed: {err}") from err
    return cache.get(log_s) or run(math.exp(log_s))


def rate_at_distortion(source: Pmf, d: DistortionMatrix, target: float, tol: float = 1e-10) -> BAResult:
    """The rate-distortion point with distortion ``target``.

    Raises:
        InfeasibleError: if target < D_min.
    """
    d_min, d_max = distortion_range(source, d)
    if target < d_min - 1e-12:
        raise InfeasibleError(f"distortion {target} is below the minimum achievable {d_min}")
    if target >= d_max:
        y = int(np.argmin(source.probs @ d.matrix))
        Q = np.zeros(d.shape)
        Q[:, y] = 1.0
        return BAResult(d_max, 0.0, 0.0, 0, True, Q[0].copy(), Q)
    if target <= d_min + 1e-12:
        return blahut_arimoto(source, d, 1e4, tol)
    scale = float(np.max(d.matrix)) or 1.0
    return _root_on_log_slope(lambda s: blahut_arimoto(source, d, s, tol), target, 1e-3 / scale,
                              1e3 / scale, 'rate_at_distortion')


# -- brute force ------------------------------------------------------------

def _simplex_grid(m: int, n: int) -> np.ndarray:
    """All points of the probability simplex in R^m with coordinates in (1/n) Z."""
    rows = [c for c in itertools.product(range(n + 1), repeat=m - 1) if sum(c) <= n]
    counts = np.array(rows, dtype=float).reshape(len(rows), m - 1)
    return np.column_stack([counts, n - counts.sum(axis=1)]) / n


def _rates(p: np.ndarray, Qs: np.ndarray) -> np.ndarray:
    r = np.einsum('x,kxy->ky', p, Qs)
    return np.sum(p[None, :, None] * rel_entr(Qs, r[:, None, :]), axis=(1, 2)) / LN2


def rd_brute_force(source: Pmf, d: DistortionMatrix, D: float, coarse: int = 0,
                   final_step: float = 1e-5, chunk: int = 200_000) -> float:
    """Minimum mutual information over a zooming grid of channels meeting the budget.

    A coarse simplex grid per row is followed by pattern search: every row moves
    by -2..2 steps along each simplex coordinate, all rows jointly, and the step
    halves when no move improves, down to ``final_step``. Candidates over the
    budget are pulled back onto it by mixing with the min-distortion channel.

    Raises:
        InvalidParameterError: if |X| * |Y| > 9.
        InfeasibleError: if D is below the minimum achievable distortion.
    """
    _check_shapes(source, d)
    k, m = d.shape
    if k * m > 9:
        raise InvalidParameterError(f"brute force is limited to |X| * |Y| <= 9, got {k} x {m}")
    d_min, d_max = distortion_range(source, d)
    if D < d_min - 1e-12:
        raise InfeasibleError(f"distortion {D} is below the minimum achievable {d_min}")
    if D >= d_max:
        return 0.0
    D = max(D, d_min)
    p = source.probs
    dm = d.matrix

    # the min-distortion deterministic channel is always feasible
    floor = np.zeros((k, m))
    floor[np.arange(k), dm.argmin(axis=1)] = 1.0

    def feasible_best(Qs: np.ndarray):
        if not len(Qs):
            return None, math.inf
        # channels over budget are mixed with the floor channel onto the boundary D(Q) = D
        dist = np.einsum('x,kxy,xy->k', p, Qs, dm)
        over = dist > D
        theta = np.zeros_like(dist)
        theta[over] = (dist[over] - D) / (dist[over] - d_min)
        Qs = (1.0 - theta)[:, None, None] * Qs + theta[:, None, None] * floor
        rates = _rates(p, Qs)
        i = int(np.argmin(rates))
        return Qs[i], float(rates[i])

    best = floor.copy()
    best_rate = float(_rates(p, best[None])[0])

    n = coarse or {2: 40, 3: 12}.get(m, 20)
    rows = _simplex_grid(m, n)
    idx = np.indices((len(rows),) * k).reshape(k, -1).T
    for start in range(0, len(idx), chunk):
        Qs = rows[idx[start:start + chunk]]
        cand, rate = feasible_best(Qs)
        if rate < best_rate:
            best, best_rate = cand, rate

    step = 1.0 / n
    moves = np.array(np.meshgrid(*([np.arange(-2, 3)] * (m - 1)), indexing='ij')).reshape(m - 1, -1).T
    row_moves = np.concatenate([moves, -moves.sum(axis=1, keepdims=True)], axis=1)
    combo = np.indices((len(row_moves),) * k).reshape(k, -1).T
    while step >= final_step:
        Qs = best[None] + step * row_moves[combo]
        Qs = Qs[np.all(Qs >= -1e-15, axis=(1, 2))]
        Qs = np.clip(Qs, 0.0, 1.0)
        cand, rate = feasible_best(Qs)
        if rate < best_rate - 1e-15:
            best, best_rate = cand, rate
        else:
            step /= 2.0
    return max(best_rate, 0.0)


# -- curves and slopes ------------------------------------------------------

@dataclass
class RDEstimate:
    """Rate against distortion with the least-squares fit of rate on log2(1/eps)."""
    distortions: List[float]
    rates: List[float]
    slope: float
    intercept: float
    fit_residual: float
    points: List[BAResult] = field(default_factory=list, repr=False)

    @property
    def nonincreasing(self) -> bool:
        order = np.argsort(self.distortions)
        r = np.asarray(self.rates)[order]
        return bool(np.all(np.diff(r) <= 1e-9))

    @property
    def convex(self) -> bool:
        """Every interior point lies on or below the chord of its neighbours."""
        order = np.argsort(self.distortions)
        D = np.asarray(self.distortions, dtype=float)[order]
        R = np.asarray(self.rates, dtype=float)[order]
        for i in range(1, len(D) - 1):
            w = (D[i] - D[i - 1]) / (D[i + 1] - D[i - 1])
            if R[i] > (1 - w) * R[i - 1] + w * R[i + 1] + 1e-6:
                return False
        return True

    def to_csv(self, path: str) -> None:
        table = np.column_stack([self.distortions, self.rates])
        np.savetxt(path, table, delimiter=',', header='distortion,rate_bits', comments='', fmt='%.17g')

    def fit_summary(self) -> Dict[str, float]:
        return {'slope': self.slope, 'intercept': self.intercept, 'residual': self.fit_residual}

    def to_dict(self) -> Dict[str, Any]:
        return {'distortions': self.distortions, 'rates_bits': self.rates, **self.fit_summary()}


def fit_rate_slope(eps: Sequence[float], rates: Sequence[float]):
    """Least-squares line rate = slope * log2(1/eps) + intercept; returns (slope, intercept, rms residual)."""
    x = np.log2(1.0 / np.asarray(eps, dtype=float))
    y = np.asarray(rates, dtype=float)
    if x.size < 3:
        raise InvalidParameterError(f"slope fit needs at least 3 points, got {x.size}")
    (slope, intercept), *_ = np.linalg.lstsq(np.column_stack([x, np.ones_like(x)]), y, rcond=None)
    residual = float(np.sqrt(np.mean((slope * x + intercept - y) ** 2)))
    return float(slope), float(intercept), residual


def rdim_slope(est: RDEstimate) -> float:
    return est.slope


def check_ladder(eps_ladder: Sequence[float]) -> List[float]:
    ladder = [float(e) for e in eps_ladder]
    if len(ladder) < 3:
        raise InvalidParameterError(f"an eps ladder needs at least 3 levels, got {len(ladder)}")
    if any(not e > 0 for e in ladder):
        raise InvalidParameterError(f"eps levels must be positive, got {ladder}")
    return ladder


def _estimate(ladder: List[float], results: List[BAResult]) -> RDEstimate:
    rates = [r.rate for r in results]
    slope, intercept, residual = fit_rate_slope(ladder, rates)
    return RDEstimate(ladder, rates, slope, intercept, residual, results)


def rd_curve(source: Union[Pmf, GridSource], d: Optional[DistortionMatrix], eps_ladder: Sequence[float],
             **kwargs) -> RDEstimate:
    """Rates at every distortion of a ladder.

    Dense instances run the ladder in parallel; a ``GridSource`` runs the
    FFT iteration sequentially with warm starts.
    """
    ladder = check_ladder(eps_ladder)
    if isinstance(source, GridSource):
        results = []
        q = None
        for eps in ladder:
            res = grid_rate_at_distortion(source, eps, q0=q, **kwargs)
            q = res.output
            results.append(res)
    else:
        results = map_ordered(lambda e: rate_at_distortion(source, d, e, **kwargs), ladder)
    return _estimate(ladder, results)


# -- translation-invariant grid sources -------------------------------------

WARM_MIX = 0.05


def _kernels(source: GridSource, slope: float):
    radius = KERNEL_CUTOFF / slope if slope > 0 else math.inf
    dist = source.offsets(min(radius, source.diameter))
    K = np.exp(-slope * dist)
    K[slope * dist > KERNEL_CUTOFF] = 0.0
    return K, K * dist


class _KernelConvolution:
    """'same'-mode convolution of grid arrays with one odd-sized kernel, whose spectrum is computed once."""

    def __init__(self, shape, kernel: np.ndarray):
        self.workers = thread_count()
        self.fshape = [sp_fft.next_fast_len(n + m - 1, real=True) for n, m in zip(shape, kernel.shape)]
        self.spectrum = sp_fft.rfftn(kernel, self.fshape, workers=self.workers)
        self.window = tuple(slice((m - 1) // 2, (m - 1) // 2 + n) for n, m in zip(shape, kernel.shape))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        full = sp_fft.irfftn(sp_fft.rfftn(x, self.fshape, workers=self.workers) * self.spectrum, self.fshape,
                             workers=self.workers)
        return full[self.window]


def blahut_arimoto_grid(source: GridSource, slope: float, tol: float = 1e-9, max_iter: int = 5000,
                        q0: Optional[np.ndarray] = None) -> BAResult:
    """Blahut-Arimoto for a uniform grid source with distortion d(x - y), by FFT convolution.

    Reproduction letters are the points of the source's bounding-box grid; the
    kernel exp(-s d) is truncated where s d > 40. A warm start ``q0`` is mixed
    with the source law so no live point loses reproduction mass near it.

    Raises:
        InvalidParameterError: if slope <= 0.
        NumericError: if the iteration leaves the finite range.
    """
    if not slope > 0:
        raise InvalidParameterError(f"grid iteration needs a positive slope, got {slope}")
    p = source.probs
    live = p > 0
    K, Kd = _kernels(source, slope)
    conv = _KernelConvolution(p.shape, K)
    if q0 is None:
        q = p.copy()
    else:
        q = (1.0 - WARM_MIX) * np.asarray(q0, dtype=float) + WARM_MIX * p
    tiny = np.finfo(float).tiny

    objective = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        alpha = np.maximum(conv(q), tiny)
        ratio = np.where(live, p / alpha, 0.0)
        c = np.maximum(conv(ratio), 0.0)
        q = q * c
        total = float(q.sum())
        if not (math.isfinite(total) and total > 0):
            raise NumericError(f"grid Blahut-Arimoto left the finite range at slope {slope:.6g}, iteration {it}")
        q /= total
        value = -float(np.sum(p[live] * np.log(alpha[live])))
        if abs(value - objective) <= tol * max(1.0, abs(value)):
            converged = True
            break
        objective = value
    if not converged:
        logger.warning(f"grid Blahut-Arimoto did not converge in {max_iter} iterations at slope {slope:.6g}")

    alpha = np.maximum(conv(q), tiny)
    ratio = np.where(live, p / alpha, 0.0)
    D = float(np.sum(ratio * _KernelConvolution(p.shape, Kd)(q)))
    rate_nats = -slope * D - float(np.sum(p[live] * np.log(alpha[live])))
    if not (math.isfinite(D) and math.isfinite(rate_nats)):
        raise NumericError(f"grid Blahut-Arimoto produced a non-finite point at slope {slope:.6g}")
    logger.debug(f"grid BA slope {slope:.6g}: {it} iterations, D={D:.6g}, rate={rate_nats / LN2:.6g} bits")
    return BAResult(D, max(rate_nats / LN2, 0.0), float(slope), it, converged, q)


def grid_rate_at_distortion(source: GridSource, target: float, q0: Optional[np.ndarray] = None,
                            tol: float = 1e-9, max_iter: int = 5000) -> BAResult:
    """Rate of a grid source at distortion ``target``.

    The rate is 0 from the distortion of the best central constant code on. The
    slope search starts at ndim / target, the slope at which an exponential
    kernel in ndim dimensions has mean distance ``target``, and widens by
    factors of 2, so fine targets never build kernels spanning the whole set.

    Raises:
        InvalidParameterError: if target <= 0.
        NumericError: if the iteration or the slope search fails.
    """
    if not target > 0:
        raise InvalidParameterError(f"distortion target must be positive, got {target}")
    if target >= source.constant_code_distortion:
        return BAResult(source.constant_code_distortion, 0.0, 0.0, 0, True, source.probs.copy())
    warm = {'q': q0}

    def run(s: float) -> BAResult:
        res = blahut_arimoto_grid(source, s, tol, max_iter, warm['q'])
        warm['q'] = res.output
        return res

    s0 = source.ndim / target
    return _root_on_log_slope(run, target, s0 / 2.0, 2.0 * s0, 'grid_rate_at_distortion', factor=2.0, xtol=1e-4)
