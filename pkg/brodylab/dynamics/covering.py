"""Covering numbers of finite metric sets, with and without potential.

A piece of a cover is a set of diameter < eps, so covers of a finite set are
clique covers of the graph joining points at distance < eps. Small sets are
solved exactly by backtracking; larger ones by deterministic clique growth,
which never undercuts the optimum.
"""
import math
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ..common.errors import InvalidParameterError, ValidationError

logger = logging.getLogger(__name__)

EXACT_LIMIT = 12
EXACT_LIMIT_WEIGHTED = 10
DEFAULT_LADDER = (0.2, 0.1, 0.05, 0.025)

Metric = Union[str, Callable[[object, object], float]]


def compute_distances(points, metric: Metric = 'euclidean') -> np.ndarray:
    """Pairwise distance matrix; ``metric`` is 'euclidean', 'max' or a callable."""
    if callable(metric):
        pts = list(points)
        n = len(pts)
        D = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = metric(pts[i], pts[j])
        return D
    data = np.asarray(points, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    diff = data[:, np.newaxis] - data
    if metric == 'euclidean':
        return np.linalg.norm(diff, axis=2)
    if metric == 'max':
        return np.max(np.abs(diff), axis=2)
    raise InvalidParameterError(f"unsupported metric {metric!r}: choose 'euclidean', 'max' or a callable")


def _as_distances(points, metric: Optional[Metric]) -> np.ndarray:
    if metric is None:
        D = np.asarray(points, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ValidationError(f"expected a square distance matrix, got shape {D.shape}")
        return D
    return compute_distances(points, metric)


def _grow_clique(adj: np.ndarray, seed: int, candidates: np.ndarray) -> List[int]:
    """Grow a clique from ``seed`` inside the boolean mask ``candidates``."""
    clique = [seed]
    pool = candidates & adj[seed]
    pool[seed] = False
    while pool.any():
        idx = np.flatnonzero(pool)
        degree = (adj[np.ix_(idx, idx)]).sum(axis=1)
        pick = int(idx[int(np.argmax(degree))])
        clique.append(pick)
        pool &= adj[pick]
        pool[pick] = False
    return clique


def greedy_cover(D: np.ndarray, eps: float, mask: Optional[np.ndarray] = None) -> List[List[int]]:
    """Deterministic clique-growth cover of the points selected by ``mask``."""
    n = D.shape[0]
    adj = D < eps
    uncovered = np.ones(n, dtype=bool) if mask is None else mask.copy()
    pieces = []
    while uncovered.any():
        idx = np.flatnonzero(uncovered)
        degree = adj[np.ix_(idx, idx)].sum(axis=1)
        seed = int(idx[int(np.argmax(degree))])
        piece = _grow_clique(adj, seed, uncovered.copy())
        pieces.append(sorted(piece))
        uncovered[piece] = False
    return pieces


def _exact_partition(adj: np.ndarray, cost: Callable[[List[List[int]]], float],
                     incumbent: List[List[int]]) -> List[List[int]]:
    """Cheapest clique partition by backtracking over assignments in index order.

    ``incumbent`` is a known partition whose cost bounds the search.
    """
    n = adj.shape[0]
    best = {'cost': cost(incumbent), 'pieces': incumbent}

    def search(i: int, pieces: List[List[int]]):
        current = cost(pieces)
        if current >= best['cost']:
            return
        if i == n:
            best['cost'] = current
            best['pieces'] = [list(p) for p in pieces]
            return
        for piece in pieces:
            if all(adj[i, j] for j in piece):
                piece.append(i)
                search(i + 1, pieces)
                piece.pop()
        pieces.append([i])
        search(i + 1, pieces)
        pieces.pop()

    search(0, [])
    return best['pieces']


def covering_number(points, eps: float, metric: Optional[Metric] = 'euclidean',
                    exact_limit: int = EXACT_LIMIT) -> int:
    """Minimum number of sets of diameter < eps covering a finite set.

    Exact for at most ``exact_limit`` points, a greedy upper bound beyond.
    ``metric=None`` reads ``points`` as a distance matrix.

    Raises:
        InvalidParameterError: if eps <= 0.
    """
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    D = _as_distances(points, metric)
    if D.shape[0] == 0:
        return 0
    pieces = greedy_cover(D, eps)
    if D.shape[0] <= exact_limit:
        pieces = _exact_partition(D < eps, len, pieces)
    return len(pieces)


def _weighted_cost(phi: np.ndarray, eps: float) -> Callable[[List[List[int]]], float]:
    base = 1.0 / eps
    return lambda pieces: sum(base ** float(np.max(phi[p])) for p in pieces)


def greedy_weighted_cover(D: np.ndarray, phi: np.ndarray, eps: float) -> List[List[int]]:
    """Repeatedly take the piece with the lowest cost per newly covered point.

    For every potential level t among the uncovered points, a clique is grown
    inside {phi <= t}; its price is (1/eps)^max(phi) divided by its size.
    """
    n = D.shape[0]
    adj = D < eps
    uncovered = np.ones(n, dtype=bool)
    pieces = []
    while uncovered.any():
        best, best_rate = None, math.inf
        for level in np.unique(phi[uncovered]):
            allowed = uncovered & (phi <= level)
            idx = np.flatnonzero(allowed)
            degree = adj[np.ix_(idx, idx)].sum(axis=1)
            seed = int(idx[int(np.argmax(degree))])
            piece = _grow_clique(adj, seed, allowed.copy())
            rate = (1.0 / eps) ** float(np.max(phi[piece])) / len(piece)
            if rate < best_rate:
                best, best_rate = piece, rate
        pieces.append(sorted(best))
        uncovered[best] = False
    return pieces


def covering_number_with_potential(points, phi: Sequence[float], eps: float,
                                   metric: Optional[Metric] = 'euclidean',
                                   exact_limit: int = EXACT_LIMIT_WEIGHTED) -> float:
    """inf over covers of the sum over pieces of (1/eps)^(sup of phi on the piece).

    Raises:
        InvalidParameterError: if eps is not in (0, 1).
        ValidationError: if phi does not match the set.
    """
    if not 0 < eps < 1:
        raise InvalidParameterError(f"eps must lie in (0, 1), got {eps}")
    D = _as_distances(points, metric)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (D.shape[0],):
        raise ValidationError(f"potential has shape {phi.shape}, expected ({D.shape[0]},)")
    cost = _weighted_cost(phi, eps)
    if D.shape[0] == 0:
        return 0.0
    pieces = greedy_weighted_cover(D, phi, eps)
    if D.shape[0] <= exact_limit:
        pieces = _exact_partition(D < eps, cost, pieces)
    return float(cost(pieces))


@dataclass
class TameGrowthProfile:
    """eps^delta * log2 #(eps) along a decreasing ladder."""
    epsilons: List[float]
    counts: List[int]
    delta: float
    note: str = 'covering counts of a finite ensemble lower-bound those of the full space'

    @property
    def log_counts(self) -> List[float]:
        return [math.log2(c) for c in self.counts]

    @property
    def profile(self) -> List[float]:
        return [e ** self.delta * lc for e, lc in zip(self.epsilons, self.log_counts)]

    @property
    def consistent(self) -> bool:
        """Nonincreasing over the last three rungs."""
        tail = self.profile[-3:]
        return all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))

    @property
    def verdict(self) -> str:
        return 'pass' if self.consistent else 'fail'

    def to_csv(self, path: str) -> None:
        table = np.column_stack([self.epsilons, self.log_counts, self.profile])
        np.savetxt(path, table, delimiter=',', header='epsilon,log_count,profile', comments='', fmt='%.17g')

    def to_dict(self):
        return {'epsilons': self.epsilons, 'counts': self.counts, 'log_counts': self.log_counts,
                'profile': self.profile, 'delta': self.delta, 'verdict': self.verdict, 'note': self.note}


def tame_growth_profile(points, eps_ladder: Sequence[float] = DEFAULT_LADDER, delta: float = 0.5,
                        metric: Optional[Metric] = 'euclidean') -> TameGrowthProfile:
    """Covering counts along a ladder and the tame-growth diagnostic sequence.

    Raises:
        InvalidParameterError: if the ladder is not strictly decreasing in (0, 1).
    """
    ladder = [float(e) for e in eps_ladder]
    if len(ladder) < 3 or any(not 0 < e < 1 for e in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidParameterError(f"eps ladder must hold >= 3 strictly decreasing values in (0, 1), got {ladder}")
    D = _as_distances(points, metric)
    counts = [covering_number(D, e, metric=None) for e in ladder]
    logger.info(f"covering counts {counts} along {ladder}")
    return TameGrowthProfile(ladder, counts, float(delta))
