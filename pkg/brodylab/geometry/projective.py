"""Complex projective space with the Fubini-Study metric.

The metric is normalised so the projective line has unit area; the diameter of
every CP^N is then sqrt(pi)/2 and the distance between the classes of p and q is
(1/sqrt(pi)) * arccos(|<p, q>| / (|p| |q|)).
"""
import math
import logging
from typing import List, Optional, Sequence

import numpy as np

from ..common.errors import InvalidParameterError, InvalidPointError

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
DIAMETER = SQRT_PI / 2.0


def canonicalize(coords: np.ndarray) -> np.ndarray:
    """Unit norm, largest-modulus coordinate real positive (first one on ties).

    Works on the last axis, so stacks of homogeneous vectors are accepted.
    """
    v = np.asarray(coords, dtype=complex)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
        raise InvalidPointError("homogeneous coordinates must be finite and not all zero")
    v = v / norm
    lead = np.take_along_axis(v, np.argmax(np.abs(v), axis=-1)[..., None], axis=-1)
    return v * (np.conj(lead) / np.abs(lead))


class ProjectivePoint:
    """A point [c_0 : ... : c_N] of CP^N stored in canonical form."""

    __slots__ = ('_coords',)

    def __init__(self, coords: Sequence[complex]):
        arr = np.asarray(coords, dtype=complex)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidPointError(f"expected a vector of at least 2 coordinates, got shape {arr.shape}")
        arr = canonicalize(arr)
        arr.setflags(write=False)
        self._coords = arr

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def N(self) -> int:
        return self._coords.size - 1

    def isclose(self, other: 'ProjectivePoint', tol: float = 1e-12) -> bool:
        return fs_distance(self, other) <= tol

    def to_list(self) -> List[List[float]]:
        return [[float(c.real), float(c.imag)] for c in self._coords]

    @classmethod
    def from_list(cls, pairs: Sequence[Sequence[float]]) -> 'ProjectivePoint':
        return cls([complex(re, im) for re, im in pairs])

    def __repr__(self):
        inner = ' : '.join(f"{c:.6g}" for c in self._coords)
        return f"ProjectivePoint([{inner}])"


def base_point(N: int) -> ProjectivePoint:
    """[1 : 0 : ... : 0]."""
    e = np.zeros(N + 1, dtype=complex)
    e[0] = 1.0
    return ProjectivePoint(e)


def fs_distance_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Fubini-Study distance between stacks of homogeneous vectors (last axis).

    Uses atan2(sin, cos) of the angle between the complex lines, which equals the
    clamped arccos formula but keeps full precision for nearby points.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    inner = np.sum(np.conj(p) * q, axis=-1)
    cos = np.clip(np.abs(inner), 0.0, 1.0)
    sin = np.clip(np.linalg.norm(q - inner[..., None] * p, axis=-1), 0.0, 1.0)
    return np.arctan2(sin, cos) / SQRT_PI


def fs_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Geodesic Fubini-Study distance, a value in [0, sqrt(pi)/2].

    Raises:
        InvalidParameterError: if the points live in different dimensions.
    """
    if p.N != q.N:
        raise InvalidParameterError(f"points live in CP^{p.N} and CP^{q.N}")
    return float(fs_distance_array(p.coords, q.coords))


def haar_sample(N: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Unitarily invariant random points of CP^N as unit vectors, shape (size, N+1)."""
    v = rng.standard_normal((size, N + 1)) + 1j * rng.standard_normal((size, N + 1))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def spanning_set_bound(N: int, eps: float) -> float:
    """Packing bound sin(sqrt(pi) eps/4)^(-2N) <= (4 pi)^N (1/eps)^(2N) on a greedy eps-net."""
    x = min(SQRT_PI * eps / 4.0, math.pi / 2.0)
    return math.sin(x) ** (-2 * N)


def spanning_constant(N: int) -> float:
    """The constant c of |A| <= c (1/eps)^(2N)."""
    return (4.0 * math.pi) ** N


def fs_spanning_set(N: int, eps: float, seed: int = 0, sample_size: Optional[int] = None,
                    max_sample_size: int = 400_000) -> List[ProjectivePoint]:
    """An eps-spanning set of CP^N by greedy farthest-point insertion.

    A stratified Haar sample (equal counts per index of the largest-modulus
    coordinate) is thinned to a net whose points are eps/2 apart; with the default
    sample size the sample itself is eps/2-dense with overwhelming probability, so
    every point of CP^N lies within eps of the net.

    Args:
        N: dimension of the projective space.
        eps: spanning radius.
        seed: seed of the sample.
        sample_size: number of sample points; chosen from the cap count when None.
        max_sample_size: cap for the automatic sample size.

    Returns:
        List[ProjectivePoint]: the net, in insertion order.

    Raises:
        InvalidParameterError: if eps <= 0 or N < 1.
    """
    if N < 1:
        raise InvalidParameterError(f"N must be at least 1, got {N}")
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps}")
    if eps > DIAMETER:
        return [base_point(N)]

    if sample_size is None:
        caps = spanning_set_bound(N, eps)
        sample_size = int(min(max_sample_size, max(2000, math.ceil(20.0 * caps * math.log(caps + 1.0)))))
    rng = np.random.default_rng(np.random.SeedSequence([seed, N]))
    strata = N + 1
    quota = -(-sample_size // strata)
    buckets = [[] for _ in range(strata)]
    filled = [0] * strata
    while min(filled) < quota:
        batch = haar_sample(N, 4 * quota, rng)
        lead = np.argmax(np.abs(batch), axis=-1)
        for k in range(strata):
            need = quota - filled[k]
            if need > 0:
                chosen = batch[lead == k][:need]
                buckets[k].append(chosen)
                filled[k] += len(chosen)
    sample = np.concatenate([np.concatenate(b) for b in buckets])

    radius = eps / 2.0
    chosen_idx = [0]
    min_dist = fs_distance_array(sample, sample[0])
    while True:
        nxt = int(np.argmax(min_dist))
        if min_dist[nxt] < radius:
            break
        chosen_idx.append(nxt)
        min_dist = np.minimum(min_dist, fs_distance_array(sample, sample[nxt]))
    logger.debug(f"spanning set for N={N}, eps={eps}: {len(chosen_idx)} points from {len(sample)} samples")
    return [ProjectivePoint(sample[i]) for i in chosen_idx]
