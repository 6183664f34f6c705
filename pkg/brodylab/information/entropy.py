"""Finite-alphabet probability objects, entropy and mutual information.

Logarithms are base 2 unless ``unit='nats'``.
"""
import math
import logging
from typing import Sequence, Union

import numpy as np
from scipy.special import entr

from ..common.errors import InvalidParameterError, ValidationError

logger = logging.getLogger(__name__)

SUM_TOL = 1e-12
UNITS = {'bits': math.log(2.0), 'nats': 1.0}


def _unit_divisor(unit: str) -> float:
    try:
        return UNITS[unit]
    except KeyError:
        raise InvalidParameterError(f"unknown information unit {unit!r}; expected one of {sorted(UNITS)}") from None


def _check_probabilities(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise ValidationError(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} has non-finite entries")
    if np.any(arr < 0):
        raise ValidationError(f"{what} has negative entries (min {arr.min():.3g})")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL * max(1, arr.size):
        raise ValidationError(f"{what} sums to {total!r}, not 1")


class Pmf:
    """A probability vector."""

    __slots__ = ('probs',)

    def __init__(self, probs: Union[Sequence[float], np.ndarray]):
        arr = np.asarray(probs, dtype=float)
        if arr.ndim != 1:
            raise ValidationError(f"a pmf is a vector, got shape {arr.shape}")
        _check_probabilities(arr, 'pmf')
        self.probs = arr

    @classmethod
    def normalized(cls, weights) -> 'Pmf':
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @classmethod
    def uniform(cls, size: int) -> 'Pmf':
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def from_csv(cls, path: str) -> 'Pmf':
        return cls(np.atleast_1d(np.loadtxt(path, delimiter=',', dtype=float)).reshape(-1))

    def __len__(self):
        return self.probs.size


class JointPmf:
    """A joint law P(X = x, Y = y) as an |X| x |Y| matrix."""

    __slots__ = ('matrix',)

    def __init__(self, matrix: Union[Sequence[Sequence[float]], np.ndarray]):
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2:
            raise ValidationError(f"a joint pmf is a matrix, got shape {arr.shape}")
        _check_probabilities(arr, 'joint pmf')
        self.matrix = arr

    @classmethod
    def normalized(cls, weights) -> 'JointPmf':
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @classmethod
    def from_channel(cls, source: Pmf, channel: np.ndarray) -> 'JointPmf':
        """P(x, y) = mu(x) nu(y | x) for a row-stochastic channel."""
        channel = np.asarray(channel, dtype=float)
        if channel.shape[0] != len(source):
            raise ValidationError(f"channel has {channel.shape[0]} rows for a source of size {len(source)}")
        return cls(source.probs[:, None] * channel)

    @classmethod
    def from_csv(cls, path: str) -> 'JointPmf':
        return cls(np.atleast_2d(np.loadtxt(path, delimiter=',', dtype=float)))

    @property
    def marginal_x(self) -> Pmf:
        return Pmf(self.matrix.sum(axis=1))

    @property
    def marginal_y(self) -> Pmf:
        return Pmf(self.matrix.sum(axis=0))

    @property
    def T(self) -> 'JointPmf':
        return JointPmf(self.matrix.T)

    def push_forward(self, fx: Sequence[int], gy: Sequence[int]) -> 'JointPmf':
        """Law of (f(X), g(Y)) for maps given as index arrays."""
        fx = np.asarray(fx, dtype=int)
        gy = np.asarray(gy, dtype=int)
        out = np.zeros((fx.max() + 1, gy.max() + 1))
        np.add.at(out, (fx[:, None], gy[None, :]), self.matrix)
        return JointPmf(out)


class DistortionMatrix:
    """Distortion d(x, y) between source letters and reproduction letters."""

    __slots__ = ('matrix',)

    def __init__(self, matrix: Union[Sequence[Sequence[float]], np.ndarray]):
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError(f"a distortion matrix is a nonempty matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValidationError("distortion entries must be finite and nonnegative")
        self.matrix = arr

    @classmethod
    def hamming(cls, size: int) -> 'DistortionMatrix':
        return cls(1.0 - np.eye(size))

    @classmethod
    def from_csv(cls, path: str) -> 'DistortionMatrix':
        return cls(np.atleast_2d(np.loadtxt(path, delimiter=',', dtype=float)))

    @property
    def shape(self):
        return self.matrix.shape


def entropy(p: Union[Pmf, Sequence[float], np.ndarray], unit: str = 'bits') -> float:
    """Shannon entropy with 0 log 0 = 0."""
    p = p if isinstance(p, Pmf) else Pmf(p)
    return float(np.sum(entr(p.probs))) / _unit_divisor(unit)


def joint_entropy(j: JointPmf, unit: str = 'bits') -> float:
    return float(np.sum(entr(j.matrix))) / _unit_divisor(unit)


def mutual_information(j: Union[JointPmf, np.ndarray], unit: str = 'bits') -> float:
    """I(X; Y) = H(X) + H(Y) - H(X, Y), clamped at 0."""
    j = j if isinstance(j, JointPmf) else JointPmf(j)
    m = j.matrix
    value = (float(np.sum(entr(m.sum(axis=1)))) + float(np.sum(entr(m.sum(axis=0))))
             - float(np.sum(entr(m)))) / _unit_divisor(unit)
    return max(value, 0.0)


def channel_mutual_information(mu: Union[Pmf, Sequence[float]], nu: np.ndarray, unit: str = 'bits') -> float:
    """I(mu, nu) for a source law mu and a row-stochastic channel nu."""
    mu = mu if isinstance(mu, Pmf) else Pmf(mu)
    return mutual_information(JointPmf.from_channel(mu, nu), unit)
