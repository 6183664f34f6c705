"""Uniform laws on quantised sets, for translation-invariant rate-distortion problems."""
import math
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict

import numpy as np

from ..common.errors import InvalidParameterError

logger = logging.getLogger(__name__)

GEOMETRIES = ('disk', 'interval', 'cube')
NORMS = ('euclidean', 'max')


@dataclass(frozen=True)
class QuantizerSpec:
    """Grid spacing h = eps / oversample, capped at ``max_points`` grid points."""
    oversample: int = 2
    max_points: int = 2 ** 22

    def __post_init__(self):
        if self.oversample < 1:
            raise InvalidParameterError(f"oversample must be at least 1, got {self.oversample}")

    def spacing(self, eps: float) -> float:
        if not eps > 0:
            raise InvalidParameterError(f"eps must be positive, got {eps}")
        return eps / self.oversample

    def to_dict(self) -> Dict[str, Any]:
        return {'oversample': self.oversample, 'max_points': self.max_points}


@dataclass(frozen=True)
class GridSource:
    """Uniform law on the grid points of a set, laid out on its bounding box.

    Args:
        geometry: 'disk' (unit disk), 'interval' ([0, 1]) or 'cube' ([0, 1]^dim).
        h: grid spacing.
        dim: dimension of the cube (ignored otherwise).
        norm: 'euclidean' or 'max' distance for the distortion.
    """
    geometry: str
    h: float
    dim: int = 1
    norm: str = 'euclidean'

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise InvalidParameterError(f"unknown geometry {self.geometry!r}; expected one of {GEOMETRIES}")
        if self.norm not in NORMS:
            raise InvalidParameterError(f"unknown norm {self.norm!r}; expected one of {NORMS}")
        if not 0 < self.h < 1:
            raise InvalidParameterError(f"grid spacing must lie in (0, 1), got {self.h}")
        if self.geometry == 'cube' and self.dim < 1:
            raise InvalidParameterError(f"cube dimension must be positive, got {self.dim}")

    @classmethod
    def for_eps(cls, geometry: str, eps: float, spec: QuantizerSpec = QuantizerSpec(), dim: int = 1,
                norm: str = 'euclidean') -> 'GridSource':
        source = cls(geometry, spec.spacing(eps), dim, norm)
        if source.probs.size > spec.max_points:
            raise InvalidParameterError(f"grid for eps={eps} has {source.probs.size} points, "
                                        f"above the cap {spec.max_points}")
        return source

    @property
    def ndim(self) -> int:
        if self.geometry == 'disk':
            return 2
        if self.geometry == 'interval':
            return 1
        return self.dim

    @cached_property
    def axes(self):
        if self.geometry == 'disk':
            n = int(math.floor(1.0 / self.h))
            t = np.arange(-n, n + 1) * self.h
        else:
            n = int(math.floor(1.0 / self.h))
            t = (np.arange(n) + 0.5) / n
        return t

    @cached_property
    def probs(self) -> np.ndarray:
        """Probability array on the bounding-box grid, zero off the set."""
        t = self.axes
        mesh = np.meshgrid(*([t] * self.ndim), indexing='ij')
        if self.geometry == 'disk':
            mask = mesh[0] ** 2 + mesh[1] ** 2 <= 1.0
        else:
            mask = np.ones(mesh[0].shape, dtype=bool)
        p = mask.astype(float)
        return p / p.sum()

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs))

    @property
    def step(self) -> float:
        t = self.axes
        return float(t[1] - t[0])

    def offsets(self, radius: float) -> np.ndarray:
        """Distances of the grid offsets within ``radius`` steps, as an odd-sized array."""
        k = int(math.ceil(radius / self.step))
        k = min(k, self.axes.size - 1)
        idx = np.arange(-k, k + 1) * self.step
        mesh = np.meshgrid(*([idx] * self.ndim), indexing='ij')
        if self.norm == 'max':
            return np.max(np.abs(np.stack(mesh)), axis=0)
        return np.sqrt(sum(m ** 2 for m in mesh))

    @cached_property
    def constant_code_distortion(self) -> float:
        """Mean distance to the grid point nearest the centre of the set; the law is centrally symmetric."""
        t = self.axes
        centre = t[np.argmin(np.abs(t - 0.5 * (t[0] + t[-1])))]
        mesh = np.meshgrid(*([t - centre] * self.ndim), indexing='ij')
        if self.norm == 'max':
            dist = np.max(np.abs(np.stack(mesh)), axis=0)
        else:
            dist = np.sqrt(sum(m ** 2 for m in mesh))
        return float(np.sum(self.probs * dist))

    @property
    def diameter(self) -> float:
        if self.geometry == 'disk':
            return 2.0
        return 1.0 if self.norm == 'max' else math.sqrt(self.ndim)

    def to_dict(self) -> Dict[str, Any]:
        return {'geometry': self.geometry, 'h': self.h, 'dim': self.ndim, 'norm': self.norm,
                'support_size': self.support_size}
