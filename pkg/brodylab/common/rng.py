"""Counter-based random streams keyed by (seed, sample index, block).

Every sample index owns a Philox key derived through ``SeedSequence``; inside a
sample, each lattice coordinate draws from its own counter block, so the value
of a coefficient never depends on the window size, the draw order or the
number of worker threads.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

# reserved counter blocks, lattice coordinates start after them
OFFSET_BLOCK = 0
TRANSLATION_BLOCK = 1
AUX_BLOCK = 2
_FIRST_COORDINATE_BLOCK = 8


def _zigzag(m: int) -> int:
    return 2 * m if m >= 0 else -2 * m - 1


def coordinate_block(m: int, n: int) -> int:
    """Counter block of the lattice coordinate (m, n) via a zig-zag Cantor pairing."""
    a, b = _zigzag(int(m)), _zigzag(int(n))
    return _FIRST_COORDINATE_BLOCK + (a + b) * (a + b + 1) // 2 + b


@dataclass(frozen=True)
class SampleStream:
    """Random streams of one Monte-Carlo sample."""
    seed: int
    index: int

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.index < 0:
            raise InvalidParameterError(f"sample index must be nonnegative, got {self.index}")

    @cached_property
    def key(self) -> np.ndarray:
        return np.random.SeedSequence([self.seed, self.index]).generate_state(2, dtype=np.uint64)

    def generator(self, block: int) -> np.random.Generator:
        """Generator reading the counter block ``block``; blocks never overlap."""
        return np.random.Generator(np.random.Philox(key=self.key, counter=int(block) << 128))

    def uniform_square(self, block: int, side: float) -> complex:
        """A point uniform on the square [0, side]^2."""
        x, y = self.generator(block).uniform(0.0, side, size=2)
        return complex(x, y)

    def uniform_disk(self, block: int, center: complex, radius: float = 1.0) -> complex:
        """A point uniform on the closed disk, by rejection from the bounding square."""
        gen = self.generator(block)
        while True:
            x, y = gen.uniform(-1.0, 1.0, size=2)
            if x * x + y * y <= 1.0:
                return complex(center) + radius * complex(x, y)

    def lattice_disk_coefficients(self, cells: int, center: complex) -> np.ndarray:
        """Disk-uniform coefficients on the window |m|, |n| <= cells, indexed [m + cells, n + cells]."""
        size = 2 * cells + 1
        out = np.empty((size, size), dtype=complex)
        for m in range(-cells, cells + 1):
            for n in range(-cells, cells + 1):
                out[m + cells, n + cells] = self.uniform_disk(coordinate_block(m, n), center)
        return out
