"""Cubic lattice sums on the square lattice L Z + L Z i.

The periodic function P(x) = sum over all lattice points of 1/(x - lam)^3 is
evaluated by reducing x into the centred cell, summing a symmetric window and
adding the exact remainder of the outer lattice through its Taylor expansion.
On the square lattice only the sums of lam^(-j) with j divisible by 4 survive
outside a symmetric window, and those are the Eisenstein constants minus the
window part.
"""
import math
from functools import cached_property
from typing import Dict, Tuple

import numpy as np
from scipy.special import gamma

from ..common.errors import InvalidParameterError

# sum over nonzero Gaussian integers of lam^-4
G4_UNIT = gamma(0.25) ** 8 / (960.0 * math.pi ** 2)
EISENSTEIN_UNIT: Dict[int, float] = {
    4: G4_UNIT,
    8: 3.0 * G4_UNIT ** 2 / 7.0,
    12: 18.0 * G4_UNIT ** 3 / 143.0,
}


def lattice_window(L: float, cells: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lattice points m L + n L i with |m|, |n| <= cells, flattened in (m, n) row-major order."""
    idx = np.arange(-cells, cells + 1)
    m, n = np.meshgrid(idx, idx, indexing='ij')
    m, n = m.reshape(-1), n.reshape(-1)
    return L * (m + 1j * n), m, n


def _binom2(k: int) -> int:
    return k * (k - 1) // 2


class PeriodicCubicSum:
    """P(x) = sum_lam 1/(x - lam)^3 over the full lattice, with its derivative.

    Args:
        L: lattice spacing.
        cells: half-width of the explicit window around the reduced point.
    """

    def __init__(self, L: float, cells: int = 6):
        if not L > 0:
            raise InvalidParameterError(f"lattice spacing must be positive, got {L}")
        if cells < 2:
            raise InvalidParameterError(f"periodic window needs at least 2 cells, got {cells}")
        self.L = float(L)
        self.cells = int(cells)
        lam, m, n = lattice_window(self.L, self.cells)
        keep = (m != 0) | (n != 0)
        self.poles = lam[keep]

    @cached_property
    def tails(self) -> Dict[int, complex]:
        """Sums of lam^(-j) over the lattice outside the window, j in (4, 8, 12)."""
        out = {}
        for j, g_unit in EISENSTEIN_UNIT.items():
            inside = np.sum(self.poles ** (-j))
            out[j] = complex(g_unit / self.L ** j - inside)
        return out

    def reduce(self, x):
        """Split x = lam0 + zeta with lam0 the nearest lattice point; returns (zeta, km, kn)."""
        km = np.rint(x.real / self.L)
        kn = np.rint(x.imag / self.L)
        return x - self.L * (km + 1j * kn), km, kn

    def regular(self, zeta, poles=None):
        """P(zeta) - 1/zeta^3 and its derivative, for zeta in the centred cell.

        ``poles`` may be passed as a torch tensor to run the same arithmetic under autograd.
        """
        if poles is None:
            poles = self.poles
        inv = 1.0 / (zeta[..., None] - poles)
        inv3 = inv ** 3
        value = inv3.sum(-1)
        deriv = -3.0 * (inv3 * inv).sum(-1)
        for j, t in self.tails.items():
            c = _binom2(j - 1)
            value = value - c * t * zeta ** (j - 3)
            deriv = deriv - c * (j - 3) * t * zeta ** (j - 4)
        return value, deriv

    def __call__(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """P(x) and P'(x); poles give infinite values."""
        x = np.asarray(x, dtype=complex)
        zeta, _, _ = self.reduce(x)
        value, deriv = self.regular(zeta)
        with np.errstate(divide='ignore', invalid='ignore'):
            return value + 1.0 / zeta ** 3, deriv - 3.0 / zeta ** 4


def tail_perturbation_bound(L: float, cells: int, radius: float, mode: str = 'rms',
                            sigmas: float = 4.0) -> Tuple[float, float]:
    """Bounds on how much the coefficients outside the window move S and S'.

    Every coefficient outside |m|, |n| <= cells is replaced by the tail value; the
    true coefficients differ from it by at most 1 (uniform on the unit disk).
    For |x| <= radius the sums of |x - lam|^-k over the outer lattice are bounded
    by comparison with the integral over the cells of those points.

    Args:
        L: lattice spacing.
        cells: window half-width.
        radius: largest |z + w| at which the curve is read.
        mode: 'worst' sums the moduli; 'rms' uses E|u - t|^2 = 1/2 and reports
            ``sigmas`` standard deviations.
        sigmas: multiplier for the rms mode.

    Returns:
        Tuple[float, float]: bounds on the change of S and of S'.
    """
    rho = (cells + 1) * L
    c = radius + L / math.sqrt(2.0)
    r0 = rho - radius - math.sqrt(2.0) * L
    if r0 <= 0:
        return math.inf, math.inf
    area = 2.0 * math.pi / L ** 2

    def moment(k: int) -> float:
        # integral over s >= r0 of (s + c) s^-k ds
        return 1.0 / ((k - 2) * r0 ** (k - 2)) + c / ((k - 1) * r0 ** (k - 1))

    if mode == 'worst':
        return area * moment(3), 3.0 * area * moment(4)
    if mode == 'rms':
        return (sigmas * math.sqrt(0.5 * area * moment(6)),
                sigmas * math.sqrt(4.5 * area * moment(8)))
    raise InvalidParameterError(f"unknown bound mode {mode!r}")


def psi_perturbation_bound(d_value: float, d_deriv: float) -> float:
    """Change of psi = 4|df|^2 caused by perturbations (d_value, d_deriv) of S and S'."""
    return 8.0 * (d_deriv / math.sqrt(math.pi) + d_value)


def choose_window_cells(L: float, radius: float, tol: float = 1e-6, mode: str = 'rms',
                        min_cells: int = 3, max_cells: int = 400) -> int:
    """Smallest window half-width whose tail moves psi by less than ``tol``."""
    for cells in range(min_cells, max_cells + 1):
        if psi_perturbation_bound(*tail_perturbation_bound(L, cells, radius, mode)) < tol:
            return cells
    raise InvalidParameterError(f"no window up to {max_cells} cells meets tolerance {tol} at L={L}")
