"""Holomorphic curves C -> CP^N and their spherical derivative.

Every representation produces a holomorphic homogeneous frame (F, F') that never
vanishes, so the spherical derivative

    |df|^2 = (|F|^2 |F'|^2 - |<F, F'>|^2) / (pi |F|^4)

is evaluated without ever dividing by an affine coordinate. Multiplying the frame
by a nonvanishing holomorphic factor leaves |df| unchanged, which is how the
lattice sums switch to the reciprocal chart near their poles.
"""
import json
import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from ..common.errors import (InvalidParameterError, NotLocallyConstantError, NumericError,
                             UnsupportedCurveError, ValidationError)
from .lattice import PeriodicCubicSum, lattice_window
from .projective import ProjectivePoint, base_point, canonicalize, fs_distance_array

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

GLUING_TARGET = 0.1
GLUING_CONVENTIONS = ('fs', 'modulus', 'derivative')
_CHUNK = 4096


def _pair(c: complex) -> List[float]:
    return [float(np.real(c)), float(np.imag(c))]


def _unpair(p: Sequence[float]) -> complex:
    return complex(p[0], p[1])


@dataclass(frozen=True)
class Square:
    """The closed square corner + [0, side]^2 of the plane."""
    corner: complex
    side: float

    def __post_init__(self):
        if not (self.side > 0 and math.isfinite(self.side)):
            raise InvalidParameterError(f"square side must be positive and finite, got {self.side}")

    def midpoints(self, resolution: int) -> np.ndarray:
        """Cell midpoints of the resolution x resolution subdivision, indexed [row(y), col(x)]."""
        h = self.side / resolution
        t = (np.arange(resolution) + 0.5) * h
        return self.corner + t[None, :] + 1j * t[:, None]

    def lattice(self, n: int) -> np.ndarray:
        """Closed grid with n+1 points per side, spacing side/n."""
        t = np.linspace(0.0, self.side, n + 1)
        return self.corner + t[None, :] + 1j * t[:, None]

    def bounding_union(self, other: 'Square') -> 'Square':
        lo_x = min(self.corner.real, other.corner.real)
        lo_y = min(self.corner.imag, other.corner.imag)
        hi_x = max(self.corner.real + self.side, other.corner.real + other.side)
        hi_y = max(self.corner.imag + self.side, other.corner.imag + other.side)
        return Square(complex(lo_x, lo_y), max(hi_x - lo_x, hi_y - lo_y))

    def to_dict(self) -> Dict[str, Any]:
        return {'corner': _pair(self.corner), 'side': self.side}


def spherical_derivative_sq(F: np.ndarray, dF: np.ndarray) -> np.ndarray:
    """|df|^2 from a homogeneous frame; the last axis holds the N+1 coordinates."""
    norm = np.linalg.norm(F, axis=-1, keepdims=True)
    u = F / norm
    v = dF / norm
    proj = np.sum(np.conj(u) * v, axis=-1, keepdims=True)
    w = v - proj * u
    return np.sum(np.abs(w) ** 2, axis=-1) / math.pi


class CurveRep(ABC):
    """A representable holomorphic map from C to CP^N."""

    kind: str = ''

    @property
    @abstractmethod
    def N(self) -> int:
        ...

    @abstractmethod
    def frame(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Homogeneous frame (F, F') at the points z, each of shape z.shape + (N+1,)."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def carrier(self) -> Optional[Square]:
        """Square outside which the curve carries no features; None when there is none."""
        raise UnsupportedCurveError(f"{type(self).__name__} has no finite carrier")

    def period(self) -> Optional[float]:
        """Side of a square lattice of periods, if the curve is doubly periodic."""
        return None

    def torch_components(self, z):
        """Chart-0 homogeneous components as torch tensors, for the autograd oracle."""
        raise UnsupportedCurveError(f"{type(self).__name__} has no torch evaluation")


class Constant(CurveRep):
    kind = 'constant'

    def __init__(self, point: ProjectivePoint):
        self.point = point

    @property
    def N(self) -> int:
        return self.point.N

    def frame(self, z):
        z = np.asarray(z, dtype=complex)
        F = np.broadcast_to(self.point.coords, z.shape + (self.N + 1,)).copy()
        return F, np.zeros_like(F)

    def carrier(self) -> Optional[Square]:
        return None

    def torch_components(self, z):
        return [0 * z + complex(c) for c in self.point.coords]

    def to_dict(self):
        return {'kind': self.kind, 'N': self.N, 'point': self.point.to_list()}


class Rational(CurveRep):
    """[P_0(z) : ... : P_N(z)] with polynomial components, coefficients in ascending powers."""
    kind = 'rational'

    def __init__(self, components: Sequence[Sequence[complex]]):
        comps = [np.trim_zeros(np.asarray(c, dtype=complex), 'b') for c in components]
        if len(comps) < 2:
            raise ValidationError(f"a rational curve needs at least 2 components, got {len(comps)}")
        if all(c.size == 0 for c in comps):
            raise ValidationError("all components of a rational curve are zero")
        self.components = tuple(c if c.size else np.zeros(1, dtype=complex) for c in comps)
        self.degree = max(c.size - 1 for c in self.components)

    @property
    def N(self) -> int:
        return len(self.components) - 1

    def _derivatives(self, order: int) -> List[np.ndarray]:
        return [npoly.polyder(c, order) / math.factorial(order) if c.size > order else np.zeros(1, dtype=complex)
                for c in self.components]

    def frame(self, z):
        z = np.asarray(z, dtype=complex)
        F = np.stack([npoly.polyval(z, c) for c in self.components], axis=-1)
        dF = np.stack([npoly.polyval(z, npoly.polyder(c)) for c in self.components], axis=-1)
        dead = np.linalg.norm(F, axis=-1) == 0.0
        if np.any(dead):
            # common zero of all components: divide out (z - z0)^k via Taylor coefficients
            zd = z[dead]
            G = np.zeros(zd.shape + (self.N + 1,), dtype=complex)
            alive = np.zeros(zd.shape, dtype=bool)
            dG = np.zeros_like(G)
            for k in range(1, self.degree + 1):
                Gk = np.stack([npoly.polyval(zd, c) for c in self._derivatives(k)], axis=-1)
                dGk = np.stack([npoly.polyval(zd, c) for c in self._derivatives(k + 1)], axis=-1)
                fresh = (~alive) & (np.linalg.norm(Gk, axis=-1) > 0)
                G[fresh], dG[fresh] = Gk[fresh], dGk[fresh]
                alive |= fresh
            F[dead], dF[dead] = G, dG
        return F, dF

    def carrier(self) -> Optional[Square]:
        bound = 1.0
        for c in self.components:
            if c.size > 1:
                bound = max(bound, 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))))
        return Square(complex(-bound, -bound), 2.0 * bound)

    def torch_components(self, z):
        out = []
        for c in self.components:
            acc = 0 * z + complex(c[-1])
            for a in c[-2::-1]:
                acc = acc * z + complex(a)
            out.append(acc)
        return out

    def to_dict(self):
        return {'kind': self.kind, 'N': self.N, 'components': [[_pair(a) for a in c] for c in self.components]}


class LatticeSum(CurveRep):
    """z -> [1 : sum_lam u_lam / (z + w - lam)^3] on the lattice L Z + L Z i.

    The coefficients are explicit on the window |m|, |n| <= cells and equal to
    ``tail`` everywhere else; the infinite remainder is the periodic sum
    ``tail * P``. Coefficients are indexed [m + cells, n + cells] for
    lam = m L + n L i.
    """
    kind = 'lattice_sum'

    def __init__(self, L: float, coefficients: np.ndarray, offset: complex = 0.0, tail: complex = 0.0):
        coefficients = np.asarray(coefficients, dtype=complex)
        if not L > 0:
            raise InvalidParameterError(f"lattice spacing must be positive, got {L}")
        if coefficients.ndim != 2 or coefficients.shape[0] != coefficients.shape[1] or coefficients.shape[0] % 2 != 1:
            raise ValidationError(f"coefficients must be a (2c+1, 2c+1) array, got shape {coefficients.shape}")
        self.L = float(L)
        self.coefficients = coefficients.copy()
        self.coefficients.setflags(write=False)
        self.offset = complex(offset)
        self.tail = complex(tail)
        self.cells = (coefficients.shape[0] - 1) // 2

    @classmethod
    def periodic(cls, L: float, value: complex, cells: int = 3, offset: complex = 0.0) -> 'LatticeSum':
        """The doubly periodic curve with every coefficient equal to ``value``."""
        size = 2 * cells + 1
        return cls(L, np.full((size, size), value, dtype=complex), offset=offset, tail=value)

    @property
    def N(self) -> int:
        return 1

    @property
    def window_radius(self) -> float:
        return (self.cells + 0.5) * self.L

    @cached_property
    def _periodic(self) -> PeriodicCubicSum:
        return PeriodicCubicSum(self.L)

    @cached_property
    def _window(self):
        poles, m, n = lattice_window(self.L, self.cells)
        dev = self.coefficients.reshape(-1) - self.tail
        live = dev != 0
        return poles[live], m[live], n[live], dev[live]

    def with_window(self, cells: int) -> 'LatticeSum':
        """The same curve with the explicit window widened by tail-valued coefficients."""
        if cells < self.cells:
            raise InvalidParameterError(f"cannot shrink the window from {self.cells} to {cells} cells")
        size = 2 * cells + 1
        grown = np.full((size, size), self.tail, dtype=complex)
        pad = cells - self.cells
        grown[pad:pad + 2 * self.cells + 1, pad:pad + 2 * self.cells + 1] = self.coefficients
        return LatticeSum(self.L, grown, self.offset, self.tail)

    def coefficient(self, km: np.ndarray, kn: np.ndarray) -> np.ndarray:
        c = self.cells
        inside = (np.abs(km) <= c) & (np.abs(kn) <= c)
        im = np.clip(km, -c, c).astype(int) + c
        jn = np.clip(kn, -c, c).astype(int) + c
        return np.where(inside, self.coefficients[im, jn], self.tail)

    def _pieces(self, x: np.ndarray):
        """Nearest-pole split: (zeta, u0, R, R') with R the sum without the nearest pole."""
        periodic = self._periodic
        zeta, km, kn = periodic.reduce(x)
        u0 = self.coefficient(km, kn)
        reg, dreg = periodic.regular(zeta)
        R = self.tail * reg
        dR = self.tail * dreg
        poles, pm, pn, dev = self._window
        if dev.size:
            diff = x[:, None] - poles[None, :]
            same = (pm[None, :] == km[:, None]) & (pn[None, :] == kn[:, None])
            inv = np.divide(1.0, diff, out=np.zeros_like(diff), where=~same)
            inv3 = inv ** 3
            R = R + inv3 @ dev
            dR = dR - 3.0 * ((inv3 * inv) @ dev)
        return zeta, u0, R, dR

    def frame(self, z, chart: Optional[int] = None):
        """Frame in the best-conditioned chart; ``chart`` forces 0 (affine) or 1 (reciprocal)."""
        z = np.asarray(z, dtype=complex)
        x = (z + self.offset).reshape(-1)
        F = np.empty((x.size, 2), dtype=complex)
        dF = np.empty((x.size, 2), dtype=complex)
        for start in range(0, x.size, _CHUNK):
            sl = slice(start, start + _CHUNK)
            zeta, u0, R, dR = self._pieces(x[sl])
            z2 = zeta ** 2
            z3 = z2 * zeta
            top = u0 + z3 * R
            if chart is None:
                recip = np.abs(top) > np.abs(z3)
            else:
                recip = np.full(zeta.shape, chart == 1)
            with np.errstate(divide='ignore', invalid='ignore'):
                pole = np.where(u0 != 0, u0 / z3, 0.0)
                dpole = np.where(u0 != 0, -3.0 * u0 / (z3 * zeta), 0.0)
            F[sl, 0] = np.where(recip, z3, 1.0)
            F[sl, 1] = np.where(recip, top, pole + R)
            dF[sl, 0] = np.where(recip, 3.0 * z2, 0.0)
            dF[sl, 1] = np.where(recip, 3.0 * z2 * R + z3 * dR, dpole + dR)
        return F.reshape(z.shape + (2,)), dF.reshape(z.shape + (2,))

    def carrier(self) -> Optional[Square]:
        r = self.window_radius
        return Square(complex(-r, -r) - self.offset, 2.0 * r)

    def period(self) -> Optional[float]:
        if self._window[3].size == 0:
            return self.L
        return None

    def torch_components(self, z):
        import torch
        x = z + self.offset
        periodic = self._periodic
        km = torch.round(x.real / self.L)
        kn = torch.round(x.imag / self.L)
        zeta = x - self.L * torch.complex(km, kn)
        reg, _ = periodic.regular(zeta, poles=torch.as_tensor(periodic.poles))
        S = self.tail * (reg + 1.0 / zeta ** 3)
        poles, _, _, dev = self._window
        if dev.size:
            diff = x[..., None] - torch.as_tensor(poles)
            S = S + (torch.as_tensor(dev) / diff ** 3).sum(-1)
        return [0 * z + 1.0, S]

    def to_dict(self):
        c = self.cells
        coeffs = {f"{m},{n}": _pair(self.coefficients[m + c, n + c])
                  for m in range(-c, c + 1) for n in range(-c, c + 1)}
        return {'kind': self.kind, 'N': 1, 'L': self.L, 'cells': c, 'window_radius': self.window_radius,
                'offset': _pair(self.offset), 'tail': _pair(self.tail), 'coefficients': coeffs}


class Translated(CurveRep):
    kind = 'translated'

    def __init__(self, inner: CurveRep, a: complex):
        self.inner = inner
        self.a = complex(a)

    @property
    def N(self) -> int:
        return self.inner.N

    def frame(self, z):
        return self.inner.frame(np.asarray(z, dtype=complex) + self.a)

    def carrier(self) -> Optional[Square]:
        inner = self.inner.carrier()
        return None if inner is None else Square(inner.corner - self.a, inner.side)

    def period(self) -> Optional[float]:
        return self.inner.period()

    def torch_components(self, z):
        return self.inner.torch_components(z + self.a)

    def to_dict(self):
        return {'kind': self.kind, 'N': self.N, 'a': _pair(self.a), 'inner': self.inner.to_dict()}


class Rescaled(CurveRep):
    kind = 'rescaled'

    def __init__(self, inner: CurveRep, lam: float):
        if not lam > 0:
            raise InvalidParameterError(f"rescaling factor must be positive, got {lam}")
        self.inner = inner
        self.lam = float(lam)

    @property
    def N(self) -> int:
        return self.inner.N

    def frame(self, z):
        F, dF = self.inner.frame(self.lam * np.asarray(z, dtype=complex))
        return F, self.lam * dF

    def carrier(self) -> Optional[Square]:
        inner = self.inner.carrier()
        return None if inner is None else Square(inner.corner / self.lam, inner.side / self.lam)

    def period(self) -> Optional[float]:
        p = self.inner.period()
        return None if p is None else p / self.lam

    def torch_components(self, z):
        return self.inner.torch_components(self.lam * z)

    def to_dict(self):
        return {'kind': self.kind, 'N': self.N, 'lam': self.lam, 'inner': self.inner.to_dict()}


def _householder_to_base(q: ProjectivePoint) -> np.ndarray:
    """Hermitian unitary U with U q proportional to [1 : 0 : ... : 0]."""
    v = q.coords
    phase = v[0] / abs(v[0]) if abs(v[0]) > 0 else 1.0
    w = v - phase * np.eye(v.size, dtype=complex)[0]
    norm_sq = float(np.real(np.vdot(w, w)))
    if norm_sq < 1e-30:
        return np.eye(v.size, dtype=complex)
    return np.eye(v.size, dtype=complex) - 2.0 * np.outer(w, np.conj(w)) / norm_sq


class Glued(CurveRep):
    """Psi(f) = [G_0 : G_1 + a G_0/(z-p)^3 : ... : G_N + a G_0/(z-p)^3] in coordinates where q = [1:0:...:0].

    The frame is multiplied through by (z - p)^3, so the pole at p is regular.
    """
    kind = 'glued'

    def __init__(self, inner: CurveRep, p: complex, q: ProjectivePoint, amplitude: float):
        if not amplitude > 0:
            raise InvalidParameterError(f"gluing amplitude must be positive, got {amplitude}")
        if q.N != inner.N:
            raise InvalidParameterError(f"gluing point lives in CP^{q.N}, curve in CP^{inner.N}")
        self.inner = inner
        self.p = complex(p)
        self.q = q
        self.amplitude = float(amplitude)
        self._U = _householder_to_base(q)
        self._e = np.ones(inner.N + 1, dtype=complex)
        self._e[0] = 0.0

    @property
    def N(self) -> int:
        return self.inner.N

    def frame(self, z):
        z = np.asarray(z, dtype=complex)
        F, dF = self.inner.frame(z)
        U = self._U
        G = F @ U.T
        dG = dF @ U.T
        zeta = (z - self.p)[..., None]
        a = self.amplitude
        H = zeta ** 3 * G + a * G[..., :1] * self._e
        dH = 3.0 * zeta ** 2 * G + zeta ** 3 * dG + a * dG[..., :1] * self._e
        # back to the original coordinates: U^H H
        return H @ np.conj(U), dH @ np.conj(U)

    def carrier(self) -> Optional[Square]:
        disk = Square(self.p - (1 + 1j), 2.0)
        inner = self.inner.carrier()
        return disk if inner is None else inner.bounding_union(disk)

    def torch_components(self, z):
        comps = self.inner.torch_components(z)
        U = self._U
        G = [sum(complex(U[k, j]) * comps[j] for j in range(len(comps))) for k in range(len(comps))]
        zeta3 = (z - self.p) ** 3
        H = [zeta3 * G[0]] + [zeta3 * G[k] + self.amplitude * G[0] for k in range(1, len(G))]
        Uh = np.conj(U).T
        return [sum(complex(Uh[k, j]) * H[j] for j in range(len(H))) for k in range(len(H))]

    def to_dict(self):
        return {'kind': self.kind, 'N': self.N, 'p': _pair(self.p), 'q': self.q.to_list(),
                'amplitude': self.amplitude, 'inner': self.inner.to_dict()}


# -- operations -------------------------------------------------------------

def evaluate_many(curve: CurveRep, z: ComplexLike) -> np.ndarray:
    """Canonical unit coordinate vectors of f(z), shape z.shape + (N+1,)."""
    F, _ = curve.frame(np.asarray(z, dtype=complex))
    return canonicalize(F)


def evaluate(curve: CurveRep, z: complex) -> ProjectivePoint:
    F, _ = curve.frame(np.asarray(complex(z)))
    return ProjectivePoint(F)


def lipschitz_field(curve: CurveRep, z: ComplexLike) -> np.ndarray:
    """|df|^2 at every point of z."""
    F, dF = curve.frame(np.asarray(z, dtype=complex))
    return spherical_derivative_sq(F, dF)


def local_lipschitz(curve: CurveRep, z: complex) -> float:
    """|df|(z), the local Lipschitz constant for the Fubini-Study metric."""
    return math.sqrt(float(lipschitz_field(curve, complex(z))))


def translate(curve: CurveRep, a: complex) -> CurveRep:
    """T^a f (z) = f(z + a)."""
    a = complex(a)
    if a == 0:
        return curve
    if isinstance(curve, Translated):
        return Translated(curve.inner, curve.a + a)
    return Translated(curve, a)


def rescale(curve: CurveRep, lam: float) -> CurveRep:
    """z -> f(lam z); |d rescale(f, lam)|(z) = lam |df|(lam z)."""
    if not lam > 0:
        raise InvalidParameterError(f"rescaling factor must be positive, got {lam}")
    if lam == 1:
        return curve
    return Rescaled(curve, lam)


def gluing_norm(N: int, amplitude: float, convention: str) -> float:
    tail = Glued(Constant(base_point(N)), 0.0, base_point(N), amplitude)
    if convention == 'derivative':
        r = amplitude ** (1.0 / 3.0) * np.geomspace(1e-3, 1e3, 4001)
        return float(np.sqrt(np.max(lipschitz_field(tail, r))))
    r = np.geomspace(1.0, 1e3, 400)
    if convention == 'fs':
        return float(np.max(fs_distance_array(evaluate_many(tail, r), base_point(N).coords)))
    if convention == 'modulus':
        F, _ = tail.frame(r)
        return float(np.max(np.linalg.norm(F[:, 1:], axis=-1) / np.abs(F[:, 0])))
    raise InvalidParameterError(f"unknown gluing convention {convention!r}; expected one of {GLUING_CONVENTIONS}")


def solve_gluing_amplitude(N: int, convention: str = 'fs', target: float = GLUING_TARGET) -> float:
    """Amplitude a with |h_a| = target, h_a = [1 : a/z^3 : ... : a/z^3].

    The conventions read the norm as the sup of the Fubini-Study distance from
    [1:0:...:0] over |z| >= 1 ('fs'), the sup of the affine modulus over the same
    set ('modulus') or the sup over C of |dh_a| ('derivative').
    """
    if convention not in GLUING_CONVENTIONS:
        raise InvalidParameterError(f"unknown gluing convention {convention!r}; expected one of {GLUING_CONVENTIONS}")

    def gap(log_a: float) -> float:
        return gluing_norm(N, math.exp(log_a), convention) - target

    lo, hi = math.log(1e-12), math.log(1e6)
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo * g_hi > 0:
        raise NumericError(f"gluing amplitude not bracketed for convention {convention!r}: "
                           f"norm gaps {g_lo:.3g}, {g_hi:.3g}")
    log_a = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    return math.exp(log_a)


def glue(curve: CurveRep, p: complex, q: ProjectivePoint, radius: float = 1.0, delta: float = 0.1,
         convention: str = 'fs', disk_resolution: int = 32) -> Glued:
    """Graft the cubic pole tail at p onto a curve that is nearly constant (= q) around p.

    Args:
        curve: the curve to glue.
        p: gluing point.
        q: the value the curve takes approximately on the disk |z - p| <= radius.
        radius: radius of the checked disk.
        delta: largest Fubini-Study distance from q allowed on the checked disk.
        convention: norm convention for the amplitude (see solve_gluing_amplitude).
        disk_resolution: sample points per radius and per angle quarter.

    Raises:
        NotLocallyConstantError: if the curve leaves the delta-ball around q on the disk.
        NumericError: if the amplitude solve fails to bracket.
    """
    if q.N != curve.N:
        raise InvalidParameterError(f"gluing point lives in CP^{q.N}, curve in CP^{curve.N}")
    r = np.linspace(0.0, radius, disk_resolution + 1)
    theta = np.linspace(0.0, 2.0 * math.pi, 4 * disk_resolution, endpoint=False)
    ring = complex(p) + (r[:, None] * np.exp(1j * theta[None, :])).reshape(-1)
    worst = float(np.max(fs_distance_array(evaluate_many(curve, ring), q.coords)))
    if worst > delta:
        raise NotLocallyConstantError(f"curve moves {worst:.4g} > {delta} away from the gluing point "
                                      f"on the disk of radius {radius} around {p}")
    amplitude = solve_gluing_amplitude(curve.N, convention)
    logger.debug(f"glued at p={p} with amplitude {amplitude:.12g} ({convention} convention)")
    return Glued(curve, p, q, amplitude)


# -- serialization ----------------------------------------------------------

def curve_from_dict(data: Dict[str, Any]) -> CurveRep:
    kind = data.get('kind')
    if kind == Constant.kind:
        return Constant(ProjectivePoint.from_list(data['point']))
    if kind == Rational.kind:
        return Rational([[_unpair(a) for a in comp] for comp in data['components']])
    if kind == LatticeSum.kind:
        c = int(data['cells'])
        coeffs = np.empty((2 * c + 1, 2 * c + 1), dtype=complex)
        for key, pair in data['coefficients'].items():
            m, n = (int(s) for s in key.split(','))
            coeffs[m + c, n + c] = _unpair(pair)
        return LatticeSum(float(data['L']), coeffs, _unpair(data['offset']), _unpair(data['tail']))
    if kind == Translated.kind:
        return Translated(curve_from_dict(data['inner']), _unpair(data['a']))
    if kind == Rescaled.kind:
        return Rescaled(curve_from_dict(data['inner']), float(data['lam']))
    if kind == Glued.kind:
        return Glued(curve_from_dict(data['inner']), _unpair(data['p']),
                     ProjectivePoint.from_list(data['q']), float(data['amplitude']))
    raise ValidationError(f"unknown curve kind {kind!r}")


def curve_to_json(curve: CurveRep) -> str:
    return json.dumps(curve.to_dict(), sort_keys=True)


def curve_from_json(text: str) -> CurveRep:
    return curve_from_dict(json.loads(text))
