"""Closed-form oracles built with sympy.

These expressions are independent of the numerical frames in
``brodylab.geometry``; the tests compare the two.
"""
import logging
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import sympy

logger = logging.getLogger(__name__)

x, y = sympy.symbols('x y', real=True)
r, R = sympy.symbols('r R', positive=True)


def rational_df2_expr(components: Sequence[Sequence[complex]]) -> sympy.Expr:
    """|df|^2 = (1/4pi) Laplacian of log sum |P_i|^2 for polynomial components (ascending coefficients)."""
    z = x + sympy.I * y
    norm_sq = 0
    for coeffs in components:
        poly = sympy.Integer(0)
        for k, c in enumerate(coeffs):
            c = complex(c)
            poly += (sympy.nsimplify(c.real) + sympy.I * sympy.nsimplify(c.imag)) * z ** k
        poly = sympy.expand(poly)
        re, im = poly.as_real_imag()
        norm_sq += re ** 2 + im ** 2
    log_norm = sympy.log(sympy.expand(norm_sq))
    lap = sympy.diff(log_norm, x, 2) + sympy.diff(log_norm, y, 2)
    logger.debug(f"symbolic |df|^2 built for {len(components)} components")
    return sympy.simplify(lap / (4 * sympy.pi))


def rational_df2(components: Sequence[Sequence[complex]]) -> Callable[[np.ndarray], np.ndarray]:
    """Numerical function z -> |df|^2 lambdified from ``rational_df2_expr``."""
    fn = sympy.lambdify((x, y), rational_df2_expr(components), 'numpy')

    def evaluate(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(fn(z.real, z.imag), dtype=float), z.shape)

    return evaluate


@lru_cache(maxsize=None)
def monomial_disk_energy(degree: int) -> sympy.Expr:
    """Energy of [1 : z^degree] on the disk |z| < R, as a function of R.

    |df|^2 = d^2 r^(2d-2) / (pi (1 + r^(2d))^2) is radial.
    """
    d = sympy.Integer(degree)
    density = d ** 2 * r ** (2 * d - 2) / (sympy.pi * (1 + r ** (2 * d)) ** 2)
    return sympy.simplify(sympy.integrate(density * 2 * sympy.pi * r, (r, 0, R)))


def monomial_total_energy(degree: int) -> sympy.Expr:
    """Whole-plane energy of [1 : z^degree]; equals the degree."""
    return sympy.limit(monomial_disk_energy(degree), R, sympy.oo)


def line_square_energy(T: float) -> float:
    """Energy of [1 : z] on the square [-T, T]^2, from the radial density by 2D quadrature in sympy."""
    density = 1 / (sympy.pi * (1 + x ** 2 + y ** 2) ** 2)
    inner = sympy.integrate(density, (y, -T, T))
    return float(sympy.Integral(inner, (x, -T, T)).evalf(30))


@lru_cache(maxsize=None)
def line_characteristic() -> sympy.Expr:
    """T(R) = integral from 1 to R of E(s)/s ds for [1 : z], with E(s) = s^2/(1+s^2)."""
    s = sympy.symbols('s', positive=True)
    energy = monomial_disk_energy(1).subs(R, s)
    return sympy.simplify(sympy.integrate(energy / s, (s, 1, R)))


def line_characteristic_value(radius: float) -> float:
    return float(line_characteristic().subs(R, radius).evalf(30))


def to_serializable(expr: sympy.Basic) -> str:
    """String form with 17 significant digits for report files."""
    return str(sympy.N(expr, 17))
