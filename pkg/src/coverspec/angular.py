"""Legendre polynomials and modified spherical harmonics on a covering.

On the covering with parameter ``k`` the regular angular eigenfunctions are

    Y(theta, phi) = exp(i m phi) sin(theta)**j  (d^j P_l / du^j)(cos theta)

with ``j = |m| / k`` a non-negative integer not exceeding ``l``.  Harmonics
are kept unnormalized; :meth:`ModifiedHarmonic.norm` gives the norm under
the covering measure ``k sin(theta) dtheta dphi``.

Polynomial coefficients are exact :class:`fractions.Fraction` values in the
monomial basis (ascending powers); conversion to float happens only at
evaluation time.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import Inadmissible, MismatchedCovering
from .rational import CoveringParameter

__all__ = [
    "LegendrePoly",
    "ModifiedHarmonic",
    "AngularPoint",
    "POLE_MARGIN",
    "legendre",
    "legendre_derivative",
    "poly_derivative",
    "poly_eval",
    "is_zero_poly",
    "derivative_order",
    "make_harmonic",
    "eval_harmonic",
    "angular_ode_residual",
    "theta_residual",
    "theta_residual_scale",
    "phi_residual",
    "inner_product",
    "interior_thetas",
    "sample_harmonic",
    "write_samples_csv",
    "SAMPLE_FIELDS",
]

# residuals are only evaluated on [POLE_MARGIN, pi - POLE_MARGIN]
POLE_MARGIN = 1e-3

ZERO_POLY = (Fraction(0),)


def poly_derivative(coeffs: Sequence[Fraction], order: int = 1) -> tuple[Fraction, ...]:
    """Exact ``order``-th derivative of an ascending-power coefficient list."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    c = tuple(Fraction(x) for x in coeffs)
    for _ in range(order):
        if len(c) <= 1:
            return ZERO_POLY
        c = tuple(i * c[i] for i in range(1, len(c)))
    return c if c else ZERO_POLY


def is_zero_poly(coeffs: Sequence[Fraction]) -> bool:
    return all(c == 0 for c in coeffs)


def poly_eval(coeffs: Sequence[Fraction], x):
    """Horner evaluation in floating point; ``x`` may be an array."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        acc = acc * x + float(c)
    return acc


@dataclass(frozen=True)
class LegendrePoly:
    l: int
    coeffs: tuple[Fraction, ...]

    def __call__(self, x):
        return poly_eval(self.coeffs, x)

    def exact(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


@lru_cache(maxsize=None)
def legendre(l: int) -> LegendrePoly:
    """P_l from Rodrigues' formula, in exact rationals.

    (x**2 - 1)**l = sum_i C(l, i) (-1)**(l-i) x**(2i); differentiating l
    times and dividing by 2**l l! gives the coefficients directly.
    """
    if isinstance(l, bool) or not isinstance(l, int) or l < 0:
        raise ValueError(f"degree must be a non-negative int, got {l!r}")
    coeffs = [Fraction(0)] * (l + 1)
    scale = 2**l * math.factorial(l)
    for i in range(l + 1):
        power = 2 * i
        if power < l:
            continue
        # d^l/dx^l x**power = power!/(power-l)! x**(power-l)
        falling = math.factorial(power) // math.factorial(power - l)
        coeffs[power - l] = Fraction(math.comb(l, i) * (-1) ** (l - i) * falling, scale)
    return LegendrePoly(l, tuple(coeffs))


def legendre_derivative(P: LegendrePoly, j: int) -> tuple[Fraction, ...]:
    """Coefficients of d^j P_l / dx^j; the zero polynomial once j > l."""
    return poly_derivative(P.coeffs, j)


def derivative_order(m: int, k: CoveringParameter) -> int | None:
    """``|m| / k`` when it is an integer, else None.

    For rational k in lowest terms, m**2/k**2 is an integer exactly when
    m/k is, so the single divisibility test covers both forms.
    """
    num = abs(m) * k.q
    if num % k.p:
        return None
    return num // k.p


@dataclass(frozen=True)
class AngularPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi:
            raise ValueError(f"theta={self.theta} must lie strictly inside (0, pi)")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi={self.phi} must lie in [0, 2pi)")


@dataclass(frozen=True)
class ModifiedHarmonic:
    l: int
    m: int
    j: int
    k: CoveringParameter
    deriv_coeffs: tuple[Fraction, ...] = field(repr=False)

    @property
    def lam(self) -> int:
        return self.l * (self.l + 1)

    @property
    def mu(self) -> int:
        # m**2 / k**2, exact because j is an integer
        return self.j * self.j

    def theta_factor(self, theta):
        """Theta(theta) and its first two theta-derivatives, analytically.

        With s = sin, c = cos and D = d^j P_l:
            Theta   = s^j D(c)
            Theta'  = j s^(j-1) c D - s^(j+1) D'
            Theta'' = j(j-1) s^(j-2) c^2 D - j s^j D - (2j+1) s^j c D' + s^(j+2) D''
        """
        theta = np.asarray(theta, dtype=float)
        j = self.j
        s, c = np.sin(theta), np.cos(theta)
        d0 = poly_eval(self.deriv_coeffs, c)
        d1 = poly_eval(poly_derivative(self.deriv_coeffs, 1), c)
        d2 = poly_eval(poly_derivative(self.deriv_coeffs, 2), c)
        sj = s**j
        value = sj * d0
        first = -s ** (j + 1) * d1
        second = -j * sj * d0 - (2 * j + 1) * sj * c * d1 + s ** (j + 2) * d2
        if j >= 1:
            first = first + j * s ** (j - 1) * c * d0
        if j >= 2:
            second = second + j * (j - 1) * s ** (j - 2) * c * c * d0
        return value, first, second

    def phi_factor(self, phi):
        return np.exp(1j * self.m * np.asarray(phi, dtype=float))

    def __call__(self, theta, phi):
        value, _, _ = self.theta_factor(theta)
        return value * self.phi_factor(phi)

    def norm(self) -> float:
        return math.sqrt(inner_product(self, self).real)


def make_harmonic(l: int, m: int, k: CoveringParameter) -> ModifiedHarmonic:
    """Build the modified harmonic for (l, m) on the covering ``k``.

    Raises :class:`Inadmissible` if ``|m|/k`` is not an integer (no regular
    solution) or exceeds ``l`` (the harmonic vanishes identically).
    """
    if isinstance(l, bool) or not isinstance(l, int) or l < 0:
        raise ValueError(f"l must be a non-negative int, got {l!r}")
    j = derivative_order(m, k)
    if j is None:
        raise Inadmissible(m, f"|m|/k = {abs(m)}*{k.q}/{k.p} is not an integer")
    if j > l:
        raise Inadmissible(m, f"|m|/k = {j} exceeds l = {l}")
    return ModifiedHarmonic(l=l, m=m, j=j, k=k, deriv_coeffs=legendre_derivative(legendre(l), j))


def eval_harmonic(Y: ModifiedHarmonic, x: AngularPoint) -> complex:
    return complex(Y(x.theta, x.phi))


def angular_ode_residual(theta, derivs, lam, mu):
    """Left side of Theta'' + cot Theta' + (lam - mu / sin^2) Theta.

    Shared by the Schrodinger and Klein-Gordon angular equations; callers
    translate their separation constants into (lam, mu).
    """
    theta = np.asarray(theta, dtype=float)
    value, first, second = derivs
    s = np.sin(theta)
    return second + np.cos(theta) / s * first + (lam - mu / (s * s)) * value


def theta_residual(Y: ModifiedHarmonic, theta):
    return angular_ode_residual(theta, Y.theta_factor(theta), Y.lam, Y.mu)


def theta_residual_scale(Y: ModifiedHarmonic, theta):
    """``1 + |Theta| + |Theta'| + |Theta''|``, the yardstick for residuals.

    Unnormalized harmonics reach ~1e11 for l = 12, so absolute residual
    tolerances are measured against this scale.
    """
    value, first, second = Y.theta_factor(theta)
    return 1.0 + np.abs(value) + np.abs(first) + np.abs(second)


def phi_residual(m: int, phi) -> float:
    """|Phi'' + m^2 Phi| for Phi = exp(i m phi), Phi'' taken analytically."""
    phi = np.asarray(phi, dtype=float)
    Phi = np.exp(1j * m * phi)
    Phi_pp = -(m * m) * Phi
    return np.abs(Phi_pp + (m * m) * Phi)


def inner_product(Y1: ModifiedHarmonic, Y2: ModifiedHarmonic, nodes: int | None = None) -> complex:
    """<Y1, Y2> with measure ``k sin(theta) dtheta dphi``.

    The phi integral is done exactly (2 pi when m1 == m2, else 0); the
    theta integral uses Gauss-Legendre quadrature in u = cos(theta).
    """
    if Y1.k != Y2.k:
        raise MismatchedCovering(f"harmonics live on k={Y1.k} and k={Y2.k}")
    if Y1.m != Y2.m:
        return 0j
    # same m on the same covering forces j1 == j2, so the integrand
    # (1-u^2)^j D1 D2 is a polynomial of degree l1 + l2
    n = max(nodes or 0, Y1.l + Y2.l + 1)
    u, w = np.polynomial.legendre.leggauss(n)
    f = (1.0 - u * u) ** Y1.j * poly_eval(Y1.deriv_coeffs, u) * poly_eval(Y2.deriv_coeffs, u)
    integral = math.fsum(w * f)
    return complex(2 * math.pi * float(Y1.k) * integral)


def interior_thetas(count: int, margin: float = POLE_MARGIN) -> np.ndarray:
    return np.linspace(margin, math.pi - margin, count)


SAMPLE_FIELDS = ("l", "m", "p", "q", "theta", "phi", "re", "im")


def sample_harmonic(Y: ModifiedHarmonic, thetas: Iterable[float], phis: Iterable[float]) -> list[dict]:
    rows = []
    phis = list(phis)
    for theta in thetas:
        for phi in phis:
            z = eval_harmonic(Y, AngularPoint(float(theta), float(phi)))
            rows.append(
                {
                    "l": Y.l,
                    "m": Y.m,
                    "p": Y.k.p,
                    "q": Y.k.q,
                    "theta": float(theta),
                    "phi": float(phi),
                    "re": z.real,
                    "im": z.imag,
                }
            )
    return rows


def write_samples_csv(rows: Iterable[dict], fh) -> None:
    # repr() of a float is the shortest round-tripping decimal
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SAMPLE_FIELDS)
    for row in rows:
        writer.writerow([repr(row[f]) if isinstance(row[f], float) else row[f] for f in SAMPLE_FIELDS])
