"""Radial equations: finite-difference hydrogen eigensolver and residuals.

The Schrodinger radial equation

    R'' + (2/r) R' + (-lam/r^2 + 2 (E - V)) R = 0

is solved through ``u = r R``, which turns it into the Sturm-Liouville form
``-u''/2 + (V + lam/(2 r^2)) u = E u``.  A three-point discretization gives
a symmetric tridiagonal matrix.  Nothing here takes a covering parameter:
the radial problem is the same on every covering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import GridTooCoarse, InsideHorizon, NoBoundState

__all__ = [
    "RadialGrid",
    "RadialProblem",
    "BoundState",
    "coulomb",
    "solve_radial",
    "solve_radial_schrodinger",
    "radial_eigenpairs",
    "SampledFunction",
    "central_derivatives",
    "radial_derivatives",
    "radial_residual_schrodinger",
    "substituted_residual_schrodinger",
    "kg_radial_residual",
    "HydrogenRadial",
    "laguerre_coefficients",
    "rk4",
    "HORIZON_MARGIN",
    "DEFAULT_NPOINTS",
    "DEFAULT_RMAX_FACTOR",
]

DEFAULT_NPOINTS = 8000
DEFAULT_RMAX_FACTOR = 60.0
# r must exceed 2M (1 + HORIZON_MARGIN) for Schwarzschild evaluations
HORIZON_MARGIN = 1e-6


def coulomb(r):
    return -1.0 / np.asarray(r, dtype=float)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid of unknowns ``r_min .. r_max``.

    ``u`` is taken to vanish one step outside either end, so with
    ``r_min == spacing`` the left boundary sits exactly at the origin.
    """

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("n_points must be >= 3")
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_points)

    @classmethod
    def from_origin(cls, r_max: float, n_points: int = DEFAULT_NPOINTS) -> "RadialGrid":
        return cls(r_max / n_points, r_max, n_points)

    @classmethod
    def default(cls, n_target: int) -> "RadialGrid":
        """Grid sized for shell ``n_target``: r_max = 60 n^2, 8000 points."""
        return cls.from_origin(DEFAULT_RMAX_FACTOR * n_target * n_target, DEFAULT_NPOINTS)

    def refined(self) -> "RadialGrid":
        return RadialGrid.from_origin(self.r_max, 2 * self.n_points)


@dataclass(frozen=True)
class RadialProblem:
    """Angular eigenvalue ``lam`` and potential ``V(r)`` of the radial equation."""

    lam: float
    potential: Callable = field(default=coulomb)

    @classmethod
    def hydrogen(cls, l: int) -> "RadialProblem":
        return cls(lam=l * (l + 1), potential=coulomb)

    def effective_potential(self, r):
        r = np.asarray(r, dtype=float)
        return self.potential(r) + self.lam / (2.0 * r * r)


class BoundState(NamedTuple):
    energy: float
    nodes: int


def _count_nodes(u, rel_floor=1e-8):
    # ignore the exponentially small tail where sign flips are noise
    big = u[np.abs(u) > rel_floor * np.max(np.abs(u))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


def radial_eigenpairs(problem: RadialProblem, grid: RadialGrid, count: int):
    """Lowest ``count`` eigenvalues and eigenvectors of the FD operator."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > grid.n_points:
        raise ValueError("count exceeds the number of grid unknowns")
    h = grid.spacing
    r = grid.points
    diag = 1.0 / (h * h) + problem.effective_potential(r)
    off = np.full(grid.n_points - 1, -0.5 / (h * h))
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def solve_radial(
    problem: RadialProblem,
    grid: RadialGrid,
    count: int,
    energy_tol: float = 1e-4,
    self_check: bool = True,
    check_all: bool = False,
) -> list[BoundState]:
    """Lowest ``count`` bound states of ``problem`` on ``grid``.

    The self-check re-solves on a grid with twice the points and raises
    :class:`GridTooCoarse` if the highest requested level moves by more than
    ``10 * energy_tol``.  Grids are sized for that level, so lower levels
    are only checked with ``check_all=True``.
    """
    energies, vectors = radial_eigenpairs(problem, grid, count)
    if energies[0] >= 0:
        raise NoBoundState(f"no negative eigenvalue on grid r_max={grid.r_max}")
    if np.any(energies >= 0):
        found = int(np.count_nonzero(energies < 0))
        raise NoBoundState(f"only {found} of {count} requested states are bound on this grid")
    if self_check:
        fine, _ = radial_eigenpairs(problem, grid.refined(), count)
        moved = np.abs(fine - energies)
        drift = float(np.max(moved) if check_all else moved[-1])
        if drift > 10 * energy_tol:
            raise GridTooCoarse(
                f"eigenvalues moved by {drift:.3e} when n_points doubled "
                f"(limit {10 * energy_tol:.1e}); increase n_points or loosen energy_tol"
            )
    return [BoundState(float(e), _count_nodes(vectors[:, i])) for i, e in enumerate(energies)]


def solve_radial_schrodinger(
    l: int,
    grid: RadialGrid,
    count: int,
    energy_tol: float = 1e-4,
    self_check: bool = True,
    check_all: bool = False,
) -> list[BoundState]:
    """Lowest ``count`` hydrogen levels for angular momentum ``l``.

    Returns ``(energy, nodes)`` pairs sorted by energy; the principal number
    of each is ``nodes + l + 1``.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    return solve_radial(RadialProblem.hydrogen(l), grid, count, energy_tol, self_check, check_all)


# --- numerical derivatives -------------------------------------------------

_OFFSETS = np.arange(-2, 3, dtype=float)


class SampledFunction:
    """Values on a uniform grid with local quartic-interpolation derivatives.

    At grid nodes the derivatives reduce to the standard five-point central
    stencils.
    """

    def __init__(self, r0: float, step: float, values):
        self.r0 = float(r0)
        self.step = float(step)
        self.values = np.asarray(values)
        if self.values.ndim != 1 or self.values.size < 5:
            raise ValueError("need at least 5 samples")

    @property
    def r_end(self) -> float:
        return self.r0 + self.step * (self.values.size - 1)

    @property
    def points(self) -> np.ndarray:
        return self.r0 + self.step * np.arange(self.values.size)

    def node(self, i: int) -> float:
        return self.r0 + self.step * i

    def nearest_node(self, r: float, margin: int = 2) -> float:
        """Closest grid node at least ``margin`` nodes from either end."""
        i = int(round((r - self.r0) / self.step))
        return self.node(min(max(i, margin), self.values.size - 1 - margin))

    def derivatives(self, r: float):
        x = (r - self.r0) / self.step
        if x < -1e-9 or x > self.values.size - 1 + 1e-9:
            raise ValueError(f"r={r} outside sampled range [{self.r0}, {self.r_end}]")
        i = min(max(int(round(x)), 2), self.values.size - 3)
        local = self.values[i - 2 : i + 3]
        coef = np.polynomial.polynomial.polyfit(_OFFSETS, local, 4)
        t = x - i
        p = np.polynomial.Polynomial(coef)
        h = self.step
        return p(t), p.deriv(1)(t) / h, p.deriv(2)(t) / (h * h)

    def __call__(self, r):
        return self.derivatives(r)[0]


def central_derivatives(f: Callable, r: float, step: float):
    """Five-point central differences for a callable."""
    fm2, fm1, f0, fp1, fp2 = (f(r + d * step) for d in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * step * step)
    return f0, d1, d2


def radial_derivatives(R, r: float, step: float = 1e-3):
    """(R, R', R'') for a sampled function, an analytic object or a callable."""
    if hasattr(R, "derivatives"):
        return R.derivatives(r)
    return central_derivatives(R, r, step)


def radial_residual_schrodinger(l: int, energy: float, R, r: float, step: float = 1e-3, potential=coulomb):
    """Left side of R'' + (2/r) R' + (-l(l+1)/r^2 + 2 (E - V)) R at ``r``."""
    R0, R1, R2 = radial_derivatives(R, r, step)
    lam = l * (l + 1)
    return R2 + 2.0 / r * R1 + (-lam / (r * r) + 2.0 * (energy - float(potential(r)))) * R0


def substituted_residual_schrodinger(l: int, energy: float, u, r: float, step: float = 1e-3, potential=coulomb):
    """Left side of u'' + (2 (E - V) - l(l+1)/r^2) u for ``u = r R``."""
    u0, _, u2 = radial_derivatives(u, r, step)
    lam = l * (l + 1)
    return u2 + (2.0 * (energy - float(potential(r))) - lam / (r * r)) * u0


def kg_radial_residual(M: float, m_P: float, c1: float, c2: float, R, r: float, step: float = 1e-3):
    """Separated Klein-Gordon radial equation on the Schwarzschild exterior.

    Delta^2 R'' + 2 (r - M) Delta / r^2 R' + (Delta c1 / r^2 - Delta m_P^2 - c2) R
    with Delta = 1 - 2M/r.
    """
    if r <= 2 * M * (1 + HORIZON_MARGIN):
        raise InsideHorizon(f"r={r} is not outside the horizon 2M={2 * M}")
    R0, R1, R2 = radial_derivatives(R, r, step)
    delta = 1.0 - 2.0 * M / r
    return delta * delta * R2 + 2.0 * (r - M) * delta / (r * r) * R1 + (delta * c1 / (r * r) - delta * m_P * m_P - c2) * R0


# --- analytic hydrogen radial functions ------------------------------------


def laguerre_coefficients(n: int, alpha: int) -> tuple[Fraction, ...]:
    """Exact ascending coefficients of the generalized Laguerre L_n^alpha."""
    return tuple(
        Fraction((-1) ** i * math.comb(n + alpha, n - i), math.factorial(i)) for i in range(n + 1)
    )


class HydrogenRadial:
    """Unnormalized R_{n,l}(r) = r^l L_{n-l-1}^{2l+1}(2r/n) exp(-r/n).

    Stored as P(r) exp(-r/n) with P an exact polynomial, so all derivatives
    are analytic.
    """

    def __init__(self, n: int, l: int):
        if n < 1 or not 0 <= l <= n - 1:
            raise ValueError(f"need n >= 1 and 0 <= l <= n-1, got n={n}, l={l}")
        self.n, self.l = n, l
        lag = laguerre_coefficients(n - l - 1, 2 * l + 1)
        scale = Fraction(2, n)
        poly = [Fraction(0)] * l + [c * scale**i for i, c in enumerate(lag)]
        self.poly = np.polynomial.Polynomial([float(c) for c in poly])
        self.decay = 1.0 / n

    @property
    def energy(self) -> float:
        return -1.0 / (2 * self.n * self.n)

    def derivatives(self, r: float):
        a = self.decay
        P, P1, P2 = self.poly(r), self.poly.deriv(1)(r), self.poly.deriv(2)(r)
        e = math.exp(-a * r)
        return P * e, (P1 - a * P) * e, (P2 - 2 * a * P1 + a * a * P) * e

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.poly(r) * np.exp(-self.decay * r)


# --- integration -----------------------------------------------------------


def rk4(rhs: Callable, t0: float, y0, step: float, n_steps: int) -> np.ndarray:
    """Classical fourth-order Runge-Kutta; returns the ``n_steps + 1`` states."""
    y = np.array(y0, dtype=float)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    t = t0
    half = 0.5 * step
    for i in range(n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + half, y + half * k1)
        k3 = rhs(t + half, y + half * k2)
        k4 = rhs(t + step, y + step * k3)
        y = y + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * step
        out[i + 1] = y
    return out
