"""Klein-Gordon modes on covering backgrounds and full-operator residuals.

Every background here is static and spherically symmetric up to the
covering factor ``k^2`` on the azimuthal term:

    ds^2 = A(r) dt^2 - B(r) dr^2 - r^2 (dtheta^2 + k^2 sin^2 theta dphi^2)

For such a metric the scalar wave operator plus mass is

    (1/A) d_tt - 1/(sqrt(AB) r^2) d_r (r^2 sqrt(A/B) d_r)
      - (1/r^2) (d_thth + cot d_th + 1/(k^2 sin^2) d_phph) + m_P^2

Schwarzschild has A = 1/B = 1 - 2M/r, the cosmic string A = 1, B = b^-2,
and the Euclidean covering A = B = 1.

Separated modes use T = exp(i omega t) (so c2 = -omega^2), c1 = -l(l+1)
and c3 = (m/k)^2.  The angular factor is the modified harmonic from
:mod:`coverspec.angular`, and the theta equation is checked by the same
residual routine the Schrodinger side uses.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import angular
from .angular import ModifiedHarmonic, make_harmonic
from .errors import InsideHorizon
from .radial import HORIZON_MARGIN, HydrogenRadial, SampledFunction, radial_derivatives, rk4
from .rational import CoveringParameter

__all__ = [
    "BackgroundKind",
    "Background",
    "SeparatedMode",
    "SpacetimePoint",
    "build_mode",
    "kg_theta_residual",
    "radial_rhs",
    "integrate_radial",
    "default_radial_window",
    "kg_radial_residual_generic",
    "full_kg_residual",
    "factorized_bound",
    "full_schrodinger_residual",
    "sample_points",
    "residual_report",
]


class BackgroundKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SCHWARZSCHILD = "schwarzschild"
    COSMIC_STRING = "cosmic-string"


@dataclass(frozen=True)
class Background:
    kind: BackgroundKind
    k: CoveringParameter
    M: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind is BackgroundKind.SCHWARZSCHILD and not self.M > 0:
            raise ValueError("Schwarzschild mass M must be positive")
        if self.kind is BackgroundKind.COSMIC_STRING:
            if not self.b > 0:
                raise ValueError("cosmic-string parameter b must be positive")
            if self.k.p > self.k.q:
                warnings.warn(f"cosmic-string covering usually has 0 < k <= 1, got k={self.k}", stacklevel=3)

    @classmethod
    def euclidean(cls, k: CoveringParameter) -> "Background":
        return cls(BackgroundKind.EUCLIDEAN, k)

    @classmethod
    def schwarzschild(cls, M: float, k: CoveringParameter) -> "Background":
        return cls(BackgroundKind.SCHWARZSCHILD, k, M=float(M))

    @classmethod
    def cosmic_string(cls, b: float, k: CoveringParameter) -> "Background":
        return cls(BackgroundKind.COSMIC_STRING, k, b=float(b))

    @property
    def horizon(self) -> float:
        return 2.0 * self.M if self.kind is BackgroundKind.SCHWARZSCHILD else 0.0

    def check_radius(self, r: float) -> None:
        if r <= 0:
            raise ValueError(f"r must be positive, got {r}")
        if self.kind is BackgroundKind.SCHWARZSCHILD and r <= self.horizon * (1 + HORIZON_MARGIN):
            raise InsideHorizon(f"r={r} is not outside the horizon r=2M={self.horizon}")

    def metric(self, r: float) -> tuple[float, float]:
        """(A, B): |g_tt| and |g_rr| at radius r."""
        if self.kind is BackgroundKind.SCHWARZSCHILD:
            delta = 1.0 - 2.0 * self.M / r
            return delta, 1.0 / delta
        if self.kind is BackgroundKind.COSMIC_STRING:
            return 1.0, self.b**-2
        return 1.0, 1.0

    def radial_coefficients(self, r: float) -> tuple[float, float, float, float]:
        """(1/A, sqrt(A/B), d/dr sqrt(A/B), sqrt(AB)), closed forms per background."""
        if self.kind is BackgroundKind.SCHWARZSCHILD:
            delta = 1.0 - 2.0 * self.M / r
            return 1.0 / delta, delta, 2.0 * self.M / (r * r), 1.0
        if self.kind is BackgroundKind.COSMIC_STRING:
            return 1.0, self.b, 0.0, 1.0 / self.b
        return 1.0, 1.0, 0.0, 1.0

    def angular_coefficients(self, theta: float) -> tuple[float, float, float]:
        """Coefficients of (d_thth, d_th, d_phph) in the angular operator."""
        s = math.sin(theta)
        return 1.0, math.cos(theta) / s, 1.0 / (float(self.k) ** 2 * s * s)


@dataclass(frozen=True)
class SeparatedMode:
    c1: float
    c2: float
    c3: float
    m_P: float
    omega: float
    harmonic: ModifiedHarmonic = field(repr=False)
    oscillatory: bool = True

    @property
    def l(self) -> int:
        return self.harmonic.l

    @property
    def m(self) -> int:
        return self.harmonic.m

    @property
    def k(self) -> CoveringParameter:
        return self.harmonic.k

    @property
    def lam(self) -> float:
        return -self.c1

    @property
    def mu(self) -> float:
        return self.c3

    @property
    def schrodinger_energy(self) -> float:
        """Energy paired with this mode through m_P^2 = 2 E (metadata only)."""
        return 0.5 * self.m_P**2

    def temporal(self, t: float) -> tuple[complex, complex]:
        """T(t) and T''(t) in closed form."""
        if self.oscillatory:
            T = complex(math.cos(self.omega * t), math.sin(self.omega * t))
            return T, -(self.omega**2) * T
        T = complex(math.exp(self.omega * t))
        return T, self.omega**2 * T


def build_mode(
    l: int,
    m: int,
    k: CoveringParameter,
    m_P: float,
    omega: float,
    oscillatory: bool = True,
) -> SeparatedMode:
    """Separation constants for the admissible mode (l, m) on covering k.

    ``oscillatory=False`` selects T = exp(omega t), i.e. c2 = +omega^2.
    """
    if m_P < 0:
        raise ValueError("particle mass m_P must be non-negative")
    Y = make_harmonic(l, m, k)
    c2 = -(omega**2) if oscillatory else omega**2
    return SeparatedMode(
        c1=float(-Y.lam),
        c2=float(c2),
        c3=float(Y.mu),
        m_P=float(m_P),
        omega=float(omega),
        harmonic=Y,
        oscillatory=oscillatory,
    )


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not 0.0 < self.theta < math.pi:
            raise ValueError("theta must lie strictly inside (0, pi)")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError("phi must lie in [0, 2pi)")


def kg_theta_residual(mode: SeparatedMode, theta):
    """Theta'' + cot Theta' - (c1 + c3/sin^2) Theta, via the shared angular residual."""
    return angular.angular_ode_residual(theta, mode.harmonic.theta_factor(theta), -mode.c1, mode.c3)


# --- radial factor ---------------------------------------------------------


def radial_rhs(bg: Background, mode: SeparatedMode):
    """First-order system y = (R, R') for the separated radial equation.

    Derived from the metric, not from the Schwarzschild-specific form:
        s R'' + (2s/r + s') R' = w (c2/A - c1/r^2 + m_P^2) R
    with s = sqrt(A/B), w = sqrt(AB).
    """
    c1, c2, mass2 = mode.c1, mode.c2, mode.m_P**2

    def rhs(r, y):
        inv_a, s, ds, w = bg.radial_coefficients(r)
        R, dR = y
        d2R = (w * (c2 * inv_a - c1 / (r * r) + mass2) * R - (2.0 * s / r + ds) * dR) / s
        return np.array([dR, d2R])

    return rhs


def default_radial_window(bg: Background) -> tuple[float, float]:
    """[3M, 30M] for Schwarzschild, [3, 30] otherwise."""
    scale = bg.M if bg.kind is BackgroundKind.SCHWARZSCHILD else 1.0
    return 3.0 * scale, 30.0 * scale


def integrate_radial(
    bg: Background,
    mode: SeparatedMode,
    r_start: float | None = None,
    r_end: float | None = None,
    n_steps: int = 27000,
    R0: float = 1.0,
    dR0: float = 0.0,
) -> SampledFunction:
    """RK4 solution of the radial equation, sampled at every step."""
    lo, hi = default_radial_window(bg)
    r_start = lo if r_start is None else r_start
    r_end = hi if r_end is None else r_end
    bg.check_radius(r_start)
    step = (r_end - r_start) / n_steps
    states = rk4(radial_rhs(bg, mode), r_start, (R0, dR0), step, n_steps)
    return SampledFunction(r_start, step, states[:, 0])


def kg_radial_residual_generic(bg: Background, mode: SeparatedMode, R, r: float, step: float = 1e-3):
    """1/(w r^2) (r^2 s R')' - (c2/A - c1/r^2 + m_P^2) R.

    On Schwarzschild this equals the textbook separated form divided by
    Delta.
    """
    bg.check_radius(r)
    R0, R1, R2 = radial_derivatives(R, r, step)
    inv_a, s, ds, w = bg.radial_coefficients(r)
    flux = (s * R2 + (2.0 * s / r + ds) * R1) / w
    return flux - (mode.c2 * inv_a - mode.c1 / (r * r) + mode.m_P**2) * R0


# --- full operators --------------------------------------------------------


def _angular_pieces(Y: ModifiedHarmonic, theta: float, phi: float):
    value, first, second = (float(v) for v in Y.theta_factor(theta))
    Phi = complex(math.cos(Y.m * phi), math.sin(Y.m * phi))
    Phi_pp = -(Y.m**2) * Phi
    return value, first, second, Phi, Phi_pp


def full_kg_residual(bg: Background, mode: SeparatedMode, x: SpacetimePoint, R, step: float = 1e-3) -> float:
    """|(Box + m_P^2) Psi| at x for Psi = T R Theta Phi.

    T, Theta and Phi are differentiated analytically; R via
    :func:`coverspec.radial.radial_derivatives`.
    """
    if mode.k != bg.k:
        raise ValueError(f"mode built for k={mode.k} but background has k={bg.k}")
    bg.check_radius(x.r)
    r = x.r
    T, T_tt = mode.temporal(x.t)
    R0, R1, R2 = radial_derivatives(R, r, step)
    th, th1, th2, Phi, Phi_pp = _angular_pieces(mode.harmonic, x.theta, x.phi)
    inv_a, s, ds, w = bg.radial_coefficients(r)
    a_tt, a_t, a_pp = bg.angular_coefficients(x.theta)

    time_part = inv_a * T_tt * R0 * th * Phi
    radial_part = (s * R2 + (2.0 * s / r + ds) * R1) / w * T * th * Phi
    angular_part = T * R0 * (a_tt * th2 * Phi + a_t * th1 * Phi + a_pp * th * Phi_pp) / (r * r)
    mass_part = mode.m_P**2 * T * R0 * th * Phi
    return abs(time_part - radial_part - angular_part + mass_part)


def factorized_bound(bg: Background, mode: SeparatedMode, x: SpacetimePoint, R, step: float = 1e-3) -> float:
    """Upper bound on the full residual from the four separated residuals.

    (Box + m^2) Psi = eps_T/A R Th Ph - eps_R T Th Ph
                      - T R / r^2 (eps_Th Ph + Th eps_Ph / (k^2 sin^2))
    """
    r = x.r
    T, T_tt = mode.temporal(x.t)
    R0 = radial_derivatives(R, r, step)[0]
    th, th1, th2, Phi, Phi_pp = _angular_pieces(mode.harmonic, x.theta, x.phi)
    inv_a = bg.radial_coefficients(r)[0]
    kf = float(mode.k)
    s2 = math.sin(x.theta) ** 2

    eps_t = abs(T_tt - mode.c2 * T)
    eps_r = abs(kg_radial_residual_generic(bg, mode, R, r, step))
    eps_th = abs(float(kg_theta_residual(mode, x.theta)))
    eps_ph = abs(Phi_pp + kf * kf * mode.c3 * Phi)
    return (
        eps_t * inv_a * abs(R0 * th)
        + eps_r * abs(th)
        + abs(R0) / (r * r) * (eps_th + abs(th) * eps_ph / (kf * kf * s2))
    )


def full_schrodinger_residual(k: CoveringParameter, n: int, l: int, m: int, x) -> float:
    """|bracket applied to Psi| for the hydrogen state (n, l, m) on covering k.

    Psi = R_{n,l}(r) Y(theta, phi) with the analytic hydrogen radial factor
    and E = -1/(2 n^2); the azimuthal term uses 1/(k^2 sin^2) directly.
    """
    r, theta, phi = x
    Y = make_harmonic(l, m, k)
    radial = HydrogenRadial(n, l)
    R0, R1, R2 = radial.derivatives(r)
    th, th1, th2, Phi, Phi_pp = _angular_pieces(Y, theta, phi)
    s = math.sin(theta)
    kf = float(k)
    energy = radial.energy
    potential = -1.0 / r

    radial_part = (R2 + 2.0 / r * R1) * th * Phi
    angular_part = R0 * (th2 * Phi + Phi_pp * th / (kf * kf * s * s) + math.cos(theta) / s * th1 * Phi) / (r * r)
    source = 2.0 * (energy - potential) * R0 * th * Phi
    return abs(radial_part + angular_part + source)


# --- sampling --------------------------------------------------------------


def sample_points(
    rng: np.random.Generator,
    count: int,
    r_range: tuple[float, float],
    t_range: tuple[float, float] = (0.0, 10.0),
    margin: float = angular.POLE_MARGIN,
) -> list[SpacetimePoint]:
    pts = []
    for _ in range(count):
        pts.append(
            SpacetimePoint(
                t=float(rng.uniform(*t_range)),
                r=float(rng.uniform(*r_range)),
                theta=float(rng.uniform(margin, math.pi - margin)),
                phi=float(rng.uniform(0.0, 2 * math.pi)),
            )
        )
    return pts


def residual_report(
    bg: Background,
    mode: SeparatedMode,
    samples: int = 20,
    seed: int = 0,
    n_steps: int = 27000,
    threads: int = 1,
) -> dict:
    """Max and mean full residual over seeded sample points.

    The radial factor comes from :func:`integrate_radial` on the default
    window.  Sample radii are snapped to RK4 nodes so the five-point stencil
    runs at the integration step and never leaves the sampled range.
    """
    R = integrate_radial(bg, mode, n_steps=n_steps)
    rng = np.random.default_rng(seed)
    points = [
        dataclasses.replace(p, r=R.nearest_node(p.r))
        for p in sample_points(rng, samples, (R.r0, R.r_end))
    ]

    def one(p):
        return full_kg_residual(bg, mode, p, R)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, points))
    else:
        values = [one(p) for p in points]
    return {
        "background": bg.kind.value,
        "k": str(bg.k),
        "M": bg.M,
        "b": bg.b,
        "l": mode.l,
        "m": mode.m,
        "omega": mode.omega,
        "mp": mode.m_P,
        "c1": mode.c1,
        "c2": mode.c2,
        "c3": mode.c3,
        "samples": samples,
        "seed": seed,
        "max_residual": max(values),
        "mean_residual": sum(values) / len(values),
    }
