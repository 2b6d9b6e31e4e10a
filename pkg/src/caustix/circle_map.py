"""Off-center reflection maps of the circle and their lifts.

The family is parametrized by the radius ``r`` of the light source ``(r, 0)``
and a phase offset ``omega``.  Angles on the universal cover are plain
floats; :func:`wrap_angle` projects them onto the canonical interval
``(-pi, pi]``.

All functions accept numpy arrays for the angle argument.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .jet import Jet4

TWO_PI = 2.0 * math.pi

# r within this distance of 1/3 is treated as the critical radius
CRITICAL_R_TOL = 1e-12


class DomainError(ValueError):
    """Parameter outside the domain of the map family."""


class Variant(str, enum.Enum):
    REFLECT = "reflect"
    CONJUGATE = "conjugate"


class MapClass(str, enum.Enum):
    DIFFEOMORPHISM = "diffeomorphism"
    CRITICAL_HOMEOMORPHISM = "critical-homeomorphism"
    DEGREE_ONE_NONINJECTIVE = "degree-one-noninjective"


def wrap_angle(x):
    """Project a lifted angle to ``(-pi, pi]``; angles already there are returned unchanged."""
    if np.ndim(x):
        x = np.asarray(x, dtype=float)
        m = np.mod(math.pi - x, TWO_PI)
        m = np.where(m >= TWO_PI, 0.0, m)
        return np.where((x > -math.pi) & (x <= math.pi), x, math.pi - m)
    if -math.pi < x <= math.pi:
        return x
    m = (math.pi - x) % TWO_PI
    # the remainder can round up to exactly 2 pi for tiny negative inputs
    if m >= TWO_PI:
        m = 0.0
    return math.pi - m


def circle_distance(a, b):
    """Distance between two angles measured along the circle, in ``[0, pi]``."""
    return np.abs(wrap_angle(np.asarray(a) - np.asarray(b)))


def check_radius(r: float) -> float:
    r = float(r)
    if not (0.0 <= r < 1.0) or math.isnan(r):
        raise DomainError(f"radius must satisfy 0 <= r < 1, got {r!r}")
    return r


@dataclass(frozen=True)
class MapParams:
    """One member of the family: ``phi -> phi + omega -+ 2 alpha(phi)``.

    ``omega`` is stored in its canonical form in ``(-pi, pi]``; ``omega=pi``
    with the reflect variant is the plain off-center reflection.
    """

    r: float
    omega: float = math.pi
    variant: Variant = Variant.REFLECT

    def __post_init__(self):
        object.__setattr__(self, "r", check_radius(self.r))
        omega = float(self.omega)
        if not math.isfinite(omega):
            raise DomainError(f"omega must be finite, got {omega!r}")
        object.__setattr__(self, "omega", float(wrap_angle(omega)))
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def sign(self) -> float:
        """Coefficient of ``alpha`` in the lift: -2 for reflect, +2 for conjugate."""
        return -2.0 if self.variant is Variant.REFLECT else 2.0


def reflection(r: float) -> MapParams:
    """The plain off-center reflection ``R_r`` (``omega = pi``)."""
    return MapParams(r, math.pi, Variant.REFLECT)


def incident_angle(r: float, phi):
    """Incident angle of the ray from ``(r, 0)`` hitting the circle at ``phi``.

    Computed as ``Arg(1 - r e^{-i phi})``, which equals
    ``Arg(cos phi - r + i sin phi) - phi`` but never needs a branch fix:
    the real part ``1 - r cos phi`` is positive, so ``|alpha| < pi/2``.
    """
    r = check_radius(r)
    return np.arctan2(r * np.sin(phi), 1.0 - r * np.cos(phi))


def series_tail_bound(r: float, K: int) -> float:
    """Bound on the error of the K-term sine series of the incident angle."""
    return r ** (K + 1) / ((K + 1) * (1.0 - r))


def series_terms_for(r: float, tol: float) -> int:
    """Smallest K whose tail bound is below ``tol``."""
    r = check_radius(r)
    if r == 0.0:
        return 1
    K = 1
    while series_tail_bound(r, K) >= tol:
        K += 1
    return K


def incident_angle_series(r: float, phi, K: int):
    """Truncated Fourier sine series ``sum_{k<=K} r^k/k sin(k phi)``."""
    r = check_radius(r)
    if int(K) != K or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    phi = np.asarray(phi, dtype=float)
    k = np.arange(1, K + 1, dtype=float)
    # r**k underflows harmlessly to 0 for large k
    coef = r**k / k
    terms = coef * np.sin(np.multiply.outer(phi, k))
    # sum the small terms first
    out = terms[..., ::-1].sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def alpha_jet(r: float, phi) -> Jet4:
    """Jet of the incident angle at ``phi``.

    The derivatives come from differentiating the sine series termwise and
    summing in closed form, with ``w = r e^{i phi}``:
    ``alpha^(j) = Im(i^j sum_k k^(j-1) w^k)``.
    """
    w = r * np.exp(1j * np.asarray(phi, dtype=float))
    u = 1.0 / (1.0 - w)
    a0 = np.arctan2(r * np.sin(phi), 1.0 - r * np.cos(phi))
    a1 = (w * u).real
    a2 = -(w * u**2).imag
    a3 = -(w * (1.0 + w) * u**3).real
    a4 = (w * (1.0 + 4.0 * w + w * w) * u**4).imag
    if np.ndim(phi) == 0:
        return Jet4(float(a0), float(a1), float(a2), float(a3), float(a4))
    return Jet4(a0, a1, a2, a3, a4)


def map_lift(p: MapParams, x):
    """Lift of the map: ``x + omega - 2 alpha(x)`` (reflect) or ``+ 2 alpha(x)``."""
    if p.r == 0.0:
        return x + p.omega
    return x + p.omega + p.sign * np.arctan2(p.r * np.sin(x), 1.0 - p.r * np.cos(x))


def map_jet(p: MapParams, phi) -> Jet4:
    """Value and first four derivatives of the lift at ``phi``."""
    a = alpha_jet(p.r, phi)
    s = p.sign
    return Jet4(phi + p.omega + s * a.d0, 1.0 + s * a.d1, s * a.d2, s * a.d3, s * a.d4)


def iterate_lift(p: MapParams, x, n: int):
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    for _ in range(n):
        x = map_lift(p, x)
    return x


def iterate_jet(p: MapParams, phi, n: int) -> Jet4:
    """Jet of the n-th iterate, built by repeated jet composition."""
    if n < 1:
        raise ValueError("iteration count must be positive")
    jet = map_jet(p, phi)
    for _ in range(n - 1):
        jet = map_jet(p, jet.d0).compose(jet)
    return jet


def orbit_lift(p: MapParams, x, n: int) -> np.ndarray:
    """Lifted orbit ``x, F(x), ..., F^n(x)``."""
    out = np.empty((n + 1,) + np.shape(x))
    out[0] = x
    for k in range(n):
        x = map_lift(p, x)
        out[k + 1] = x
    return out


def blaschke_boundary(r: float, phi):
    """Argument of ``-z^2 (1 - r z)/(z - r)`` at ``z = e^{i phi}``."""
    r = check_radius(r)
    z = np.exp(1j * np.asarray(phi, dtype=float))
    val = np.angle(-z * z * (1.0 - r * z) / (z - r))
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class CriticalPoints:
    points: tuple
    degenerate: bool = False


def critical_points(r: float) -> CriticalPoints:
    """Zeros of the derivative of ``R_r``; they exist only for ``r >= 1/3``."""
    r = check_radius(r)
    if r == 0.0:
        return CriticalPoints(())
    c = (1.0 + 3.0 * r * r) / (4.0 * r)
    if abs(r - 1.0 / 3.0) <= CRITICAL_R_TOL:
        return CriticalPoints((0.0,), degenerate=True)
    if c > 1.0:
        return CriticalPoints(())
    phi = math.acos(c)
    return CriticalPoints((phi, -phi))


def map_class(r: float) -> MapClass:
    r = check_radius(r)
    if abs(r - 1.0 / 3.0) <= CRITICAL_R_TOL:
        return MapClass.CRITICAL_HOMEOMORPHISM
    return MapClass.DIFFEOMORPHISM if r < 1.0 / 3.0 else MapClass.DEGREE_ONE_NONINJECTIVE


def is_homeomorphism(p: MapParams) -> bool:
    if p.variant is Variant.CONJUGATE:
        return True
    return map_class(p.r) is not MapClass.DEGREE_ONE_NONINJECTIVE


def displacement_field(r, phi):
    """``R_r(phi) - (phi + pi)`` as a function of polar coordinates ``(r, phi)``."""
    r = np.asarray(r, dtype=float)
    return -2.0 * np.arctan2(r * np.sin(phi), 1.0 - r * np.cos(phi))


def polar_laplacian(fn, r, phi, h: float):
    """Five-point polar Laplacian ``u_rr + u_r/r + u_phiphi/r^2`` with step ``h``."""
    u0 = fn(r, phi)
    urr = (fn(r + h, phi) - 2.0 * u0 + fn(r - h, phi)) / (h * h)
    ur = (fn(r + h, phi) - fn(r - h, phi)) / (2.0 * h)
    upp = (fn(r, phi + h) - 2.0 * u0 + fn(r, phi - h)) / (h * h)
    return urr + ur / r + upp / (r * r)
