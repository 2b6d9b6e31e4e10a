"""Caustics (envelopes of chords) of iterates of the reflection family.

For a circle map ``f`` the chord joining ``phi`` to ``f(phi)`` sweeps out an
envelope

    x = (f' cos phi + cos f) / (1 + f'),   y = (f' sin phi + sin f) / (1 + f')

which escapes to infinity where ``1 + f' = 0``.  Derivatives of the envelope
are computed exactly from the derivative jet of ``f`` (no numerical
differentiation), so cusp classification does not depend on step sizes.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .circle_map import (
    MapParams,
    Variant,
    check_radius,
    circle_distance,
    critical_points,
    iterate_jet,
    is_homeomorphism,
    iterate_lift,
    map_jet,
    map_lift,
    reflection,
    wrap_angle,
)
from .jet import Jet4, jcos, jsin
from .series import Series, caustic_series, leading_order

INFINITY_TOL = 1e-12
ZERO_TOL = 1e-9
DEFAULT_SCAN = 8192
COMPRESSED_INFINITY = 2.0


class CuspKind(str, enum.Enum):
    SEMICUBICAL = "semicubical"
    CIRCLE_TANGENCY = "circle-tangency"
    DEGENERATE = "degenerate"


class Relation(str, enum.Enum):
    """Symmetric relations ``f(phi) = target(phi)`` between a point and its image."""

    FIXED_POINT = "fixed-point"
    MINUS_PHI = "minus-phi"
    PLUS_PI = "plus-pi"
    PI_MINUS_PHI = "pi-minus-phi"

    def target(self, phi):
        if self is Relation.FIXED_POINT:
            return phi
        if self is Relation.MINUS_PHI:
            return -phi
        if self is Relation.PLUS_PI:
            return phi + math.pi
        return math.pi - phi


class CuspResolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChordLine:
    """Line ``a x + b y = c`` through ``e^{i phi}`` and ``e^{i f(phi)}``."""

    a: float
    b: float
    c: float
    degenerate: bool


@dataclass(frozen=True)
class CausticSample:
    phi: float
    x: float
    y: float
    at_infinity: bool
    # direction (mod pi) in which the envelope escapes; only set at infinity
    direction: Optional[float]
    tangent: tuple
    singular: bool

    @property
    def radius(self) -> float:
        return math.inf if self.at_infinity else math.hypot(self.x, self.y)


@dataclass(frozen=True)
class CuspRecord:
    phi_star: float
    kind: CuspKind
    discriminant: float
    residuals: tuple

    def as_dict(self) -> dict:
        return {"phi": self.phi_star, "kind": self.kind.value, "discriminant": self.discriminant}


@dataclass(frozen=True)
class LocalModel:
    phi_a: float
    x_coeffs: dict
    y_coeffs: dict
    window: float
    condition: float
    residual: float


def _f_jet(p: MapParams, n: int, phi) -> Jet4:
    if n < 1:
        raise ValueError("iterate index n must be >= 1")
    return iterate_jet(p, phi, n)


def envelope_jets(fj: Jet4, phi) -> tuple:
    """Jets of the envelope coordinates given the jet of ``f`` at ``phi``.

    Orders 0..3 are exact; order 4 would need f to order 5 and is NaN.
    """
    t = Jet4.variable(phi)
    fp = fj.derivative()
    den = (1.0 + fp).reciprocal()
    xj = (fp * jcos(t) + jcos(fj)) * den
    yj = (fp * jsin(t) + jsin(fj)) * den
    return xj, yj


def caustic_derivatives(p: MapParams, n: int, phi) -> tuple:
    """``(x, y)`` jets of the caustic of the n-th iterate at ``phi``."""
    return envelope_jets(_f_jet(p, n, phi), phi)


def chord_line(p: MapParams, n: int, phi: float, tol: float = 1e-12) -> ChordLine:
    f = float(iterate_lift(p, phi, n))
    a = math.sin(f) - math.sin(phi)
    b = -(math.cos(f) - math.cos(phi))
    c = math.sin(f - phi)
    return ChordLine(a, b, c, bool(circle_distance(f, phi) < tol))


def _sample_from_jets(phi: float, fj: Jet4, tol: float) -> CausticSample:
    one_plus = 1.0 + fj.d1
    if abs(one_plus) < tol:
        chord = math.atan2(math.sin(fj.d0) - math.sin(phi), math.cos(fj.d0) - math.cos(phi))
        # a line direction is only defined modulo pi
        direction = math.atan(math.tan(chord)) if abs(math.cos(chord)) > 1e-300 else math.pi / 2
        return CausticSample(phi, math.nan, math.nan, True, direction, (math.nan, math.nan), False)
    xj, yj = envelope_jets(fj, phi)
    tx, ty = float(xj.d1), float(yj.d1)
    singular = abs(tx) < ZERO_TOL and abs(ty) < ZERO_TOL
    return CausticSample(phi, float(xj.d0), float(yj.d0), False, None, (tx, ty), singular)


def caustic_point(p: MapParams, n: int, phi: float, tol: float = INFINITY_TOL) -> CausticSample:
    phi = float(phi)
    return _sample_from_jets(phi, _f_jet(p, n, phi), tol)


def compress_radius(rho):
    """Map ``[0, inf]`` onto ``[0, 2]`` monotonically, fixing 0 and 1."""
    rho = np.asarray(rho, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(rho), COMPRESSED_INFINITY, 2.0 * rho / (1.0 + rho))
    return float(out) if out.ndim == 0 else out


def compress_sample(s: CausticSample) -> tuple:
    """Plane point of a sample on the compressed scale."""
    if s.at_infinity:
        return (COMPRESSED_INFINITY * math.cos(s.direction), COMPRESSED_INFINITY * math.sin(s.direction))
    rho = math.hypot(s.x, s.y)
    if rho == 0.0:
        return (0.0, 0.0)
    k = compress_radius(rho) / rho
    return (s.x * k, s.y * k)


def caustic_curve(p: MapParams, n: int, samples: int = 1024, compress: bool = False) -> list:
    """Caustic sampled uniformly at ``phi_k = -pi + 2 pi k / samples``, k = 1..samples.

    With ``compress`` the finite points are pulled onto the compressed scale
    (see :func:`compress_radius`) and points at infinity land on radius 2.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples")
    phi = -math.pi + 2.0 * math.pi * np.arange(1, samples + 1) / samples
    fj = _f_jet(p, n, phi)
    out = []
    for k in range(samples):
        jk = Jet4(*(float(c[k]) for c in fj.coeffs()))
        s = _sample_from_jets(float(phi[k]), jk, INFINITY_TOL)
        if compress:
            cx, cy = compress_sample(s)
            s = CausticSample(s.phi, cx, cy, s.at_infinity, s.direction, s.tangent, s.singular)
        out.append(s)
    return out


def envelope_residual(p: MapParams, n: int, s: CausticSample) -> float:
    """Scaled residual of ``F = 0 = dF/dphi`` at a finite sample."""
    fj = _f_jet(p, n, s.phi)
    f, f1, phi = fj.d0, fj.d1, s.phi
    a = math.sin(f) - math.sin(phi)
    b = -(math.cos(f) - math.cos(phi))
    c = math.sin(f - phi)
    da = f1 * math.cos(f) - math.cos(phi)
    db = f1 * math.sin(f) - math.sin(phi)
    dc = (f1 - 1.0) * math.cos(f - phi)
    scale = 1.0 + abs(s.x) + abs(s.y)
    r1 = abs(a * s.x + b * s.y - c) / ((abs(a) + abs(b) + abs(c)) * scale + 1e-300)
    r2 = abs(da * s.x + db * s.y - dc) / ((abs(da) + abs(db) + abs(dc)) * scale + 1e-300)
    return max(r1, r2)


def reaches_infinity(p: MapParams, n: int = 1, grid: int = DEFAULT_SCAN) -> bool:
    """Whether ``1 + f'`` vanishes somewhere, i.e. the caustic is unbounded."""
    phi = -math.pi + 2.0 * math.pi * (np.arange(grid + 1) + 0.5) / grid
    g = 1.0 + _f_jet(p, n, phi).d1
    if np.any(g <= 0.0):
        return True
    # a tangential zero of 1 + f' can sit between grid points
    k = int(np.argmin(g))
    lo, hi = phi[max(k - 1, 0)], phi[min(k + 1, grid)]
    res = minimize_scalar(lambda t: 1.0 + float(_f_jet(p, n, t).d1), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-14})
    return bool(res.fun <= INFINITY_TOL)


# -- cusps ------------------------------------------------------------------


def line_jets(fj: Jet4, phi) -> tuple:
    """Jets of the chord in normal form ``x cos(sigma) + y sin(sigma) = cos(delta)``.

    ``sigma = (f + phi)/2`` and ``delta = (f - phi)/2``; unlike the raw chord
    coefficients this form never degenerates, even where ``f(phi) = phi``.
    """
    t = Jet4.variable(phi)
    sigma = 0.5 * (fj + t)
    rho = jcos(0.5 * (fj - t))
    return sigma, rho


def cusp_function(fj: Jet4, phi) -> tuple:
    """``det(l, l', l'')`` of the chord family and its derivative.

    The envelope is stationary (a cusp, possibly at infinity) exactly where
    the dual curve of chords has an inflection, i.e. where this determinant
    vanishes.  It is smooth through the points where the envelope escapes
    to infinity, which the planar velocity is not.
    """
    sigma, rho = line_jets(fj, phi)
    s1, s2, s3 = sigma.d1, sigma.d2, sigma.d3
    p0, p1, p2, p3 = rho.d0, rho.d1, rho.d2, rho.d3
    value = p1 * s2 - s1 * p2 - p0 * s1**3
    slope = p1 * s3 - s1 * p3 - p1 * s1**3 - 3.0 * p0 * s1**2 * s2
    return value, slope


def discriminant(xj: Jet4, yj: Jet4):
    return xj.d2 * yj.d3 - xj.d3 * yj.d2


def homogeneous_jets(fj: Jet4, phi) -> tuple:
    """Jets of ``(X : Y : W)`` with ``x = X/W``, ``y = Y/W``."""
    t = Jet4.variable(phi)
    fp = fj.derivative()
    return fp * jcos(t) + jcos(fj), fp * jsin(t) + jsin(fj), 1.0 + fp


def chart_jets(fj: Jet4, phi, far: float = 1e-8) -> tuple:
    """Affine chart around the caustic point at ``phi``.

    The planar chart ``(X/W, Y/W)`` is used unless the point is within
    ``far`` of infinity, in which case the chart divides by the dominant of
    ``X`` and ``Y``.  Returns ``(u, v, planar)``.
    """
    X, Y, W = homogeneous_jets(fj, phi)
    if abs(float(W.d0)) > far * max(abs(float(X.d0)), abs(float(Y.d0)), 1.0):
        inv = W.reciprocal()
        return X * inv, Y * inv, True
    if abs(float(X.d0)) >= abs(float(Y.d0)):
        inv = X.reciprocal()
        return Y * inv, W * inv, False
    inv = Y.reciprocal()
    return X * inv, W * inv, False


def _classify(p: MapParams, n: int, phi: float, zero_tol: float = ZERO_TOL,
              disc_tol: float = ZERO_TOL) -> CuspRecord:
    fj = _f_jet(p, n, float(phi))
    u, v, _ = chart_jets(fj, float(phi))
    res = (abs(float(u.d1)), abs(float(v.d1)))
    disc = float(discriminant(u, v))
    if max(res) < zero_tol and abs(disc) > disc_tol:
        kind = CuspKind.SEMICUBICAL
    else:
        kind = CuspKind.DEGENERATE
    return CuspRecord(float(wrap_angle(phi)), kind, disc, res)


def find_cusps(p: MapParams, n: int = 1, scan: int = DEFAULT_SCAN,
               zero_tol: float = ZERO_TOL) -> list:
    """Locate and classify the cusps of the caustic of ``f = F^n``.

    The cusp function (see :func:`cusp_function`) is scanned on a
    half-offset grid of ``scan`` points, so that 0 and pi fall between
    nodes.  Sign changes are refined by Brent's method; local minima of its
    modulus that touch zero without a sign change are refined too, so
    degenerate singularities are reported rather than dropped.  Each root is
    classified from the exact caustic jets: semicubical when the velocity
    vanishes and the second/third derivative discriminant does not (in a
    projective chart for cusps at infinity).
    """
    h = 2.0 * math.pi / scan
    phi = -math.pi + h * (np.arange(scan + 1) + 0.5)
    delta, _ = cusp_function(_f_jet(p, n, phi), phi)
    scale = float(np.max(np.abs(delta)))
    if scale < zero_tol:
        raise CuspResolutionError("caustic is singular everywhere (degenerates to a point)")

    def g(t):
        return float(cusp_function(_f_jet(p, n, t), t)[0])

    roots = []
    for k in range(scan):
        a, b = delta[k], delta[k + 1]
        if a == 0.0:
            roots.append(phi[k])
        elif a * b < 0.0:
            roots.append(brentq(g, phi[k], phi[k + 1], xtol=1e-15, rtol=8.9e-16, maxiter=200))
    mag = np.abs(delta)
    for k in range(1, scan):
        if mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1] and delta[k - 1] * delta[k + 1] > 0.0:
            if mag[k] > 1e-3 * scale:
                continue
            res = minimize_scalar(lambda t: abs(g(t)), bounds=(phi[k - 1], phi[k + 1]),
                                  method="bounded", options={"xatol": 1e-14})
            if res.fun < zero_tol * scale:
                roots.append(res.x)

    records = sorted((_classify(p, n, t, zero_tol) for t in roots), key=lambda c: c.phi_star)
    merged = []
    for rec in records:
        if merged and circle_distance(rec.phi_star, merged[-1].phi_star) < 2.0 * h:
            if circle_distance(rec.phi_star, merged[-1].phi_star) > 1e-9:
                raise CuspResolutionError(
                    f"cusps closer than the scan resolution {h:.3g} near phi={rec.phi_star:.6f}")
            continue
        merged.append(rec)
    if len(merged) > 1 and circle_distance(merged[0].phi_star, merged[-1].phi_star) < 1e-9:
        merged.pop()
    return merged


def _snap(phi: float, tol: float = 1e-12) -> float:
    for special in (0.0, math.pi):
        if circle_distance(phi, special) < tol:
            return special
    return phi


def cusp_criterion_symmetric(p: MapParams, n: int, phi: float, relation: Relation,
                             tol: float = ZERO_TOL) -> Optional[CuspRecord]:
    """Decide whether the caustic has a cusp at a symmetric point.

    The point must satisfy ``f(phi) = target(phi)`` for the given relation.
    Returns a semicubical record when the closed-form criterion holds, a
    degenerate record when both the vanishing condition and the
    nondegeneracy quantity vanish, and ``None`` when there is no cusp.
    """
    relation = Relation(relation)
    fj = _f_jet(p, n, phi)
    if circle_distance(fj.d0, relation.target(phi)) > 1e-9:
        raise ValueError(f"f(phi) != {relation.value}(phi) at phi={phi!r}")
    f1, f2, f3 = float(fj.d1), float(fj.d2), float(fj.d3)
    c, s = math.cos(phi), math.sin(phi)
    if relation is Relation.FIXED_POINT:
        vanish, nondeg = f1, f2
    elif relation is Relation.PLUS_PI:
        vanish, nondeg = f2, -f1 + f1**3 + 2.0 * f3
    elif relation is Relation.MINUS_PHI:
        vanish = f1 * (1.0 + f1) * c + f2 * s
        nondeg = (f1 * (2.0 + math.cos(2 * phi)) + 6.0 * f1**2 * c * c
                  + (1.0 + 2.0 * math.cos(2 * phi)) * f1**3 - 2.0 * f3 * s * s)
    else:
        vanish = f1 * (1.0 + f1) * s - f2 * c
        nondeg = (f1 * (2.0 - math.cos(2 * phi)) + 6.0 * f1**2 * s * s
                  + (1.0 - 2.0 * math.cos(2 * phi)) * f1**3 - 2.0 * f3 * c * c)
    if abs(vanish) > tol:
        return None
    xj, yj = envelope_jets(fj, phi)
    disc = float(discriminant(xj, yj))
    kind = CuspKind.SEMICUBICAL if abs(nondeg) > tol else CuspKind.DEGENERATE
    return CuspRecord(float(wrap_angle(phi)), kind, disc, (abs(float(xj.d1)), abs(float(yj.d1))))


# -- symmetric points, even iterates and the limiting quadrilateral -------------


def phi_c(r: float) -> float:
    """Angle in (0, pi) of the second 2-cycle ``{phi_c, -phi_c}``."""
    r = check_radius(r)
    if r == 0.0:
        return math.pi / 2
    return math.acos((1.0 - math.sqrt(1.0 + 8.0 * r * r)) / (4.0 * r))


def a2_values(r: float) -> tuple:
    """``A_2`` at 0 and pi: ``-f' + f'^3 + 2 f'''`` for ``f = R_r^2``.

    The two closed forms differ in the prefactor, ``(1 + r)`` versus
    ``(1 - r)`` over ``(1 - r^2)^3``; both were rederived symbolically.
    """
    q = 48 * r * r / (1 - r * r) ** 3
    return (q * (1 + r) * (1 - 3 * r + 13 * r**2 - 15 * r**3),
            q * (1 - r) * (1 + 3 * r + 13 * r**2 + 15 * r**3))


def a_sequence(r: float, m_max: int) -> list:
    """``(A_{2m+1}(0), A_{2m+1}(pi))`` for ``m = 0..m_max`` via the closed recursion.

    ``A_n = -f' + f'^3 + 2 f'''`` for ``f = R_r^n``; a nonzero value at 0 or
    pi means the caustic of the odd iterate has a semicubical cusp there.
    """
    r = check_radius(r)
    if not 0.0 < r:
        raise ValueError("need 0 < r < 1")
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    c3 = ((1 - 9 * r * r) / (1 - r * r)) ** 3
    d0, dpi = (1 - 3 * r) / (1 - r), (1 + 3 * r) / (1 + r)
    a2_0, a2_pi = a2_values(r)
    a0 = 24 * r * r / (1 - r) ** 2
    api = 24 * r * r / (1 + r) ** 2
    out = [(a0, api)]
    for m in range(1, m_max + 1):
        a0 = c3 * a0 + a2_0 * d0**m * dpi ** (m - 1)
        api = c3 * api + a2_pi * d0 ** (m - 1) * dpi**m
        out.append((a0, api))
    return out


def a_value_from_jet(r: float, n: int, phi_a: float) -> float:
    fj = iterate_jet(reflection(r), phi_a, n)
    return float(-fj.d1 + fj.d1**3 + 2.0 * fj.d3)


def contact_function(p: MapParams, n: int, phi):
    """``x^2 + y^2 - 1`` of the caustic, in the factored form.

    The caustic point is ``(f' e^{i phi} + e^{i f}) / (1 + f')``, whence
    ``|.|^2 - 1 = -4 f' sin^2((f - phi)/2) / (1 + f')^2``.
    """
    fj = _f_jet(p, n, phi)
    s = np.sin(0.5 * (fj.d0 - phi))
    return -4.0 * fj.d1 * s * s / (1.0 + fj.d1) ** 2


def _critical_preimages(p: MapParams, c: float, n: int, scan: int, solver) -> list:
    """Points whose orbit hits the critical point ``c`` within ``n - 1`` steps.

    Solving ``F^k(t) = c`` is hopelessly ill-conditioned when ``F^k`` is flat
    at the root.  For a homeomorphism whose critical point is periodic (the
    case ``r = 1/3``, where 0 lies on the cycle ``{0, pi}``) the preimages
    are read off the forward orbit instead.
    """
    orbit = [c]
    for _ in range(n):
        orbit.append(map_lift(p, orbit[-1]))
    period = next((j for j in range(1, n + 1)
                   if circle_distance(orbit[j], c) < 1e-12), None)
    if period is not None and is_homeomorphism(p):
        return [float(wrap_angle(orbit[(-k) % period])) for k in range(min(n, period))]
    out = []
    for k in range(n):
        out += solver(lambda t: iterate_lift(p, t, k) - c, scan)
    return out


def circle_contacts(p: MapParams, n: int, scan: int = DEFAULT_SCAN) -> list:
    """Angles where the caustic of ``F^n`` meets the unit circle.

    By :func:`contact_function` these are the fixed points of ``f`` and the
    zeros of ``f'``.  The latter occur only where an orbit point
    ``F^k(phi)``, ``k < n``, hits a critical point of ``F``.  Solving the two
    factors separately avoids thresholding ``x^2 + y^2 - 1`` itself, which at
    ``r = 1/3`` stays within rounding of zero along whole arcs because the
    contact there has order ``3^m + 1``.
    """
    from .orbits import find_symmetric_solutions, roots_mod_2pi

    found = list(find_symmetric_solutions(p, n, Relation.FIXED_POINT, scan))
    if p.variant is Variant.REFLECT:
        for c in critical_points(p.r).points:
            found += _critical_preimages(p, c, n, scan, roots_mod_2pi)
    out = []
    for t in sorted(found):
        if not out or circle_distance(t, out[-1]) > 1e-9:
            out.append(t)
    if len(out) > 1 and circle_distance(out[0], out[-1]) <= 1e-9:
        out.pop()
    return out


def tangent_direction(p: MapParams, n: int, phi: float, tol: float = 1e-8,
                      series_order: int = 40) -> tuple:
    """Unit tangent of the caustic from its first nonvanishing derivative.

    When the 4-jet vanishes (the contact points of even iterates at
    ``r = 1/3`` are flat to order ``3^m``), the caustic is expanded as a
    truncated power series instead.
    """
    xj, yj = caustic_derivatives(p, n, phi)
    for k in (1, 2, 3):
        vx, vy = float(xj[k]), float(yj[k])
        norm = math.hypot(vx, vy)
        if norm > tol:
            return (vx / norm, vy / norm)
    xs, ys = caustic_series(p, n, float(phi), series_order)
    both = Series(np.hypot(xs.c.real, ys.c.real))
    try:
        k = leading_order(both)
    except ValueError:
        raise CuspResolutionError(
            f"caustic is flat to order {series_order} at phi={phi!r}") from None
    vx, vy = xs.c[k].real, ys.c[k].real
    norm = math.hypot(vx, vy)
    return (vx / norm, vy / norm)


def tangency_defect(p: MapParams, n: int, phi: float) -> float:
    """Angle (in [0, pi/2]) between the caustic tangent and the circle tangent at ``phi``."""
    tx, ty = tangent_direction(p, n, phi)
    cross = tx * math.cos(phi) + ty * math.sin(phi)  # component along the radius
    return math.asin(min(1.0, abs(cross)))


def tangency_points_even(r: float, m: int) -> list:
    """Fixed points of ``R_r^{2m}``; the caustic touches the circle there."""
    from .orbits import find_symmetric_solutions

    if m < 1:
        raise ValueError("m must be positive")
    return find_symmetric_solutions(reflection(r), 2 * m, Relation.FIXED_POINT)


def tangency_record(p: MapParams, n: int, phi: float) -> CuspRecord:
    xj, yj = caustic_derivatives(p, n, phi)
    return CuspRecord(float(wrap_angle(phi)), CuspKind.CIRCLE_TANGENCY, float(discriminant(xj, yj)),
                      (abs(float(xj.d1)), abs(float(yj.d1))))


def taylor_local_model(r: float, n: int, phi_a: float, order: int = 6,
                       window: float = 0.05, samples: int = 401) -> LocalModel:
    """Fit the caustic near ``phi_a`` in powers of ``theta = phi - phi_a``.

    ``x - x(phi_a)`` is fitted with even powers and ``y - y(phi_a)`` with odd
    powers up to ``order`` (the iterates are odd about 0 and pi).
    """
    if phi_a not in (0.0, math.pi):
        raise ValueError("phi_a must be 0 or pi")
    if not 2 <= order <= 6:
        raise ValueError("order must be between 2 and 6")
    p = reflection(r)
    theta = np.linspace(-window, window, samples)
    fj = _f_jet(p, n, phi_a + theta)
    xj, yj = envelope_jets(fj, phi_a + theta)
    c0 = caustic_point(p, n, phi_a)
    dx = xj.d0 - c0.x
    dy = yj.d0 - c0.y
    t = theta / window
    xpow = list(range(2, order + 1, 2))
    ypow = list(range(1, order + 1, 2))
    vx = np.stack([t**k for k in xpow], axis=1)
    vy = np.stack([t**k for k in ypow], axis=1)
    cx, resx, _, svx = np.linalg.lstsq(vx, dx, rcond=None)
    cy, resy, _, svy = np.linalg.lstsq(vy, dy, rcond=None)
    cond = float(max(svx[0] / svx[-1], svy[0] / svy[-1]))
    resid = float(max(np.max(np.abs(vx @ cx - dx)), np.max(np.abs(vy @ cy - dy))))
    scale = float(max(np.max(np.abs(dx)), np.max(np.abs(dy)), 1e-300))
    if cond > 1e8 or resid > 1e-3 * scale:
        warnings.warn(f"local model fit is ill-conditioned (cond={cond:.3g}, residual={resid:.3g}); "
                      "adjust the window", RuntimeWarning, stacklevel=2)
    xc = {k: float(c / window**k) for k, c in zip(xpow, cx)}
    yc = {k: float(c / window**k) for k, c in zip(ypow, cy)}
    return LocalModel(phi_a, xc, yc, window, cond, resid)


def _cycle_deviation(r: float, phi_a: float, theta: float, steps: int) -> float:
    """Track ``R^steps(phi_a + theta)`` relative to the 2-cycle {0, pi}.

    Working with the small offset directly avoids the cancellation of
    subtracting two lifted angles of size ~ steps * pi.
    """
    base = phi_a
    for _ in range(steps):
        if base == 0.0:
            a = math.atan2(r * math.sin(theta), 1.0 - r * math.cos(theta))
        else:
            a = math.atan2(-r * math.sin(theta), 1.0 + r * math.cos(theta))
        theta = theta - 2.0 * a
        base = math.pi if base == 0.0 else 0.0
    return theta


def vanishing_order_even(r: float, m: int, phi_a: float = 0.0) -> int:
    """Order of vanishing of ``R^{2m}(phi_a + theta) - phi_a`` at ``theta = 0``.

    Estimated from the slope of ``log|g|`` against ``log theta``; the
    offsets are chosen so that the leading term dominates both the higher
    order terms and rounding in the cancelling first step.
    """
    check_radius(r)
    if m < 1:
        raise ValueError("m must be positive")
    if m >= 3:
        warnings.warn("vanishing order for m >= 3 is beyond double precision reach",
                      RuntimeWarning, stacklevel=2)
    thetas = np.geomspace(0.004, 0.016, 5) if m > 1 else np.geomspace(1e-4, 1e-3, 5)
    g = [abs(_cycle_deviation(r, phi_a, float(t), 2 * m)) for t in thetas]
    slope = np.polyfit(np.log(thetas), np.log(g), 1)[0]
    return int(round(slope))


def quadrilateral_limit(r: float) -> list:
    """Vertices of the limiting quadrilateral of caustics of high iterates."""
    r = check_radius(r)
    pc = phi_c(r)
    return [(1.0, 0.0), (math.cos(pc), math.sin(pc)), (-1.0, 0.0), (math.cos(pc), -math.sin(pc))]


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    n: int
    derivative_at_0: float
    closed_form: float
    x_at_0: float
    x_at_pi: float
    y_at_phi_c: float
    max_vertex_distance: float


def caustic_convergence(r: float, m_max: int) -> list:
    """Distance of the special caustic points of odd iterates to the quadrilateral."""
    r = check_radius(r)
    if not 0.0 < r <= 1.0 / 3.0 + 1e-12:
        raise ValueError("need 0 < r <= 1/3")
    p = reflection(r)
    pc = phi_c(r)
    verts = quadrilateral_limit(r)
    rows = []
    for m in range(1, m_max + 1):
        n = 2 * m + 1
        d = float(iterate_jet(p, 0.0, n).d1)
        closed = ((1 - 3 * r) / (1 - r)) ** (m + 1) * ((1 + 3 * r) / (1 + r)) ** m
        s0 = caustic_point(p, n, 0.0)
        spi = caustic_point(p, n, math.pi)
        sc = caustic_point(p, n, pc)
        pts = [(s0.x, s0.y), (spi.x, spi.y), (sc.x, sc.y), (sc.x, -sc.y)]
        dist = max(min(math.hypot(a - vx, b - vy) for vx, vy in verts) for a, b in pts)
        rows.append(ConvergenceRow(m, n, d, closed, s0.x, spi.x, sc.y, dist))
    return rows


@dataclass(frozen=True)
class SectionalCurve:
    phi: np.ndarray
    alpha_tilde: np.ndarray
    s_tilde: np.ndarray
    # sign changes of S'' and of S + S'' on (0, pi)
    second_derivative_sign_changes: int
    curvature_sign_changes: int


def _sign_changes(v: np.ndarray, tol: float) -> int:
    s = np.sign(np.where(np.abs(v) <= tol, 0.0, v))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def sectional_curve(r: float, m: int, grid: int = 4096) -> SectionalCurve:
    """Odd-iterate angle ``alpha~_m`` and ``S~(phi) = -int_0^phi sin alpha~_m``.

    ``alpha~_m`` is read off the lift of ``R^{2m+1}`` as
    ``(phi + (2m+1) pi - R^{2m+1}(phi)) / 2``.  The convexity diagnostic
    counts sign changes on ``(0, pi)`` of ``S~ + S~''`` (radius of curvature of
    the curve with support function ``S~``); the raw ``S~''`` count is
    reported alongside.
    """
    r = check_radius(r)
    if m < 0:
        raise ValueError("m must be nonnegative")
    p = reflection(r)
    phi = np.linspace(-math.pi, math.pi, 2 * grid + 1)
    lift = iterate_lift(p, phi, 2 * m + 1)
    at = 0.5 * (phi + (2 * m + 1) * math.pi - lift)
    integrand = -np.sin(at)
    h = phi[1] - phi[0]
    cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (integrand[1:] + integrand[:-1]))])
    s = cum - cum[grid]  # S~(0) = 0
    s2 = np.gradient(np.gradient(s, h), h)
    inner = slice(grid + 2, 2 * grid - 1)  # strictly inside (0, pi), away from the ends
    tol = 1e-12 * max(1.0, float(np.max(np.abs(s))))
    return SectionalCurve(phi, at, s, _sign_changes(s2[inner], tol),
                          _sign_changes((s + s2)[inner], tol))


def observed_cusp_counts(rs=(0.1, 0.2, 0.3), n_max: int = 6, scan: int = DEFAULT_SCAN) -> dict:
    """Number of cusps found per ``(r, n)``; a report, not an assertion."""
    table = {}
    for r in rs:
        for n in range(1, n_max + 1):
            table[(r, n)] = len(find_cusps(reflection(r), n, scan))
    return table
