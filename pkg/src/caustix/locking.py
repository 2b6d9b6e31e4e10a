"""Rotation numbers, resonance intervals and the Devil's staircase.

Throughout, ``omega`` in the resonance machinery is a raw real number, not
canonicalized to ``(-pi, pi]``: the lift ``x + omega -+ 2 alpha(x)`` depends on
``omega`` itself, and an interval around ``2 pi p/q`` may straddle ``pi``.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .circle_map import (
    TWO_PI,
    DomainError,
    MapParams,
    Variant,
    check_radius,
    circle_distance,
    critical_points,
    is_homeomorphism,
)
from .orbits import RasterGrid, _axis

BRACKET_TOL = 1e-10
EXTREMA_SCAN = 4096
CHUNK = 256  # fixed chunking keeps vectorized output independent of thread count


class BracketError(RuntimeError):
    """The resonance condition does not change sign across the search bracket."""


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    error_bound: float
    iterations_used: int

    def agrees_with(self, other: "RotationEstimate") -> bool:
        return abs(self.value - other.value) <= self.error_bound + other.error_bound


@dataclass(frozen=True)
class ResonanceInterval:
    p: int
    q: int
    omega_lo: float
    omega_hi: float
    width: float
    bracket_tol: float

    @property
    def target(self) -> float:
        return TWO_PI * self.p / self.q

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.omega_lo + self.omega_hi)


@dataclass(frozen=True)
class StaircaseSample:
    omega_param: float
    rotation: RotationEstimate


def _sign(variant) -> float:
    return -2.0 if Variant(variant) is Variant.REFLECT else 2.0


def _lift(r: float, omega, sign: float, x):
    return x + omega + sign * np.arctan2(r * np.sin(x), 1.0 - r * np.cos(x))


def _lift_scalar(r: float, omega: float, sign: float, x: float) -> float:
    return x + omega + sign * math.atan2(r * math.sin(x), 1.0 - r * math.cos(x))


def _orbit_displacement(r: float, omega: float, sign: float, x0: float, n: int) -> float:
    """``F^n(x0) - x0`` on the lift, tracking whole turns separately."""
    if r == 0.0:
        return n * omega
    sin, cos, atan2, floor = math.sin, math.cos, math.atan2, math.floor
    x, turns = x0, 0
    for _ in range(n):
        x = x + omega + sign * atan2(r * sin(x), 1.0 - r * cos(x))
        k = floor((x + math.pi) / TWO_PI)
        x -= TWO_PI * k
        turns += k
    return (x - x0) + TWO_PI * turns


def _orbit_displacement_vec(r: float, omega: np.ndarray, sign: float, x0: float, n: int) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if r == 0.0:
        return n * omega
    x = np.full_like(omega, x0)
    turns = np.zeros_like(omega)
    for i in range(n):
        x += omega + sign * np.arctan2(r * np.sin(x), 1.0 - r * np.cos(x))
        # re-centre only now and then: a few hundred steps cost little precision
        if i % 256 == 255 or i == n - 1:
            k = np.floor((x + math.pi) / TWO_PI)
            x -= TWO_PI * k
            turns += k
    return (x - x0) + TWO_PI * turns


def rotation_number(p: MapParams, phi0: float = 0.0, n: int = 100_000) -> RotationEstimate:
    """Birkhoff estimate ``(F^n(phi0) - phi0)/n`` of the rotation number.

    For a lift of a circle homeomorphism ``|F^n(x) - x - n w| < 2 pi``, so
    the error bound is ``2 pi / n``.  At ``r = 0`` the map is a rigid
    rotation and ``omega`` is returned exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if p.r == 0.0:
        return RotationEstimate(p.omega, 0.0, n)
    d = _orbit_displacement(p.r, p.omega, p.sign, float(phi0), n)
    return RotationEstimate(d / n, TWO_PI / n, n)


def _chunked(fn, values: np.ndarray, threads: int) -> np.ndarray:
    chunks = [values[i : i + CHUNK] for i in range(0, len(values), CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    return np.concatenate(parts) if parts else np.empty(0)


def rotation_numbers(r: float, omegas, n: int, variant=Variant.REFLECT, phi0: float = 0.0,
                     threads: int = 1) -> np.ndarray:
    """Vectorized Birkhoff estimates over an array of raw ``omega`` values."""
    r = check_radius(r)
    sign = _sign(variant)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    return _chunked(lambda w: _orbit_displacement_vec(r, w, sign, phi0, n) / n, omegas, threads)


# -- rotation interval of non-injective maps ----------------------------------


def _envelope(p: MapParams, upper: bool):
    """Monotone envelope ``F+(x) = max_{y<=x} F(y)`` or ``F-(x) = min_{y>=x} F(y)``."""
    cp = critical_points(p.r)
    if p.variant is Variant.CONJUGATE or len(cp.points) < 2:
        return lambda x: _lift_scalar(p.r, p.omega, p.sign, x)
    # R decreases on (-phi*, phi*): local max at -phi*, local min at +phi*
    star = cp.points[0]

    def f(x):
        fx = _lift_scalar(p.r, p.omega, p.sign, x)
        if upper:
            xm = -star + TWO_PI * math.floor((x + star) / TWO_PI)
            return max(fx, _lift_scalar(p.r, p.omega, p.sign, xm))
        xm = star + TWO_PI * math.ceil((x - star) / TWO_PI)
        return min(fx, _lift_scalar(p.r, p.omega, p.sign, xm))

    return f


def rotation_interval(p: MapParams, n: int = 100_000) -> tuple:
    """Endpoints of the rotation interval from the monotone envelopes of the lift.

    Both envelopes are nondecreasing degree-one lifts, so each has a unique
    rotation number with the homeomorphism error bound.  For injective maps
    both envelopes coincide with the lift itself.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for upper in (False, True):
        f = _envelope(p, upper)
        x = 0.0
        turns = 0
        for _ in range(n):
            x = f(x)
            k = math.floor((x + math.pi) / TWO_PI)
            x -= TWO_PI * k
            turns += k
        out.append(RotationEstimate((x + TWO_PI * turns) / n, TWO_PI / n, n))
    return tuple(out)


# -- resonance intervals --------------------------------------------------------


def _extremum(g, xs: np.ndarray, vals: np.ndarray, largest: bool) -> float:
    k = int(np.argmax(vals) if largest else np.argmin(vals))
    h = xs[1] - xs[0]
    sgn = -1.0 if largest else 1.0
    res = minimize_scalar(lambda t: sgn * float(g(t)), bounds=(xs[k] - h, xs[k] + h),
                          method="bounded", options={"xatol": 1e-12})
    return max(vals[k], -res.fun) if largest else min(vals[k], res.fun)


def displacement_extrema(r: float, omega: float, p: int, q: int, variant=Variant.REFLECT,
                         scan: int = EXTREMA_SCAN) -> tuple:
    """``(min_x g, max_x g)`` for ``g(x) = F^q(x) - x - 2 pi p``."""
    sign = _sign(variant)

    def g(x):
        y = x
        for _ in range(q):
            y = _lift(r, omega, sign, y)
        return y - x - TWO_PI * p

    xs = -math.pi + TWO_PI * np.arange(scan) / scan
    vals = g(xs)
    return _extremum(g, xs, vals, False), _extremum(g, xs, vals, True)


def resonance_interval(r: float, p: int, q: int, tol: float = BRACKET_TOL,
                       variant=Variant.REFLECT, scan: int = EXTREMA_SCAN) -> ResonanceInterval:
    """The interval of ``omega`` on which the rotation number is ``2 pi p/q``.

    ``omega`` is locked iff ``g(x) = F^q(x) - x - 2 pi p`` has a zero, i.e.
    ``min g <= 0 <= max g``.  Both extrema increase strictly with
    ``omega``, so the endpoints are the roots of ``max g = 0`` and
    ``min g = 0``, found by Brent's method to ``tol``.
    """
    r = check_radius(r)
    variant = Variant(variant)
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need q >= 1 and gcd(p, q) = 1, got {p}/{q}")
    if variant is Variant.REFLECT and r > 1.0 / 3.0 + 1e-12:
        raise DomainError("the reflect map is not injective for r > 1/3; "
                          "use rotation_interval instead")
    centre = TWO_PI * p / q
    if r == 0.0:
        return ResonanceInterval(p, q, centre, centre, 0.0, tol)
    # |sum of q alpha terms| <= q arcsin r bounds g - q(omega - centre) by 2 q arcsin r
    reach = 2.0 * math.asin(r) + 1e-6
    lo, hi = centre - reach, centre + reach

    def gmin(w):
        return displacement_extrema(r, w, p, q, variant, scan)[0]

    def gmax(w):
        return displacement_extrema(r, w, p, q, variant, scan)[1]

    ends = []
    for fn in (gmax, gmin):
        a, b = fn(lo), fn(hi)
        if not (a < 0.0 < b):
            raise BracketError(f"resonance condition not bracketed on [{lo}, {hi}] "
                               f"for {p}/{q}, r={r}: values {a:.3g}, {b:.3g}")
        ends.append(brentq(fn, lo, hi, xtol=tol, rtol=8.9e-16, maxiter=200))
    w_lo, w_hi = ends
    # both roots of a degenerate (zero-width) interval come out within tol of each other
    if w_hi < w_lo:
        w_lo = w_hi = 0.5 * (w_lo + w_hi)
    return ResonanceInterval(p, q, w_lo, w_hi, w_hi - w_lo, tol)


def tongue_raster(p: int, q: int, r_min: float, r_max: float, steps: int,
                  variant=Variant.REFLECT, tol: float = BRACKET_TOL, threads: int = 1) -> RasterGrid:
    """One resonance interval per radius; each column is ``(omega_lo, omega_hi, width)``."""
    rs = _axis(r_min, r_max, steps)

    def column(r):
        iv = resonance_interval(float(r), p, q, tol, variant)
        return ((iv.omega_lo, iv.omega_hi, iv.width),)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            cols = tuple(ex.map(column, rs))
    else:
        cols = tuple(column(r) for r in rs)
    return RasterGrid(float(rs[0]), float(rs[-1]), steps, tuple(rs.tolist()), cols,
                      f"resonance-interval:{p}/{q}:{Variant(variant).value}")


# -- Devil's staircase ----------------------------------------------------------


def staircase_omegas(steps: int) -> np.ndarray:
    """``omega_k = -pi + 2 pi k/steps`` for ``k = 1..steps``, covering ``(-pi, pi]``."""
    if steps < 1:
        raise ValueError("steps must be positive")
    return -math.pi + TWO_PI * np.arange(1, steps + 1) / steps


def staircase(r: float, omega_steps: int = 2048, n: int = 100_000, variant=Variant.REFLECT,
              threads: int = 1) -> list:
    """Rotation number against ``omega`` over ``(-pi, pi]``."""
    r = check_radius(r)
    if n < 1:
        raise ValueError("n must be >= 1")
    omegas = staircase_omegas(omega_steps)
    values = rotation_numbers(r, omegas, n, variant, threads=threads)
    bound = 0.0 if r == 0.0 else TWO_PI / n
    return [StaircaseSample(float(w), RotationEstimate(float(v), bound, n))
            for w, v in zip(omegas, values)]


def is_nondecreasing(samples) -> bool:
    """Monotonicity of a staircase within the combined estimator error."""
    for a, b in zip(samples, samples[1:]):
        if b.rotation.value < a.rotation.value - a.rotation.error_bound - b.rotation.error_bound:
            return False
    return True


@dataclass(frozen=True)
class Plateau:
    omega_lo: float
    omega_hi: float
    width: float
    iterations: int


def _locked(r: float, omega: float, sign: float, target: float, n: int) -> bool:
    value = _orbit_displacement(r, omega, sign, 0.0, n) / n
    return abs(value - target) <= TWO_PI / n


def staircase_plateau(r: float, p: int, q: int, samples: Optional[list] = None,
                      omega_steps: int = 2048, n: int = 100_000, variant=Variant.REFLECT,
                      refine_tol: float = 1e-9) -> Plateau:
    """Plateau of the staircase at rotation ``2 pi p/q``, refined by bisection.

    Samples whose estimate lies within ``2 pi/n`` of the target seed the
    plateau; its two edges are then bisected with the same Birkhoff
    classifier.  Only rotation-number estimates are used, so this is a
    measurement independent of :func:`resonance_interval`.
    """
    r = check_radius(r)
    sign = _sign(variant)
    target = TWO_PI * p / q
    if r == 0.0:
        return Plateau(target, target, 0.0, n)
    if samples is None:
        samples = staircase(r, omega_steps, n, variant)
    # move every sample onto the lift branch nearest the target; the
    # rotation estimate shifts by the same multiple of 2 pi
    raw = np.array([s.omega_param for s in samples])
    shift = TWO_PI * np.round((target - raw) / TWO_PI)
    order = np.argsort(raw + shift)
    ws = (raw + shift)[order]
    vals = np.array([s.rotation.value for s in samples])[order] + shift[order]
    locked = np.abs(vals - target) <= TWO_PI / n
    step = TWO_PI / len(samples)
    if locked.any():
        k0 = int(np.argmin(np.where(locked, np.abs(ws - target), np.inf)))
        k_lo, k_hi = k0, k0
        while k_lo > 0 and locked[k_lo - 1]:
            k_lo -= 1
        while k_hi < len(ws) - 1 and locked[k_hi + 1]:
            k_hi += 1
        lo_in, hi_in = ws[k_lo], ws[k_hi]
    elif _locked(r, target, sign, target, n):
        lo_in = hi_in = target
    else:
        warnings.warn("no locked sample; plateau narrower than the staircase grid",
                      RuntimeWarning, stacklevel=2)
        return Plateau(target, target, 0.0, n)

    def bisect(inside, outside):
        while abs(outside - inside) > refine_tol:
            mid = 0.5 * (inside + outside)
            if _locked(r, mid, sign, target, n):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    w_lo = bisect(lo_in, lo_in - step)
    w_hi = bisect(hi_in, hi_in + step)
    return Plateau(w_lo, w_hi, w_hi - w_lo, n)


# -- width scaling -----------------------------------------------------------------

# Taylor coefficients in r of the resonance offset a(x) around omega = pi for
# the reflect map: omega = pi + a(x) makes x a 2-periodic point.
_A_SERIES = {
    2: lambda x: 2.0 * np.sin(2 * x),
    3: lambda x: 2.0 * np.sin(x) - 2.0 * np.sin(3 * x),
    4: lambda x: -4.0 * np.sin(2 * x) + 5.0 * np.sin(4 * x),
}


def resonance_offset_series(r: float, x, order: int = 3, variant=Variant.REFLECT):
    """Truncated r-series of the resonance offset ``a(x)`` near ``omega = pi``."""
    if Variant(variant) is Variant.CONJUGATE:
        return np.zeros_like(np.asarray(x, dtype=float))
    if order not in (2, 3, 4):
        raise ValueError("order must be 2, 3 or 4")
    return sum(_A_SERIES[k](x) * r**k for k in range(2, order + 1))


def resonance_offset_exact(r: float, x: float, variant=Variant.REFLECT) -> float:
    """The ``a`` solving ``F_{pi+a}^2(x) = x + 2 pi``; the oracle for the series."""
    sign = _sign(variant)

    def g(a):
        return _lift(r, math.pi + a, sign, _lift(r, math.pi + a, sign, x)) - x - TWO_PI

    reach = 2.0 * math.asin(r) + 1e-6
    return brentq(g, -reach, reach, xtol=1e-15, rtol=8.9e-16)


def series_width_pi(r: float, x_grid: int = 4096, order: int = 3,
                    variant=Variant.REFLECT) -> tuple:
    """Predicted ``(min a, max a)`` offsets of the resonance interval around pi."""
    r = check_radius(r)
    if r > 0.2:
        warnings.warn("series prediction used outside its asymptotic regime r <= 0.2",
                      RuntimeWarning, stacklevel=2)
    xs = TWO_PI * np.arange(x_grid) / x_grid
    a = resonance_offset_series(r, xs, order, variant)
    return float(np.min(a)), float(np.max(a))


@dataclass(frozen=True)
class WidthFit:
    slope: float
    intercept: float
    radii: tuple
    widths: tuple

    def __float__(self) -> float:
        return self.slope


def width_exponent_fit(p: int, q: int, r_lo: float, r_hi: float, points: int = 8,
                       variant=Variant.REFLECT, tol: float = BRACKET_TOL) -> WidthFit:
    """Least-squares slope of ``log(width)`` against ``log(r)`` on a geometric grid."""
    if not 0.0 < r_lo < r_hi:
        raise ValueError("need 0 < r_lo < r_hi")
    if points < 2:
        raise ValueError("need at least two radii")
    rs = np.geomspace(r_lo, r_hi, points)
    keep_r, keep_w = [], []
    for r in rs:
        w = resonance_interval(float(r), p, q, tol, variant).width
        if w <= 10.0 * tol:
            warnings.warn(f"width at r={r:.4g} is below the bracket tolerance; excluded",
                          RuntimeWarning, stacklevel=2)
            continue
        keep_r.append(float(r))
        keep_w.append(w)
    if len(keep_r) < 2:
        raise ValueError("fewer than two resolvable widths")
    slope, intercept = np.polyfit(np.log(keep_r), np.log(keep_w), 1)
    return WidthFit(float(slope), float(intercept), tuple(keep_r), tuple(keep_w))


def conjugate_nonlocking_check(r: float, p: int, q: int, resolution: float = 1e-6) -> bool:
    """True when the conjugate family has no plateau (wider than ``resolution``) at ``2 pi p/q``."""
    iv = resonance_interval(r, p, q, min(BRACKET_TOL, resolution / 100), Variant.CONJUGATE)
    return iv.width < resolution


def mobius_rotation_number(r: float, omega: float) -> float:
    """Exact rotation number of the conjugate family in ``[0, pi]`` on its elliptic range.

    The conjugate map extends to ``e^{i omega}(z - r)/(1 - r z)``; it is
    elliptic iff ``|cos(omega/2)| < sqrt(1 - r^2)``, and then conjugate to
    the rotation by ``2 arccos(cos(omega/2)/sqrt(1 - r^2))``.  Outside that
    range it has fixed points and rotation number 0.
    """
    r = check_radius(r)
    c = math.cos(omega / 2.0) / math.sqrt(1.0 - r * r)
    if abs(c) >= 1.0:
        return 0.0
    return 2.0 * math.acos(c)
