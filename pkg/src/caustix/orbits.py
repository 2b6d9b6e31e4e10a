"""Periodic points, symmetric solutions and bifurcation rasters of ``R_r``."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .caustics import Relation, phi_c
from .circle_map import (
    TWO_PI,
    MapParams,
    Variant,
    check_radius,
    circle_distance,
    critical_points,
    iterate_jet,
    iterate_lift,
    map_jet,
    map_lift,
    reflection,
    wrap_angle,
)

SCAN_POINTS = 8192
ROOT_TOL = 1e-12
CYCLE_TOL = 1e-7
NEUTRAL_BAND = 1e-9


class Stability(str, enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


class RootResolutionError(RuntimeError):
    """The scan grid is too coarse to separate neighbouring roots."""


def stability_of(multiplier: float, band: float = NEUTRAL_BAND) -> Stability:
    m = abs(multiplier)
    if abs(m - 1.0) <= band:
        return Stability.NEUTRAL
    return Stability.ATTRACTING if m < 1.0 else Stability.REPELLING


@dataclass(frozen=True)
class PeriodicPoint:
    phi: float
    period: int
    multiplier: float
    stability: Stability


def period2_structure(r: float) -> list:
    """The two 2-cycles ``{0, pi}`` and ``{phi_c, -phi_c}`` of ``R_r``.

    One :class:`PeriodicPoint` is returned per cycle point; both points of a
    cycle carry the cycle's multiplier.
    """
    r = check_radius(r)
    if r == 0.0:
        raise ValueError("r = 0 is the antipodal map: every point has period 2")
    p = reflection(r)
    m0 = (1 - 9 * r * r) / (1 - r * r)
    pc = phi_c(r)
    mc = float(map_jet(p, pc).d1) ** 2
    out = []
    for phi, mult in ((0.0, m0), (math.pi, m0), (pc, mc), (-pc, mc)):
        out.append(PeriodicPoint(phi, 2, mult, stability_of(mult)))
    return out


def cycle_multiplier(p: MapParams, phi: float, period: int) -> float:
    return float(iterate_jet(p, phi, period).d1)


def period_doubling_onset(lo: float = 0.34, hi: float = 0.6, tol: float = 1e-12) -> float:
    """Radius where the multiplier of ``{0, pi}`` passes through -1.

    The multiplier is taken from the jet of ``R^2`` at 0, not from the closed
    form, so this is a genuine numerical measurement.
    """
    return brentq(lambda r: cycle_multiplier(reflection(r), 0.0, 2) + 1.0, lo, hi, xtol=tol)


@dataclass(frozen=True)
class SymmetricSolutions:
    roots: list
    scan_points: int

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def __getitem__(self, k):
        return self.roots[k]


def roots_mod_2pi(D, scan: int = SCAN_POINTS) -> list:
    """Zeros of ``D(phi) = 0 (mod 2 pi)`` on ``(-pi, pi]`` for a continuous lifted ``D``.

    Every crossing of a multiple of 2 pi between adjacent nodes of a
    half-offset scan grid is refined by Brent's method to ``1e-12``.
    """
    h = TWO_PI / scan
    phi = -math.pi + h * (np.arange(scan + 1) + 0.5)
    level = np.floor(D(phi) / TWO_PI)
    roots = []
    for k in np.flatnonzero(level[1:] != level[:-1]):
        lo_lvl, hi_lvl = level[k], level[k + 1]
        if abs(hi_lvl - lo_lvl) > 1:
            raise RootResolutionError(
                f"several roots inside one cell of width {h:.3g} near phi={phi[k]:.6f}")
        c = TWO_PI * max(lo_lvl, hi_lvl)
        t = brentq(lambda s: float(D(s)) - c, phi[k], phi[k + 1], xtol=ROOT_TOL, rtol=8.9e-16)
        roots.append(float(wrap_angle(t)))
    roots.sort()
    for a, b in zip(roots, roots[1:]):
        if b - a < 2 * h:
            raise RootResolutionError(f"roots {a:.6f} and {b:.6f} are not separated at "
                                      f"scan resolution {scan}")
    return roots


def find_symmetric_solutions(p: MapParams, n: int, relation: Relation,
                             scan: int = SCAN_POINTS) -> SymmetricSolutions:
    """Solve ``F^n(phi) = target(phi) (mod 2 pi)`` on ``(-pi, pi]``."""
    if n < 1:
        raise ValueError("n must be positive")
    relation = Relation(relation)
    roots = roots_mod_2pi(lambda t: iterate_lift(p, t, n) - relation.target(t), scan)
    return SymmetricSolutions(roots, scan)


@dataclass(frozen=True)
class DisplacementCheck:
    min_displacement: float
    bound: float
    holds: bool


def displacement_bound_check(r: float, grid_size: int = SCAN_POINTS) -> DisplacementCheck:
    """Compare ``min |R(phi) - phi|`` on a grid with ``pi - 2|log(1 - r)|``."""
    r = check_radius(r)
    phi = -math.pi + TWO_PI * np.arange(1, grid_size + 1) / grid_size
    disp = circle_distance(map_lift(reflection(r), phi), phi)
    lo = float(np.min(disp))
    bound = math.pi - 2.0 * abs(math.log1p(-r))
    return DisplacementCheck(lo, bound, bool(bound <= 0.0 or lo >= bound - 1e-12))


def asymptotic_orbit(p: MapParams, phi0: float, n1: int, n2: int) -> np.ndarray:
    """Projected ``F^k(phi0)`` for ``n1 < k < n2``, in iteration order."""
    if not 0 <= n1 < n2:
        raise ValueError("need 0 <= N1 < N2")
    x = iterate_lift(p, float(phi0), n1 + 1)
    out = np.empty(n2 - n1 - 1)
    for k in range(n2 - n1 - 1):
        out[k] = wrap_angle(x)
        x = map_lift(p, x)
    return out


class Seed(str, enum.Enum):
    CRITICAL_PLUS = "critical+"
    CRITICAL_MINUS = "critical-"
    CUSTOM = "custom"


def critical_seed(r: float, which: Seed) -> float:
    cp = critical_points(r)
    if not cp.points:
        raise ValueError(f"no critical point for r={r!r} < 1/3")
    if cp.degenerate:
        return 0.0
    return cp.points[0] if Seed(which) is Seed.CRITICAL_PLUS else cp.points[1]


@dataclass(frozen=True)
class RasterGrid:
    """Columns of samples over a parameter axis, assembled in column order."""

    x_min: float
    x_max: float
    steps: int
    xs: tuple
    columns: tuple
    semantics: str

    def rows(self):
        for x, col in zip(self.xs, self.columns):
            for v in col:
                yield (x, *v) if isinstance(v, tuple) else (x, v)


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be positive")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])


def bifurcation_raster(r_min: float, r_max: float, r_steps: int,
                       seed: Union[Seed, str] = Seed.CRITICAL_PLUS, n1: int = 1000, n2: int = 1200,
                       custom_phi: Optional[float] = None, threads: int = 1) -> RasterGrid:
    """Asymptotic orbits of the chosen seed for each ``r`` on the axis."""
    seed = Seed(seed)
    rs = _axis(r_min, r_max, r_steps)
    if seed is not Seed.CUSTOM and rs.min() < 1.0 / 3.0 - 1e-12:
        raise ValueError("critical seeds exist only for r >= 1/3")
    if seed is Seed.CUSTOM and custom_phi is None:
        raise ValueError("custom seed needs a phase")

    def column(r):
        phi0 = custom_phi if seed is Seed.CUSTOM else critical_seed(r, seed)
        return tuple(asymptotic_orbit(reflection(r), phi0, n1, n2).tolist())

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            cols = tuple(ex.map(column, rs))
    else:
        cols = tuple(column(r) for r in rs)
    return RasterGrid(float(rs[0]), float(rs[-1]), r_steps, tuple(rs.tolist()), cols,
                      f"asymptotic-orbit:{seed.value}")


def attracting_period_at(r: float, seed: float, max_period: int = 64, transient: int = 10_000,
                         tail: int = 256, tol: float = CYCLE_TOL) -> Optional[int]:
    """Smallest ``q <= max_period`` for which the tail orbit is q-periodic."""
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    orbit = asymptotic_orbit(reflection(r), seed, transient, transient + tail + max_period + 1)
    for q in range(1, max_period + 1):
        if np.all(circle_distance(orbit[q:q + tail], orbit[:tail]) < tol):
            return q
    return None


def r2_sign_pattern(r: float, grid: int = SCAN_POINTS) -> dict:
    """Sign of ``R^2(phi) - phi - 2 pi`` on the four arcs cut out by the 2-cycles."""
    p = reflection(r)
    pc = phi_c(r)
    arcs = {"(-pi,-phi_c)": (-math.pi, -pc), "(-phi_c,0)": (-pc, 0.0),
            "(0,phi_c)": (0.0, pc), "(phi_c,pi)": (pc, math.pi)}
    out = {}
    for name, (a, b) in arcs.items():
        t = np.linspace(a, b, grid)[1:-1]
        g = iterate_lift(p, t, 2) - t - TWO_PI
        out[name] = int(np.sign(g).min()) if np.all(np.sign(g) == np.sign(g[0])) else 0
    return out
