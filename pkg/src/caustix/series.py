"""Truncated power series of arbitrary order.

Used where a fixed 4-jet is not enough: at ``r = 1/3`` the even iterates
vanish to order ``3^m`` at the 2-cycle, and both the tangent direction of
the caustic and the order of contact live far beyond the fourth derivative.

Coefficients are normalized Taylor coefficients ``c_k = f^(k)(a)/k!`` and
may be complex.
"""
from __future__ import annotations

import numpy as np

from .circle_map import MapParams


class Series:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def variable(cls, a: float, order: int) -> "Series":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = a
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        c = np.zeros_like(self.c)
        c[0] = other
        return Series(c)

    def __add__(self, other):
        return Series(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        return Series(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return Series(self._coerce(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * other)
        return Series(np.convolve(self.c, other.c)[: len(self.c)])

    __rmul__ = __mul__

    def reciprocal(self) -> "Series":
        a, n = self.c, len(self.c)
        b = np.zeros(n, dtype=complex)
        b[0] = 1.0 / a[0]
        for k in range(1, n):
            b[k] = -b[0] * np.dot(a[1 : k + 1], b[k - 1 :: -1])
        return Series(b)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.c / other)
        return self * other.reciprocal()

    def exp(self) -> "Series":
        a, n = self.c, len(self.c)
        e = np.zeros(n, dtype=complex)
        e[0] = np.exp(a[0])
        j = np.arange(1, n)
        for k in range(1, n):
            e[k] = np.dot(j[:k] * a[1 : k + 1], e[k - 1 :: -1]) / k
        return Series(e)

    def log(self) -> "Series":
        a, n = self.c, len(self.c)
        out = np.zeros(n, dtype=complex)
        out[0] = np.log(a[0])
        for k in range(1, n):
            acc = sum(j * out[j] * a[k - j] for j in range(1, k))
            out[k] = (a[k] - acc / k) / a[0]
        return Series(out)

    def derivative(self) -> "Series":
        k = np.arange(1, len(self.c))
        return Series(self.c[1:] * k)

    @property
    def real(self) -> "Series":
        return Series(self.c.real)

    @property
    def imag(self) -> "Series":
        return Series(self.c.imag)

    def cos(self) -> "Series":
        return (1j * self).exp().real

    def sin(self) -> "Series":
        return (1j * self).exp().imag

    def truncate(self, order: int) -> "Series":
        return Series(self.c[: order + 1])


def map_series(p: MapParams, s: Series) -> Series:
    """Series of the lift composed with the real series ``s``.

    Uses ``alpha(phi) = Im log(1 - r e^{-i phi})``, which is analytic on the
    whole circle for ``r < 1``.
    """
    if p.r == 0.0:
        return s + p.omega
    shift = s - s.c[0].real
    e = (-1j * shift).exp() * (p.r * np.exp(-1j * s.c[0].real))
    alpha = (1.0 - e).log().imag
    # the constant term is the principal argument, as in the closed form
    return s + p.omega + p.sign * alpha


def iterate_series(p: MapParams, phi: float, n: int, order: int) -> Series:
    """Taylor series of ``F^n`` at ``phi`` up to ``order``."""
    if n < 1:
        raise ValueError("iteration count must be positive")
    s = Series.variable(phi, order)
    for _ in range(n):
        s = map_series(p, s)
    return s


def caustic_series(p: MapParams, n: int, phi: float, order: int) -> tuple:
    """Series of the caustic coordinates ``(x, y)`` at ``phi`` up to ``order``."""
    f = iterate_series(p, phi, n, order + 1)
    fp = f.derivative()
    f = f.truncate(order)
    t = Series.variable(phi, order)
    den = (1.0 + fp).reciprocal()
    x = (fp * t.cos() + f.cos()) * den
    y = (fp * t.sin() + f.sin()) * den
    return x.real, y.real


def leading_order(s: Series, tol: float = 1e-6, start: int = 1) -> int:
    """Index of the first coefficient (from ``start``) with modulus above ``tol``.

    The threshold is absolute: rounding noise in low coefficients stays many
    orders of magnitude below the genuine leading term, while later
    coefficients grow too fast for any relative test.
    """
    mag = np.abs(s.c)
    for k in range(start, len(mag)):
        if mag[k] > tol:
            return k
    raise ValueError(f"series vanishes to order {len(mag) - 1}")
