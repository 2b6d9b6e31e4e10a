"""Fixed-order (4) derivative jets.

A :class:`Jet4` holds ``(f, f', f'', f''', f'''')`` at a point.  Components
may be floats or numpy arrays of a common shape, so a whole grid of points
can be pushed through the same arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

ORDER = 4


@dataclass(frozen=True)
class Jet4:
    d0: Any
    d1: Any = 0.0
    d2: Any = 0.0
    d3: Any = 0.0
    d4: Any = 0.0

    @classmethod
    def variable(cls, x) -> "Jet4":
        """Jet of the identity map at ``x``."""
        return cls(x, np.ones_like(x, dtype=float) if np.ndim(x) else 1.0, 0.0, 0.0, 0.0)

    @classmethod
    def constant(cls, c) -> "Jet4":
        return cls(c, 0.0, 0.0, 0.0, 0.0)

    def coeffs(self) -> tuple:
        return (self.d0, self.d1, self.d2, self.d3, self.d4)

    def __getitem__(self, k: int):
        return self.coeffs()[k]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet4):
            return Jet4(self.d0 + other, self.d1, self.d2, self.d3, self.d4)
        return Jet4(*(a + b for a, b in zip(self.coeffs(), other.coeffs())))

    __radd__ = __add__

    def __neg__(self):
        return Jet4(*(-a for a in self.coeffs()))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet4):
            return Jet4(*(a * other for a in self.coeffs()))
        f, g = self.coeffs(), other.coeffs()
        # Leibniz rule
        out = []
        for n in range(ORDER + 1):
            out.append(sum(math.comb(n, k) * f[k] * g[n - k] for k in range(n + 1)))
        return Jet4(*out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet4":
        u = self.d0
        return self.apply((1.0 / u, -1.0 / u**2, 2.0 / u**3, -6.0 / u**4, 24.0 / u**5))

    def __truediv__(self, other):
        if not isinstance(other, Jet4):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- composition ------------------------------------------------------

    def apply(self, outer) -> "Jet4":
        """Compose an outer function, given by its derivatives at ``self.d0``.

        ``outer`` is ``(F, F', F'', F''', F'''')`` evaluated at the value of
        this jet; the result is the jet of ``F(self)`` (Faa di Bruno to
        order 4).
        """
        f0, f1, f2, f3, f4 = outer
        g1, g2, g3, g4 = self.d1, self.d2, self.d3, self.d4
        return Jet4(
            f0,
            f1 * g1,
            f2 * g1**2 + f1 * g2,
            f3 * g1**3 + 3.0 * f2 * g1 * g2 + f1 * g3,
            f4 * g1**4 + 6.0 * f3 * g1**2 * g2 + f2 * (3.0 * g2**2 + 4.0 * g1 * g3) + f1 * g4,
        )

    def compose(self, inner: "Jet4") -> "Jet4":
        """Jet of ``self o inner``; ``self`` must be expanded at ``inner.d0``."""
        return inner.apply(self.coeffs())

    def derivative(self) -> "Jet4":
        """Jet of f'.  The top order is unknown and set to NaN."""
        nan = np.full_like(self.d0, np.nan, dtype=float) if np.ndim(self.d0) else math.nan
        return Jet4(self.d1, self.d2, self.d3, self.d4, nan)

    def map(self, fn: Callable) -> "Jet4":
        return Jet4(*(fn(a) for a in self.coeffs()))


def jcos(u: Jet4) -> Jet4:
    c, s = np.cos(u.d0), np.sin(u.d0)
    return u.apply((c, -s, -c, s, c))


def jsin(u: Jet4) -> Jet4:
    c, s = np.cos(u.d0), np.sin(u.d0)
    return u.apply((s, c, -s, -c, s))
