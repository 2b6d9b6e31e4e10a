import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from caustix.circle_map import map_jet, reflection
from caustix.jet import Jet4, jcos, jsin

angles = st.floats(-3.0, 3.0)

_x = sp.Symbol("x")


def sympy_jet(expr, x0):
    out, e = [], expr
    for _ in range(5):
        out.append(float(e.subs(_x, x0)))
        e = sp.diff(e, _x)
    return out


def assert_jet(jet, want, rel=1e-11):
    for got, w in zip(jet.coeffs(), want):
        assert got == pytest.approx(w, rel=rel, abs=1e-11)


@given(angles)
@settings(max_examples=25, deadline=None)
def test_composition_matches_symbolic(x0):
    t = Jet4.variable(x0)
    assert_jet(jcos(jsin(t)) * t, sympy_jet(sp.cos(sp.sin(_x)) * _x, x0))


@given(angles)
@settings(max_examples=25, deadline=None)
def test_reciprocal_matches_symbolic(x0):
    t = Jet4.variable(x0)
    assert_jet((2.0 + jcos(t)).reciprocal(), sympy_jet(1 / (2 + sp.cos(_x)), x0))


@given(st.floats(0.0, 0.9), angles)
@settings(max_examples=25, deadline=None)
def test_map_jet_matches_symbolic_lift(r, x0):
    r_ = sp.Rational(r).limit_denominator(10**12)
    lift = _x + sp.pi - 2 * sp.atan(r_ * sp.sin(_x) / (1 - r_ * sp.cos(_x)))
    assert_jet(map_jet(reflection(float(r_)), x0), sympy_jet(lift, x0), rel=1e-10)


@given(angles)
@settings(max_examples=25, deadline=None)
def test_compose_is_associative(x0):
    f = jsin(Jet4.variable(x0))
    g = jcos(Jet4.variable(f.d0))
    h = jsin(Jet4.variable(g.d0))
    left = h.compose(g.compose(f))
    right = (h.compose(g)).compose(f)
    for a, b in zip(left.coeffs(), right.coeffs()):
        assert a == pytest.approx(b, abs=1e-12)


def test_arithmetic_identities():
    t = Jet4.variable(0.7)
    one = t * t.reciprocal()
    assert one.d0 == pytest.approx(1.0)
    assert all(abs(c) < 1e-14 for c in one.coeffs()[1:])
    zero = (jcos(t) * jcos(t) + jsin(t) * jsin(t)) - 1.0
    assert all(abs(c) < 1e-14 for c in zero.coeffs())
    assert (t - t).coeffs() == (0.0, 0.0, 0.0, 0.0, 0.0)
    assert (3.0 - t).d1 == -1.0
    assert (t / 2.0).d1 == 0.5


def test_derivative_shifts_and_marks_top_order_unknown():
    j = jsin(Jet4.variable(0.3))
    d = j.derivative()
    assert d.coeffs()[:4] == j.coeffs()[1:]
    assert math.isnan(d.d4)


def test_array_jets_match_scalar_jets():
    xs = np.linspace(-2, 2, 7)
    arr = jcos(Jet4.variable(xs)) * Jet4.variable(xs)
    for k, x in enumerate(xs):
        s = jcos(Jet4.variable(float(x))) * Jet4.variable(float(x))
        for a, b in zip(arr.coeffs(), s.coeffs()):
            assert a[k] == pytest.approx(b, abs=1e-15)
