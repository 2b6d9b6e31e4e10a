import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from caustix.caustics import (
    CuspKind,
    Relation,
    a2_values,
    a_sequence,
    a_value_from_jet,
    caustic_convergence,
    caustic_curve,
    caustic_point,
    circle_contacts,
    compress_radius,
    compress_sample,
    contact_function,
    cusp_criterion_symmetric,
    envelope_residual,
    find_cusps,
    observed_cusp_counts,
    phi_c,
    quadrilateral_limit,
    reaches_infinity,
    sectional_curve,
    tangent_direction,
    taylor_local_model,
    vanishing_order_even,
)
from caustix.circle_map import circle_distance, iterate_lift, reflection
from caustix.series import caustic_series


@given(st.floats(0.01, 0.45), st.floats(-3.1, 3.1), st.integers(1, 3))
@settings(max_examples=100, deadline=None)
def test_caustic_points_satisfy_the_envelope_equations(r, phi, n):
    # the chord degenerates to a point at fixed points of the iterate
    assume(circle_distance(iterate_lift(reflection(r), phi, n), phi) > 1e-3)
    s = caustic_point(reflection(r), n, phi)
    if not s.at_infinity and abs(s.x) + abs(s.y) < 1e6:
        assert envelope_residual(reflection(r), n, s) < 1e-9


@given(st.floats(0.0, 0.9), st.floats(-3.1, 3.1), st.integers(1, 3))
@settings(max_examples=100, deadline=None)
def test_contact_identity(r, phi, n):
    p = reflection(r)
    s = caustic_point(p, n, phi)
    if not s.at_infinity and abs(s.x) + abs(s.y) < 1e4:
        assert s.x**2 + s.y**2 - 1 == pytest.approx(float(contact_function(p, n, phi)), abs=1e-9)


def test_trivial_caustics_at_zero_radius():
    ring = caustic_curve(reflection(0.0), 2, 64)
    assert len(ring) == 64
    assert all(math.hypot(s.x, s.y) == pytest.approx(1.0) for s in ring)
    centre = caustic_curve(reflection(0.0), 1, 32)
    assert all(abs(s.x) < 1e-15 and abs(s.y) < 1e-15 for s in centre)


def test_compression_scale():
    assert compress_radius(0.0) == 0.0
    assert compress_radius(1.0) == 1.0
    assert compress_radius(math.inf) == 2.0
    rho = np.linspace(0, 50, 200)
    assert np.all(np.diff(compress_radius(rho)) > 0)


def test_compressed_curve_touches_the_infinity_circle():
    pts = [compress_sample(s) for s in caustic_curve(reflection(1 / math.sqrt(2)), 1, 4096)]
    assert max(math.hypot(x, y) for x, y in pts) == pytest.approx(2.0, abs=1e-2)


@pytest.mark.parametrize("r, expected", [(0.3, False), (0.499, False), (0.5, True), (0.6, True), (0.9, True)])
def test_reaches_infinity_threshold(r, expected):
    assert reaches_infinity(reflection(r)) is expected


def test_cusps_at_half_include_one_at_infinity():
    cusps = find_cusps(reflection(0.5), 1)
    phis = sorted(c.phi_star for c in cusps)
    assert phis == pytest.approx([-math.pi / 3, 0.0, math.pi / 3, math.pi], abs=1e-12)
    assert caustic_point(reflection(0.5), 1, 0.0).at_infinity
    # discriminants, frozen after matching the closed form at +-pi/3
    disc = {round(c.phi_star, 6): c.discriminant for c in cusps}
    assert disc[round(math.pi / 3, 6)] == pytest.approx(6.0, rel=1e-12)
    assert disc[0.0] == pytest.approx(-72.0, rel=1e-12)
    assert disc[round(math.pi, 6)] == pytest.approx(0.375, rel=1e-12)


def test_odd_iterate_cusps_satisfy_the_symmetric_criterion():
    p = reflection(0.3)
    cusps = find_cusps(p, 3)
    assert len(cusps) == 4
    for phi in (0.0, math.pi):
        assert min(circle_distance(c.phi_star, phi) for c in cusps) < 1e-9
        rec = cusp_criterion_symmetric(p, 3, phi, Relation.PLUS_PI)
        assert rec is not None and rec.kind is CuspKind.SEMICUBICAL


def test_symmetric_criterion_rejects_non_cusps():
    assert cusp_criterion_symmetric(reflection(0.3), 2, 0.0, Relation.FIXED_POINT) is None
    with pytest.raises(ValueError):
        cusp_criterion_symmetric(reflection(0.3), 1, 0.5, Relation.FIXED_POINT)


def test_observed_cusp_counts_alternate():
    table = observed_cusp_counts(rs=(0.2,), n_max=4)
    assert [table[(0.2, n)] for n in range(1, 5)] == [4, 0, 4, 0]


def test_a2_matches_jet():
    for r in (0.1, 0.2, 0.3):
        a0, api = a2_values(r)
        assert a0 == pytest.approx(a_value_from_jet(r, 2, 0.0), rel=1e-12)
        assert api == pytest.approx(a_value_from_jet(r, 2, math.pi), rel=1e-12)


def test_a_sequence_validation():
    with pytest.raises(ValueError):
        a_sequence(0.0, 3)
    with pytest.raises(ValueError):
        a_sequence(0.2, -1)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_circle_contacts_at_the_critical_radius(m):
    contacts = circle_contacts(reflection(1 / 3), 2 * m)
    pc = phi_c(1 / 3)
    assert sorted(contacts) == pytest.approx(sorted([-pc, 0.0, pc, math.pi]), abs=1e-9)


def test_tangent_direction_falls_back_to_series_when_flat():
    p = reflection(1 / 3)
    for phi in (0.0, math.pi):
        tx, ty = tangent_direction(p, 4, phi)
        # tangent to the circle at +-1 is vertical
        assert abs(tx) < 1e-9 and abs(abs(ty) - 1) < 1e-9


def test_local_model_recovers_series_coefficients():
    # the fit must agree with the exact series; the stated larger targets do not
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for phi_a in (0.0, math.pi):
            x, y = caustic_series(reflection(1 / 3), 2, phi_a, 6)
            model = taylor_local_model(1 / 3, 2, phi_a)
            assert model.x_coeffs[4] == pytest.approx(x.c[4].real, rel=0.01)
            assert model.y_coeffs[3] == pytest.approx(y.c[3].real, rel=0.01)


def test_local_model_validation():
    with pytest.raises(ValueError):
        taylor_local_model(1 / 3, 2, 1.0)
    with pytest.raises(ValueError):
        taylor_local_model(1 / 3, 2, 0.0, order=7)


def test_vanishing_order_is_one_away_from_the_critical_radius():
    assert vanishing_order_even(0.2, 1, 0.0) == 1


def test_quadrilateral_vertices_and_convergence_rows():
    verts = quadrilateral_limit(0.3)
    assert all(math.hypot(*v) == pytest.approx(1.0) for v in verts)
    rows = caustic_convergence(0.3, 4)
    dists = [row.max_vertex_distance for row in rows]
    assert all(b < a for a, b in zip(dists, dists[1:]))
    with pytest.raises(ValueError):
        caustic_convergence(0.4, 2)


def test_sectional_curve_is_convex_for_small_radius():
    sc = sectional_curve(0.05, 1)
    assert sc.curvature_sign_changes == 0
    assert sc.s_tilde[len(sc.phi) // 2] == 0.0
