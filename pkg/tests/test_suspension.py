from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckeflow.algebra import Vec2
from heckeflow.errors import DomainError
from heckeflow.hecke import make_context
from heckeflow.intervalmaps import farey_ext_step_fast
from heckeflow.suspension import (
    PairedPoint,
    R_side,
    SuspensionCoord,
    act_right,
    branch_of,
    coord_to_pair,
    g_ab,
    geodesic_act,
    h,
    h_index,
    in_H,
    in_S,
    jacobian,
    phi,
    phi_inverse,
    polygon_contains,
    rho,
    s_top,
    side_map_S_to_H,
    side_map_V_to_H,
    side_map_V_to_S,
    slab_partition_check,
    slab_vertex_A,
    slab_vertex_B,
    vertex_identities,
)


def test_phi_examples(c3):
    assert np.array_equal(phi(PairedPoint((1, 0), (1, 0))), np.eye(2))
    assert np.array_equal(phi(PairedPoint((2, 3), (0.5, 0))), g_ab(2, 3))


def test_phi_equivariance(c3):
    A = c3.Mf[1]
    u = np.array([1.0, 2.0])
    v = np.array([0.2, 0.4])
    pair = PairedPoint(tuple(u), tuple(v))
    lhs = phi(PairedPoint(tuple(np.linalg.solve(A, u)), tuple(A.T @ v)))
    rhs = phi(pair) @ np.linalg.inv(A).T
    assert np.allclose(lhs, rhs, atol=1e-14)
    assert np.allclose(phi(act_right(pair, A)), phi(pair) @ A, atol=1e-14)


def test_phi_inverse_roundtrip():
    m = np.array([[2.0, 3.0], [-1.0, -1.0]])
    assert np.allclose(phi(phi_inverse(m)), m)


def test_pair_requires_unit_dot():
    with pytest.raises(DomainError):
        PairedPoint((1, 1), (1, 1))


def test_coord_to_pair_examples():
    p = coord_to_pair(SuspensionCoord(1, 1, 0))
    assert p.u == (1, 1) and p.v == pytest.approx((1, 0))
    p = coord_to_pair(SuspensionCoord(1, 1, 0.5))
    assert p.v == pytest.approx((0.5, 0.5))
    p = coord_to_pair(SuspensionCoord(2, 1, 0.5 - 1e-12))
    assert p.v == pytest.approx((0.0, 1.0), abs=1e-11)
    with pytest.raises(DomainError):
        SuspensionCoord(2, 1, 0.5)


@given(a=st.floats(0.1, 3), b=st.floats(0.1, 3), f=st.floats(0, 0.999))
def test_coord_matrix_is_horocycle_of_g(a, b, f):
    s = f / (a * b)
    assert np.allclose(phi(coord_to_pair(SuspensionCoord(a, b, s))), h(s) @ g_ab(a, b), atol=1e-12)


def test_geodesic_examples():
    p = PairedPoint((1, 0), (1, 0))
    assert geodesic_act(0.0, p) == p
    q = geodesic_act(math.log(2), p)
    assert q.u == pytest.approx((2, 0)) and q.v == pytest.approx((0.5, 0))


@given(t=st.floats(-5, 5), x=st.floats(0.1, 2), y=st.floats(0.1, 2), z=st.floats(0, 1))
def test_geodesic_preserves_dot(t, x, y, z):
    v = (z / x, (1 - z) / y)
    p = geodesic_act(t, PairedPoint((x, y), v))
    assert p.dot == pytest.approx(1.0, abs=1e-12)


def test_polygon_examples(c5, ctx):
    assert polygon_contains(c5, (1.3, 1.0))
    assert not polygon_contains(c5, (0.5, 0.5))
    assert polygon_contains(ctx, tuple(ctx.wf[1]))


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_slab_tiling(q):
    rep = slab_partition_check(make_context(q), 10_000, np.random.default_rng(q))
    assert rep["tiling_ok"] and rep["max_multiplicity"] == 1 and rep["gap_ok"]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_vertex_images(q):
    ctx = make_context(q)
    vid = vertex_identities(ctx)
    # the image of A_{q-1} is exactly (1, 0) = w_0 and B_2 maps to w_{q-2}
    assert vid["(M_{q-2})^T A_{q-1} = (1, 0)"]["holds"]
    assert vid["(M_1)^T B_2 = w_{q-2}"]["holds"]
    others = {k: v for k, v in vid.items() if "w_1" not in k}
    assert all(v["holds"] for v in others.values())


def test_q5_vertex_A4(c5):
    assert slab_vertex_A(c5, 4) == Vec2(1, 0)
    assert c5.M[3].T @ slab_vertex_A(c5, 4) == c5.w[0]
    assert slab_vertex_B(c5, 2) == Vec2(0, 1)


def test_rho_examples(c3, c5):
    assert rho(c3, 0, 0.7) == pytest.approx(0.7)
    assert rho(c3, 1, 0.3) == pytest.approx(0.7)
    assert rho(c5, 3, 0.2) == pytest.approx(1 - 0.2 * c5.lam_float)
    assert rho(c5, 3, 0.2) == pytest.approx(0.676393, abs=1e-6)
    with pytest.raises(DomainError):
        rho(c3, 0, 0.3)


def test_side_map_examples(c3, c5):
    al, sg = side_map_V_to_S(c3, 1, (0.3, 0.0))
    assert al == pytest.approx(3 / 7, abs=1e-12) and sg == pytest.approx(0.0, abs=1e-15)
    al, sg = side_map_V_to_S(c3, 0, (1.0, 0.0))
    assert (al, sg) == pytest.approx((1.0, 0.0), abs=1e-15)
    a, s = side_map_S_to_H(c3, 1, (3 / 7, 0.0))
    assert (a, s) == pytest.approx((3 / 7, 0.0), abs=1e-12)
    a, s = side_map_S_to_H(c3, 0, (2 / 3, 0.0))
    assert (a, s) == pytest.approx((2 / 3, 1.5), abs=1e-12)


def test_side_map_jacobian_q5(c5):
    J = jacobian(lambda x, t: side_map_V_to_S(c5, 2, (x, t)), 0.45, 0.3)
    assert abs(J - 1) < 1e-6


def test_jacobian_five_point_stencil_is_fourth_order():
    # det of (x, y) -> (x^3, y e^x) is 3 x^2 e^x; three-point error O(h^2), five-point O(h^4)
    f = lambda x, y: (x**3, y * np.exp(x))
    exact = 3 * 0.7**2 * np.exp(0.7)
    err2 = abs(jacobian(f, 0.7, 0.4, 1e-3) - exact)
    err4 = abs(jacobian(f, 0.7, 0.4, 1e-3, order=4) - exact)
    assert err4 < 1e-10 < err2


def test_jacobian_rejects_other_orders():
    with pytest.raises(DomainError):
        jacobian(lambda x, y: (x, y), 0.5, 0.5, order=3)


def test_side_map_rejects_wrong_branch(c3):
    with pytest.raises(DomainError):
        side_map_V_to_S(c3, 0, (0.3, 0.0))


@given(q=st.integers(3, 9), u=st.floats(0.001, 0.999), f=st.floats(0.0, 0.999))
def test_markov_condition(q, u, f):
    ctx = make_context(q)
    s = f * s_top(ctx, u)
    i = branch_of(ctx, u)
    a2, s2 = side_map_V_to_H(ctx, (u, s))
    assert in_H(ctx, ctx.q - 2 - i, a2, s2, 1e-9)


@given(q=st.integers(3, 9), u=st.floats(0.001, 0.999), f=st.floats(0.0, 0.999))
def test_closed_form_matches_matrix_path(q, u, f):
    ctx = make_context(q)
    s = f * s_top(ctx, u)
    a_ref, s_ref = side_map_V_to_H(ctx, (u, s))
    a2, s2, _ = farey_ext_step_fast(ctx, (u, s))
    assert a2 == pytest.approx(a_ref, abs=1e-12)
    assert s2 == pytest.approx(s_ref, rel=1e-9, abs=1e-9)


def test_q5_middle_image_strip(c5, rng):
    lo, hi = c5.ends[3], c5.ends[2]
    for a in rng.uniform(lo, hi, 200):
        s = rng.random() * s_top(c5, a)
        a2, s2 = side_map_V_to_H(c5, (a, s))
        assert R_side(c5, 1, a2) * (1 - 1e-9) <= s2 < R_side(c5, 2, a2) * (1 + 1e-9)
        assert h_index(c5, a2, s2 * (1 + 1e-12)) in (1, 2)


def test_side_set_membership(c3):
    assert in_S(c3, 1.0, 0.5)
    assert not in_S(c3, 0.5, 4.5)
    assert s_top(c3, 0.5) == 4.0
