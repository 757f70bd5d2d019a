"""Suspension mechanics: the pair map Phi, the polygon P^q, slabs and side maps.

Pairs (u, v) of first-quadrant vectors with u . v = 1 correspond to matrices
Phi(u, v) = [[u_x, u_y], [-v_y, v_x]] in SL(2, R).  Under this map the
geodesic flow scales u by e^t and v by e^-t, and right multiplication by A
becomes (u, v) -> (A^T u, A^-1 v).

Points of the side set S are (a, s) <-> h_s g_{a, 1-a}, those of the chart
S_i are (alpha, sigma) <-> h_sigma g_{alpha w_i + (1-alpha) w_{i+1}}.  The side
maps are computed here from the defining matrix products; the closed forms
used by the orbit kernels are checked against them in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import EPS, Vec2
from .bcz import roof_i
from .errors import DomainError
from .hecke import HeckeContext

DOT_TOL = 1e-9

# -- flows -----------------------------------------------------------------------


def h(s: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [-s, 1.0]])


def g(t: float) -> np.ndarray:
    return np.array([[math.exp(t), 0.0], [0.0, math.exp(-t)]])


def g_ab(a: float, b: float) -> np.ndarray:
    return np.array([[a, b], [0.0, 1.0 / a]])


@dataclass(frozen=True)
class PairedPoint:
    u: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self):
        d = self.u[0] * self.v[0] + self.u[1] * self.v[1]
        if abs(d - 1) > DOT_TOL:
            raise DomainError(f"u . v = {d}, expected 1")

    @property
    def dot(self) -> float:
        return self.u[0] * self.v[0] + self.u[1] * self.v[1]


@dataclass(frozen=True)
class SuspensionCoord:
    a: float
    b: float
    s: float

    def __post_init__(self):
        if not (self.a > 0 and self.b >= 0):
            raise DomainError("(a, b) must lie in the first quadrant")
        top = math.inf if self.b == 0 else 1 / (self.a * self.b)
        if not (0 <= self.s < top):
            raise DomainError(f"s = {self.s} outside [0, 1/(ab))")


def phi(pair: PairedPoint) -> np.ndarray:
    """Phi(u, v) = [[u_x, u_y], [-v_y, v_x]]."""
    (a, b), (c, d) = pair.u, pair.v
    return np.array([[a, b], [-d, c]], dtype=float)


def phi_inverse(m) -> PairedPoint:
    m = np.asarray(m, dtype=float)
    return PairedPoint((m[0, 0], m[0, 1]), (m[1, 1], -m[1, 0]))


def coord_to_pair(c: SuspensionCoord) -> PairedPoint:
    """(a, b, s) -> ((a, b), (1 - abs)(1/a, 0) + abs (0, 1/b)), so Phi = h_s g_{a,b}."""
    t = c.a * c.b * c.s
    v = ((1 - t) / c.a, t / c.b if c.b else 0.0)
    return PairedPoint((c.a, c.b), v)


def geodesic_act(t: float, pair: PairedPoint) -> PairedPoint:
    e = math.exp(t)
    return PairedPoint((e * pair.u[0], e * pair.u[1]), (pair.v[0] / e, pair.v[1] / e))


def act_right(pair: PairedPoint, A) -> PairedPoint:
    """The pair of Phi(u, v) A, namely (A^T u, A^-1 v)."""
    A = np.asarray(A, dtype=float)
    u = A.T @ np.asarray(pair.u)
    v = np.linalg.solve(A, np.asarray(pair.v))
    return PairedPoint(tuple(u), tuple(v))


# -- the polygon -----------------------------------------------------------------


def polygon_contains(ctx: HeckeContext, p, eps: float = EPS) -> bool:
    """Membership in P^q: the closed hull of w_0..w_{q-1} minus the segment [w_0, w_{q-1}]."""
    return bool(polygon_contains_batch(ctx, np.array([float(p[0])]), np.array([float(p[1])]), eps)[0])


def polygon_contains_batch(ctx: HeckeContext, x, y, eps: float = EPS) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = ctx.wf[: ctx.q]
    inside = x + y > 1 + eps
    for i in range(ctx.q - 1):
        ex, ey = w[i + 1] - w[i]
        inside &= ex * (y - w[i, 1]) - ey * (x - w[i, 0]) >= -eps
    return inside


def slab_vertex_A(ctx: HeckeContext, i: int) -> Vec2:
    """A_i: the solution of a = 1 and (a, b) . w_{i-1} = 1, for 2 <= i <= q-1."""
    if not 2 <= i <= ctx.q - 1:
        raise DomainError("A_i is defined for 2 <= i <= q-1")
    x, y = ctx.w[i - 1]
    one = ctx.field.one
    return Vec2(one, (one - x) / y)


def slab_vertex_B(ctx: HeckeContext, i: int) -> Vec2:
    """B_i: the solution of lam a + b = 1 and (a, b) . w_{i-1} = 1; B_2 = (0, 1)."""
    if not 2 <= i <= ctx.q - 1:
        raise DomainError("B_i is defined for 2 <= i <= q-1")
    x, y = ctx.w[i - 1]
    lam, one = ctx.lam, ctx.field.one
    den = lam * y - x
    if den == 0:
        # the two lines coincide for i = 2; the degenerate vertex is (0, 1)
        return Vec2(ctx.field.zero, one)
    return Vec2((y - one) / den, (lam - x) / den)


def vertex_identities(ctx: HeckeContext) -> dict[str, dict]:
    """Exact images of the slab vertices under (M_{i-1})^T.

    Each entry records the computed image, the claimed value and whether they
    agree.  The claim that (M_{q-2})^T A_{q-1} equals w_1 is recorded
    literally; the computed image is (1, 0) = w_0.
    """
    q, M, w = ctx.q, ctx.M, ctx.w
    one, zero = ctx.field.one, ctx.field.zero
    out: dict[str, dict] = {}

    def rec(name, lhs, rhs):
        out[name] = {"image": lhs, "claimed": rhs, "holds": lhs == rhs}

    img_A = M[q - 2].T @ slab_vertex_A(ctx, q - 1)
    rec("(M_{q-2})^T A_{q-1} = w_1", img_A, w[1])
    rec("(M_{q-2})^T A_{q-1} = (1, 0)", img_A, Vec2(one, zero))
    rec("(M_1)^T B_2 = w_{q-2}", M[1].T @ slab_vertex_B(ctx, 2), w[q - 2])
    for i in range(3, q):
        lhs = M[i - 1].T @ slab_vertex_B(ctx, i)
        rhs = M[i - 2].T @ slab_vertex_A(ctx, i - 1)
        name = f"(M_{i - 1})^T B_{i} = (M_{i - 2})^T A_{i - 1} on a = 1"
        rec(name, lhs, rhs)
        out[name]["holds"] = out[name]["holds"] and lhs.x == 1
    for i in range(2, q):
        A = slab_vertex_A(ctx, i)
        B = slab_vertex_B(ctx, i)
        on_lines = A.x == 1 and A.x * w[i - 1].x + A.y * w[i - 1].y == 1
        if i > 2:
            on_lines = on_lines and ctx.lam * B.x + B.y == 1 and B.x * w[i - 1].x + B.y * w[i - 1].y == 1
        out[f"A_{i}, B_{i} solve their defining equations"] = {"image": (A, B), "claimed": None, "holds": on_lines}
    return out


def _in_base(ctx: HeckeContext, i: int, a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    """Base of slab_i inside T' = {0 < a <= 1, 1 - lam a < b <= 1 - a}."""
    lam = ctx.lam_float
    m = (a > 0) & (a <= 1 + eps) & (b > 1 - lam * a + eps) & (b <= 1 - a + eps)
    if i >= 2:
        m &= a * ctx.wf[i - 1, 0] + b * ctx.wf[i - 1, 1] > 1 + eps
    return m


def slab_coverage(ctx: HeckeContext, x: np.ndarray, y: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """How many pieces of the tiling Delta, (M_{i-1})^T base_i contain each point."""
    count = ((x <= 1 + eps) & (y <= 1 + eps) & (x + y > 1 + eps)).astype(np.int64)
    for i in range(1, ctx.q):
        m = ctx.Mf[i - 1]
        # preimage under M^T is (M^T)^{-1} p = (M^{-1})^T p
        minv_t = np.array([[m[1, 1], -m[1, 0]], [-m[0, 1], m[0, 0]]])
        a = minv_t[0, 0] * x + minv_t[0, 1] * y
        b = minv_t[1, 0] * x + minv_t[1, 1] * y
        count += _in_base(ctx, i, a, b, eps)
    return count


def slab_partition_check(ctx: HeckeContext, samples: int, rng: np.random.Generator | None = None) -> dict:
    """Sampling check that Delta and the slab-base images tile P^q exactly once.

    Also checks the return-time gaps R_{q,i} - R_{q,i-1} = 1/((a,b).w_i (a,b).w_{i-1})
    on random triangle points with (a,b).w_{i-1} > 1, and the exact vertex
    identities.
    """
    if samples <= 0:
        raise DomainError("samples must be positive")
    rng = np.random.default_rng(0) if rng is None else rng
    top = float(ctx.wf[: ctx.q].max())
    x = rng.random(samples) * top
    y = rng.random(samples) * top
    inside = polygon_contains_batch(ctx, x, y, eps=0.0)
    cover = slab_coverage(ctx, x, y)
    bad = int(np.count_nonzero(cover != inside.astype(np.int64)))

    from .bcz import sample_triangle

    a, b = sample_triangle(ctx, samples, rng)
    gap_res = 0.0
    for i in range(1, ctx.q):
        di = a * ctx.wf[i, 0] + b * ctx.wf[i, 1]
        dm = a * ctx.wf[i - 1, 0] + b * ctx.wf[i - 1, 1]
        sel = dm > 1 if i >= 2 else np.ones_like(a, dtype=bool)
        if not sel.any():
            continue
        Ri = ctx.wf[i, 1] / (a[sel] * di[sel])
        Rm = ctx.wf[i - 1, 1] / (a[sel] * dm[sel])
        gap = Ri - Rm
        expect = 1 / (di[sel] * dm[sel]) if i >= 2 else 1 / (a[sel] * di[sel])
        gap_res = max(gap_res, float(np.max(np.abs(gap - expect) / expect)))
        if np.any(gap <= 0):
            gap_res = math.inf
    vid = vertex_identities(ctx)
    return {
        "q": ctx.q,
        "samples": samples,
        "inside": int(inside.sum()),
        "miscovered": bad,
        "max_multiplicity": int(cover.max()),
        "tiling_ok": bad == 0,
        "gap_max_rel_residual": gap_res,
        "gap_ok": gap_res < 1e-9,
        "vertex_identities": {k: bool(v["holds"]) for k, v in vid.items()},
    }


# -- side sets -------------------------------------------------------------------


def s_top(ctx: HeckeContext, a: float) -> float:
    """Upper end of the fibre of S over a: 1/(a(1-a)), or lam at a = 1."""
    return ctx.lam_float if a >= 1 else 1.0 / (a * (1.0 - a))


def R_side(ctx: HeckeContext, j: int, a: float) -> float:
    """R_{q,j}(a, 1-a), with R_{q,q-1} replaced by the fibre top."""
    if j >= ctx.q - 1:
        return s_top(ctx, a)
    if j == 0:
        return 0.0
    return roof_i(ctx, j, a, 1.0 - a)


def in_S(ctx: HeckeContext, a: float, s: float, eps: float = EPS) -> bool:
    return 0 < a <= 1 and -eps <= s < s_top(ctx, a) * (1 + eps)


def branch_of(ctx: HeckeContext, a: float, eps: float = EPS) -> int:
    """Index i with a in I_i = (e_{i+1}, e_i] (right-closed).

    Points within ``eps`` above an end point e_i are snapped onto it.
    """
    if not 0 < a <= 1:
        raise DomainError(f"a = {a} outside (0, 1]")
    e = ctx.ends
    for i in range(ctx.q - 1):
        if a > e[i + 1] + eps:
            return i
    return ctx.q - 2


def in_V(ctx: HeckeContext, i: int, a: float, s: float, eps: float = EPS) -> bool:
    return in_S(ctx, a, s, eps) and branch_of(ctx, a) == i


def h_index(ctx: HeckeContext, a: float, s: float) -> int:
    """The j with (a, s) in H_j, i.e. R_{q,j}(a,1-a) <= s < R_{q,j+1}(a,1-a)."""
    for j in range(ctx.q - 1):
        if s < R_side(ctx, j + 1, a):
            return j
    return ctx.q - 2


def in_H(ctx: HeckeContext, j: int, a: float, s: float, eps: float = EPS) -> bool:
    lo, hi = R_side(ctx, j, a), R_side(ctx, j + 1, a)
    return in_S(ctx, a, s, eps) and lo - eps * max(1.0, lo) <= s < hi + eps * max(1.0, hi)


def chart_point(ctx: HeckeContext, i: int, alpha: float) -> tuple[float, float]:
    """alpha w_i + (1 - alpha) w_{i+1}."""
    w0, w1 = ctx.wf[i], ctx.wf[i + 1]
    return alpha * w0[0] + (1 - alpha) * w1[0], alpha * w0[1] + (1 - alpha) * w1[1]


def in_S_i(ctx: HeckeContext, i: int, alpha: float, sigma: float, eps: float = EPS) -> bool:
    """Chart membership; alpha in (0, 1] for every i (right end points included)."""
    if not (0 < alpha <= 1 + eps):
        return False
    X, Y = chart_point(ctx, i, alpha)
    return -eps <= sigma < (1 / (X * Y) if X * Y > 0 else math.inf) * (1 + eps)


def rho(ctx: HeckeContext, i: int, a: float, eps: float = EPS) -> float:
    """rho_i(a) = (x_{i+1} - y_i) a + (x_i - x_{i+1}); the hit time is -log rho."""
    e = ctx.ends
    if not (e[i + 1] - eps <= a <= e[i] + eps):
        raise DomainError(f"a = {a} outside the closure of I_{i}")
    xi, yi = ctx.wf[i]
    xj = ctx.wf[i + 1, 0]
    return float((xj - yi) * a + (xi - xj))


def hit_time(ctx: HeckeContext, i: int, a: float) -> float:
    return -math.log(rho(ctx, i, a))


def side_map_V_to_S(ctx: HeckeContext, i: int, point, eps: float = EPS) -> tuple[float, float]:
    """(a, s) in V_i -> (alpha, sigma) in S_i via g_{-log rho} h_s g_{a,1-a}."""
    a, s = float(point[0]), float(point[1])
    if not in_V(ctx, i, a, s, eps):
        raise DomainError(f"({a}, {s}) is not in V_{i}")
    r = rho(ctx, i, a, eps)
    m = g(-math.log(r)) @ h(s) @ g_ab(a, 1 - a)
    X, Y = m[0, 0], m[0, 1]
    sigma = -m[1, 0] / X
    wi, wj = ctx.w[i], ctx.w[i + 1]
    if wi.x != wj.x:
        alpha = (X - ctx.wf[i + 1, 0]) / (ctx.wf[i, 0] - ctx.wf[i + 1, 0])
    else:
        alpha = (Y - ctx.wf[i + 1, 1]) / (ctx.wf[i, 1] - ctx.wf[i + 1, 1])
    return float(alpha), float(sigma)


def side_map_S_to_H(ctx: HeckeContext, i: int, chart, eps: float = EPS) -> tuple[float, float]:
    """(alpha, sigma) in S_i -> (a, s) in H_{q-2-i} via h_sigma g_P ((M_i)^-1)^T."""
    alpha, sigma = float(chart[0]), float(chart[1])
    if not in_S_i(ctx, i, alpha, sigma, eps):
        raise DomainError(f"({alpha}, {sigma}) is not in the chart S_{i}")
    X, Y = chart_point(ctx, i, alpha)
    m = ctx.Mf[i]
    minv_t = np.array([[m[1, 1], -m[1, 0]], [-m[0, 1], m[0, 0]]])
    n = h(sigma) @ g_ab(X, Y) @ minv_t
    a = n[0, 0]
    return float(a), float(-n[1, 0] / a)


def side_map_V_to_H(ctx: HeckeContext, point, eps: float = EPS) -> tuple[float, float]:
    """The composite V_i -> S_i -> H_{q-2-i}, i.e. one step of the extended Farey map."""
    a = float(point[0])
    i = branch_of(ctx, a)
    return side_map_S_to_H(ctx, i, side_map_V_to_S(ctx, i, point, eps), eps)


def jacobian(f, x: float, y: float, h_step: float = 1e-6, order: int = 2) -> float:
    """Central finite-difference Jacobian determinant of a planar map.

    ``order`` 2 uses the three-point stencil, 4 the five-point one (for maps
    with large curvature such as the accelerated branches near 0 and 1).
    """

    def diff(dx, dy):
        p1 = np.array(f(x + dx, y + dy)) - np.array(f(x - dx, y - dy))
        if order == 2:
            return p1 / (2 * h_step)
        if order != 4:
            raise DomainError("order must be 2 or 4")
        p2 = np.array(f(x + 2 * dx, y + 2 * dy)) - np.array(f(x - 2 * dx, y - 2 * dy))
        return (8 * p1 - p2) / (12 * h_step)

    d_x = diff(h_step, 0.0)
    d_y = diff(0.0, h_step)
    return float(d_x[0] * d_y[1] - d_x[1] * d_y[0])


def first_exit_inside(ctx: HeckeContext, i: int, a: float, t: float) -> bool:
    """Whether e^t (a, 1-a) lies in P^q (used for hit-time minimality)."""
    e = math.exp(t)
    return polygon_contains(ctx, (e * a, e * (1 - a)), eps=0.0)


__all__ = [
    "h",
    "g",
    "g_ab",
    "PairedPoint",
    "SuspensionCoord",
    "phi",
    "phi_inverse",
    "coord_to_pair",
    "geodesic_act",
    "act_right",
    "polygon_contains",
    "polygon_contains_batch",
    "slab_vertex_A",
    "slab_vertex_B",
    "vertex_identities",
    "slab_coverage",
    "slab_partition_check",
    "s_top",
    "R_side",
    "in_S",
    "branch_of",
    "in_V",
    "h_index",
    "in_H",
    "chart_point",
    "in_S_i",
    "rho",
    "hit_time",
    "side_map_V_to_S",
    "side_map_S_to_H",
    "side_map_V_to_H",
    "jacobian",
]
