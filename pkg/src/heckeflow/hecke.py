"""Group data for the Hecke triangle group G_q.

Generators S, T_q, U_q = T_q S, the vectors w_i = U_q^i (1, 0)^T, the matrices
M_i = U_q^i T_q = [w_i w_{i+1}], sector classification in the first quadrant,
and enumeration of the discrete orbit Lambda_q = G_q (1, 0)^T.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Any

import numpy as np

from .algebra import EPS, FieldElement, HeckeField, Mat2, Vec2, dot, field, wedge
from .errors import ClassificationError, DomainError


@dataclass(frozen=True, eq=False)
class HeckeContext:
    """Immutable bundle of exact and float group data for one q."""

    q: int
    field: HeckeField
    lam: FieldElement
    lam_float: float
    w: tuple[Vec2, ...]  # w_0 .. w_{q-1}, exact
    M: tuple[Mat2, ...]  # M_0 .. M_{q-2}, exact
    S: Mat2
    T: Mat2
    U: Mat2
    # float mirrors; wf has q + 1 rows (w_q = -w_0 is used by the BCZ map)
    wf: np.ndarray = dc_field(repr=False)
    Mf: np.ndarray = dc_field(repr=False)
    # right end points x_i / (x_i + y_i) of the Farey intervals, i = 0..q-1
    ends: np.ndarray = dc_field(repr=False)

    @property
    def n_sectors(self) -> int:
        return self.q - 1

    def w_exact(self, i: int) -> Vec2:
        """U_q^i (1, 0)^T for any integer i >= 0 (period 2q up to sign)."""
        if 0 <= i < self.q:
            return self.w[i]
        v = self.w[i % self.q]
        return -v if (i // self.q) % 2 else v

    def numeric(self, lam_value: Any) -> tuple[list[tuple[Any, Any]], list[Mat2]]:
        """w_0..w_q and M_i^{-1} evaluated at a given numeric lambda (e.g. mpf)."""
        ws = [(v.x.evaluate(lam_value), v.y.evaluate(lam_value)) for v in (self.w_exact(i) for i in range(self.q + 1))]
        minv = [m.adjugate().map(lambda c: c.evaluate(lam_value)) for m in self.M]
        return ws, minv


@lru_cache(maxsize=None)
def make_context(q: int) -> HeckeContext:
    if not isinstance(q, int) or q < 3:
        raise DomainError(f"q must be an integer >= 3, got {q!r}")
    K = field(q)
    one, zero, lam = K.one, K.zero, K.lam
    S = Mat2(zero, -one, one, zero)
    T = Mat2(one, lam, zero, one)
    U = T @ S
    w = [Vec2(one, zero)]
    for _ in range(q - 1):
        w.append(U @ w[-1])
    M = tuple(Mat2.columns(w[i], w[i + 1]) for i in range(q - 1))
    wq = U @ w[-1]
    wf = np.array([[float(v.x), float(v.y)] for v in (*w, wq)])
    Mf = np.array([[[float(m.a11), float(m.a12)], [float(m.a21), float(m.a22)]] for m in M])
    ends = np.array([float(v.x / (v.x + v.y)) for v in w])
    return HeckeContext(q, K, lam, float(lam), tuple(w), M, S, T, U, wf, Mf, ends)


def sector_of(ctx: HeckeContext, u, eps: float = EPS, basis=None) -> int:
    """Index i with u in Sigma_i = (0, inf) w_i + [0, inf) w_{i+1}.

    The ray of w_i belongs to Sigma_i; the ray of w_{q-1} = (0, 1) is in no
    sector.  Exact inputs (field elements, fractions, ints) are classified
    exactly.  Floats use a tolerance relative to |u| that snaps near-ray inputs
    onto the ray they are close to; other numeric types (mpmath) do the same
    against ``basis``, the w_i evaluated in that type (see
    :meth:`HeckeContext.numeric`).
    """
    x, y = u
    if basis is not None:
        ws = basis
        tol = eps * max(abs(x), abs(y))
    elif isinstance(x, (float, np.floating)) or isinstance(y, (float, np.floating)):
        x, y = float(x), float(y)
        ws = ctx.wf
        tol = eps * max(abs(x), abs(y))
    else:
        ws = ctx.w
        tol = 0
    if not (x > tol and y >= -tol):
        raise ClassificationError(f"{u} is not in the first quadrant x > 0, y >= 0")
    # w_i ^ u is the coefficient of w_{i+1}, u ^ w_{i+1} that of w_i; the w_i
    # are ordered by angle, so search for the last i with w_i ^ u >= 0
    lo, hi = 0, ctx.q - 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if wedge(ws[mid], (x, y)) >= -tol:
            lo = mid
        else:
            hi = mid - 1
    i = lo
    if not (wedge((x, y), ws[i + 1]) > tol):
        raise ClassificationError(f"{u} lies on the excluded ray of w_{{q-1}} = (0, 1)")
    return i


def sector_batch(ctx: HeckeContext, x: np.ndarray, y: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Vectorized :func:`sector_of` for float arrays; -1 marks unclassifiable points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    tol = eps * np.maximum(np.abs(x), np.abs(y))
    out = np.full(x.shape, -1, dtype=np.int64)
    ok = (x > tol) & (y >= -tol)
    for i in range(ctx.q - 1):
        wi, wj = ctx.wf[i], ctx.wf[i + 1]
        beta = wi[0] * y - x * wi[1]
        alpha = x * wj[1] - wj[0] * y
        out[ok & (beta >= -tol) & (alpha > tol) & (out < 0)] = i
    return out


# -- the orbit Lambda_q -----------------------------------------------------------


def _companion(poly: tuple[int, ...]) -> np.ndarray:
    """Integer matrix of multiplication by lambda in the power basis."""
    d = len(poly) - 1
    C = np.zeros((d, d), dtype=np.int64)
    for k in range(d - 1):
        C[k + 1, k] = 1
    for j in range(d):
        C[j, d - 1] = -poly[j]
    return C


@lru_cache(maxsize=32)
def _orbit_coefficients(q: int, norm_bound: float, word_bound: int | None) -> tuple[np.ndarray, np.ndarray]:
    """Integer coefficient rows (x_0..x_{d-1}, y_0..y_{d-1}) of Lambda_q within the box.

    Breadth-first search over S^{+-1}, T_q^{+-1} from (1, 0), discarding points
    whose sup-norm exceeds ``norm_bound``.  Without a word bound the search runs
    to closure; reduction by T_q^{+-1} and S never increases the sup-norm, so
    every orbit point in the box is reached through points in the box.
    """
    ctx = make_context(q)
    d = ctx.field.degree
    C = _companion(ctx.field.poly)
    powers = np.array(ctx.field._powers) if d > 1 else np.array([1.0])
    start = np.zeros((1, 2 * d), dtype=np.int64)
    start[0, 0] = 1
    seen = {tuple(start[0])}
    rows = [start]
    frontier = start
    depth = 0
    limit = norm_bound * (1 + 1e-9) + 1e-9
    while len(frontier) and (word_bound is None or depth < word_bound):
        X, Y = frontier[:, :d], frontier[:, d:]
        lamY = Y @ C.T
        cand = np.vstack([
            np.hstack([-Y, X]),
            np.hstack([Y, -X]),
            np.hstack([X + lamY, Y]),
            np.hstack([X - lamY, Y]),
        ])
        if np.abs(cand).max() > 2**52:
            raise OverflowError("coefficient growth exceeded int64 safety margin")
        fx = cand[:, :d] @ powers
        fy = cand[:, d:] @ powers
        cand = cand[np.maximum(np.abs(fx), np.abs(fy)) <= limit]
        new = []
        for row in map(tuple, cand.tolist()):
            if row not in seen:
                seen.add(row)
                new.append(row)
        frontier = np.array(new, dtype=np.int64).reshape(-1, 2 * d)
        rows.append(frontier)
        depth += 1
    coeffs = np.vstack(rows)
    pts = np.column_stack([coeffs[:, :d] @ powers, coeffs[:, d:] @ powers])
    coeffs.setflags(write=False)
    pts.setflags(write=False)
    return coeffs, pts


def lambda_points(ctx: HeckeContext, norm_bound: float, word_bound: int | None = None) -> np.ndarray:
    """Float coordinates (n, 2) of enumerated Lambda_q points; read-only."""
    return _orbit_coefficients(ctx.q, float(norm_bound), word_bound)[1]


def enumerate_lambda_q(ctx: HeckeContext, norm_bound: float, word_bound: int | None = None) -> set[Vec2]:
    """Exact points of Lambda_q with sup-norm <= norm_bound.

    With ``word_bound`` set, only points reachable by generator words of at
    most that length (through points inside the box) are returned, which can
    be incomplete.
    """
    if norm_bound <= 0:
        raise DomainError("norm_bound must be positive")
    coeffs, _ = _orbit_coefficients(ctx.q, float(norm_bound), word_bound)
    d = ctx.field.degree
    K = ctx.field
    return {Vec2(K(list(r[:d])), K(list(r[d:]))) for r in coeffs.tolist()}


# -- identity suite ------------------------------------------------------------------


def identity_suite(ctx: HeckeContext) -> dict[str, bool]:
    """Exact algebraic identities satisfied by the w_i and M_i."""
    q, lam, w, M = ctx.q, ctx.lam, ctx.w, ctx.M
    one = ctx.field.one
    e0 = Vec2(one, ctx.field.zero)
    checks = {
        "construction w_i = U^i (1,0), M_i = U^i T = [w_i w_{i+1}]": (
            all(ctx.U.power(i) @ e0 == w[i] for i in range(q))
            and all(
                M[i] == ctx.U.power(i) @ ctx.T and M[i].col(0) == w[i] and M[i].col(1) == w[i + 1]
                for i in range(q - 1)
            )
        ),
        "ellipse x^2 - lam x y + y^2 = 1": all(v.x * v.x - lam * v.x * v.y + v.y * v.y == 1 for v in w),
        "unimodular neighbours w_i ^ w_{i+1} = 1, w_0 ^ w_{q-1} = 1": (
            all(wedge(w[i], w[i + 1]) == 1 for i in range(q - 1)) and wedge(w[0], w[q - 1]) == 1
        ),
        "transpose symmetry M_i^T = M_{q-2-i}": all(M[i].T == M[q - 2 - i] for i in range(q - 1)),
        "U^q = -I": ctx.U.power(q) == -Mat2.identity(one),
        "det = 1 for S, T, U, M_i": all(m.det() == 1 for m in (ctx.S, ctx.T, ctx.U, *M)),
    }
    return checks


def quadratic_form(ctx: HeckeContext, v) -> Any:
    return v[0] * v[0] - ctx.lam * v[0] * v[1] + v[1] * v[1]


__all__ = [
    "HeckeContext",
    "make_context",
    "sector_of",
    "sector_batch",
    "lambda_points",
    "enumerate_lambda_q",
    "identity_suite",
    "quadratic_form",
    "dot",
]
