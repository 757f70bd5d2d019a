"""The G_q-Farey triangle, its partition, the roof function and the BCZ map.

The triangle is T^q = {0 < a <= 1, 1 - lam a < b <= 1}.  A point (a, b)
stands for the lattice g_{a,b} Lambda_q with g_{a,b} = [[a, b], [0, 1/a]];
the BCZ map is the first return of the horocycle flow h_s = [[1, 0], [-s, 1]]
to the set of lattices with a horizontal vector of length at most 1.

:func:`first_return_oracle` recomputes the return directly from an
enumeration of Lambda_q and serves as an independent check of the closed
formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._accel import using_jit
from .algebra import EPS
from .errors import BoundsExhausted, ConsistencyError, DomainError
from .hecke import HeckeContext, lambda_points


@dataclass(frozen=True)
class TrianglePoint:
    a: float
    b: float

    def __iter__(self):
        return iter((self.a, self.b))


@dataclass(frozen=True)
class Strip:
    """S_tau = {0 < x <= tau}."""

    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError("tau must be positive")

    def contains(self, x: float) -> bool:
        return 0 < x <= self.tau


def in_triangle(ctx: HeckeContext, a: float, b: float, eps: float = EPS) -> bool:
    return 0 < a <= 1 + eps and 1 - ctx.lam_float * a < b + eps and b <= 1 + eps


def _check(ctx: HeckeContext, p, eps: float) -> tuple[float, float]:
    a, b = float(p[0]), float(p[1])
    if not in_triangle(ctx, a, b, eps):
        raise DomainError(f"({a}, {b}) is not in the Farey triangle for q={ctx.q}")
    return a, b


def dots(ctx: HeckeContext, a: float, b: float) -> np.ndarray:
    """(a, b) . w_j for j = 0..q."""
    return a * ctx.wf[:, 0] + b * ctx.wf[:, 1]


def partition_index(ctx: HeckeContext, p, eps: float = EPS) -> int:
    """The i in {2, ..., q-1} with (a,b).w_{i-1} > 1 >= (a,b).w_i."""
    a, b = _check(ctx, p, eps)
    d = dots(ctx, a, b)
    for j in range(2, ctx.q):
        if d[j] <= 1 + eps:
            return j
    return ctx.q - 1


def roof_i(ctx: HeckeContext, i: int, a: float, b: float) -> float:
    """R_{q,i}(a, b) = y_i / (a (a,b).w_i), for any i in 0..q-1."""
    return ctx.wf[i, 1] / (a * (a * ctx.wf[i, 0] + b * ctx.wf[i, 1]))


def roof(ctx: HeckeContext, p, eps: float = EPS) -> float:
    a, b = _check(ctx, p, eps)
    return roof_i(ctx, partition_index(ctx, p, eps), a, b)


def bcz_map(ctx: HeckeContext, p, eps: float = EPS) -> TrianglePoint:
    """BCZ(a,b) = ((a,b).w_i, (a,b).w_{i+1} + k lam (a,b).w_i) with w_q = -w_0."""
    a, b = _check(ctx, p, eps)
    i = partition_index(ctx, p, eps)
    d = dots(ctx, a, b)
    lam = ctx.lam_float
    k = math.floor((1.0 - d[i + 1]) / (lam * d[i]))
    out = TrianglePoint(float(d[i]), float(d[i + 1] + k * lam * d[i]))
    if not in_triangle(ctx, out.a, out.b, eps):
        raise ConsistencyError(f"BCZ image {out} of {(a, b)} left the triangle")
    return out


def bcz_batch(ctx: HeckeContext, a, b, eps: float = EPS):
    """Vectorized BCZ map: returns (a', b', index, roof) arrays."""
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if using_jit():
        return _kernels.bcz_batch_loop(ctx.wf, ctx.lam_float, a, b, eps)
    return _kernels.bcz_batch_numpy(ctx.wf, ctx.lam_float, a, b, eps)


def bcz_orbit(ctx: HeckeContext, p, n: int, eps: float = EPS):
    """States 0..n-1 of the BCZ orbit: (a, b, index, roof) arrays."""
    a, b = _check(ctx, p, eps)
    return _kernels.bcz_orbit(ctx.wf, ctx.lam_float, a, b, int(n), eps)


def sample_triangle(ctx: HeckeContext, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform samples from T^q by rejection from [0,1] x [1-lam, 1]."""
    lam = ctx.lam_float
    out_a, out_b, have = [], [], 0
    while have < n:
        m = 2 * (n - have) + 16
        a = 1.0 - rng.random(m)  # (0, 1]
        b = 1.0 - lam * rng.random(m)
        keep = b > 1 - lam * a
        out_a.append(a[keep])
        out_b.append(b[keep])
        have += int(keep.sum())
    return np.concatenate(out_a)[:n], np.concatenate(out_b)[:n]


# -- brute-force oracle -----------------------------------------------------------


def _bound_ladder(required: float) -> float:
    # round up to a power of two so repeated calls share one cached enumeration
    return float(2 ** max(2, math.ceil(math.log2(required))))


def first_return_oracle(
    ctx: HeckeContext,
    p,
    norm_bound: float | None = None,
    word_bound: int | None = None,
    expand: bool = False,
    eps: float = EPS,
) -> tuple[float, TrianglePoint]:
    """First return time and next point, computed from enumerated Lambda_q.

    Among vectors (X, Y) = g_{a,b} v, v in Lambda_q, with 0 < X <= 1 and
    Y > 0, the least slope Y/X is the return time R; the new point is
    a' = X of that vector, and b' is read off the height-1/a' row of the
    sheared lattice h_R g_{a,b} Lambda_q, reduced modulo lam a' into
    (1 - lam a', 1].

    A vector with slope <= R and 0 < X <= 1 has |y| <= aR and
    |x| <= (1 + |b| a R)/a, so the minimum is certified once the enumeration
    box covers that; the b' row only needs one enumerated member.  Otherwise
    BoundsExhausted is raised (or, with ``expand``, the box is enlarged and the
    search repeated).
    """
    a, b = _check(ctx, p, eps)
    bound = float(norm_bound) if norm_bound is not None else 4.0 * max(1.0, 1.0 / a)
    lam = ctx.lam_float
    while True:
        pts = lambda_points(ctx, bound, word_bound)
        X = a * pts[:, 0] + b * pts[:, 1]
        Y = pts[:, 1] / a
        cand = (X > 0) & (X <= 1 + eps) & (Y > 0)
        required = None
        if cand.any():
            slopes = np.where(cand, Y / np.where(cand, X, 1.0), np.inf)
            j = int(np.argmin(slopes))
            R = float(slopes[j])
            a2 = float(X[j])
            need = max(a * R, (1 + abs(b) * a * R) / a)
            if need <= bound * (1 - 1e-12):
                H = Y - R * X
                row = np.abs(H - 1 / a2) <= 1e-9 * max(1.0, 1 / a2)
                if row.any():
                    xs = X[row]
                    bs = xs - lam * a2 * np.ceil((xs - 1) / (lam * a2) - 1e-12)
                    if np.ptp(bs) > 1e-9:
                        raise ConsistencyError(f"height-1/a' row is not a single lam a' coset: {bs}")
                    return R, TrianglePoint(a2, float(bs.max()))
                # the preimage of (b', 1/a') has |y| <= a (1/a' + R lam), |x| <= lam/a + |b| |y| / a
                yb = a * (1 / a2 + R * lam)
                need = max(need, yb, lam / a + abs(b) * yb / a, 2 * bound)
            required = need
        else:
            required = 2 * bound
        if not expand or word_bound is not None:
            raise BoundsExhausted(
                f"enumeration box {bound} too small at ({a}, {b}); need sup-norm >= {required:.6g}",
                required=required,
            )
        bound = _bound_ladder(required * 1.01)


def least_slope_vector(ctx: HeckeContext, p, bound: float, eps: float = EPS) -> np.ndarray:
    """The enumerated vector of least positive slope in g_{a,b} Lambda_q inside the strip S_1."""
    a, b = _check(ctx, p, eps)
    pts = lambda_points(ctx, bound)
    X = a * pts[:, 0] + b * pts[:, 1]
    Y = pts[:, 1] / a
    cand = (X > 0) & (X <= 1 + eps) & (Y > 0)
    if not cand.any():
        raise BoundsExhausted(f"no strip vector within box {bound}", required=2 * bound)
    idx = np.flatnonzero(cand)
    j = idx[np.argmin(Y[idx] / X[idx])]
    return np.array([X[j], Y[j]])


__all__ = [
    "TrianglePoint",
    "Strip",
    "in_triangle",
    "partition_index",
    "roof",
    "roof_i",
    "bcz_map",
    "bcz_batch",
    "bcz_orbit",
    "sample_triangle",
    "first_return_oracle",
    "least_slope_vector",
]
