"""The lambda_q-continued fraction algorithm on the first quadrant.

A step replaces u in the sector Sigma_i by M_i^{-1} u.  Vectors on the ray
y = 0 are fixed; a vector reaches that ray exactly when it is parallel to a
point of Lambda_q.

Three arithmetic modes share the code: exact (field elements, fractions or
ints), float, and mpmath (any other scalar supporting the numeric protocol).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import mpmath
import numpy as np

from . import _mpfast
from .algebra import EPS, Vec2
from .errors import FixedPointError
from .hecke import HeckeContext, sector_of


@dataclass(frozen=True)
class CfStep:
    input: Vec2
    sector: int
    output: Vec2


@dataclass(frozen=True)
class Itinerary:
    steps: tuple[int, ...]
    terminated: bool
    final: Vec2 | None = None

    def __len__(self) -> int:
        return len(self.steps)


def _mode(u) -> str:
    x, y = u
    if isinstance(x, (float, np.floating)) or isinstance(y, (float, np.floating)):
        return "float"
    if isinstance(x, mpmath.mpf) or isinstance(y, mpmath.mpf):
        return "mp"
    return "exact"


@lru_cache(maxsize=64)
def _mp_data(q: int, prec: int):
    from .hecke import make_context

    ctx = make_context(q)
    with mpmath.workprec(prec):
        ws, minv = ctx.numeric(ctx.field.lambda_mp())
        return tuple(ws), tuple((m.a11, m.a12, m.a21, m.a22) for m in minv)


@lru_cache(maxsize=64)
def _fast_data(q: int, prec: int):
    ws, minv = _mp_data(q, prec)
    with _mpfast.context(prec):
        conv = lambda t: tuple(_mpfast.to_fast(c) for c in t)
        return tuple(conv(w) for w in ws), tuple(conv(m) for m in minv)


class _Stepper:
    """Per-mode data: the w_i used for classification and the inverse matrices."""

    def __init__(self, ctx: HeckeContext, mode: str, eps: float):
        self.ctx = ctx
        self.mode = mode
        self.eps = eps
        if mode == "exact":
            self.basis = None
            self.minv = [m.adjugate() for m in ctx.M]
        elif mode == "float":
            self.basis = None
            self.minv = [(m[1][1], -m[0][1], -m[1][0], m[0][0]) for m in ctx.Mf.tolist()]
        elif mode == "fast":
            self.basis, self.minv = _fast_data(ctx.q, mpmath.mp.prec)
        else:
            self.basis, self.minv = _mp_data(ctx.q, mpmath.mp.prec)

    def is_terminal(self, u) -> bool:
        x, y = u
        if self.mode == "exact":
            return y == 0 and x > 0
        return x > 0 and abs(y) <= self.eps * abs(x)

    def step(self, u) -> CfStep:
        if self.is_terminal(u):
            raise FixedPointError(f"{u} lies on the ray y = 0 and is fixed by the algorithm")
        i, v = self.advance(u)
        return CfStep(Vec2(*u), i, v)

    def advance(self, u) -> tuple[int, Vec2]:
        """(sector, M_i^{-1} u) for a non-terminal u."""
        i = sector_of(self.ctx, u, self.eps, basis=self.basis)
        a11, a12, a21, a22 = self.minv[i]
        x, y = u
        nx, ny = a11 * x + a12 * y, a21 * x + a22 * y
        if self.mode != "exact":
            # M_i^{-1} sends the w_i ray to y = 0 exactly; clamp rounding noise
            if nx < 0 and -nx < self.eps * abs(ny):
                nx = 0 * nx
            if ny < 0 and -ny < self.eps * abs(nx):
                ny = 0 * ny
        return i, Vec2(nx, ny)


def cf_step(ctx: HeckeContext, u, eps: float = EPS) -> CfStep:
    """One application of the algorithm; raises FixedPointError on the ray y = 0."""
    return _Stepper(ctx, _mode(u), eps).step(u)


def cf_itinerary(ctx: HeckeContext, u, max_steps: int = 1000, eps: float = EPS) -> Itinerary:
    """Sector sequence of u until it lands on y = 0 or ``max_steps`` are taken."""
    mode = _mode(u)
    if mode == "mp" and _mpfast.active():
        # same bits as the mpmath loop, computed on MPFR numbers
        with _mpfast.context(mpmath.mp.prec):
            u = Vec2(*(_mpfast.to_fast(c) for c in u))
            it = _itinerary(_Stepper(ctx, "fast", _mpfast.to_fast(eps)), u, max_steps)
            final = Vec2(*(_mpfast.to_mp(c) for c in it.final))
        return Itinerary(it.steps, it.terminated, final)
    return _itinerary(_Stepper(ctx, mode, eps), Vec2(*u), max_steps)


def _itinerary(st: _Stepper, u: Vec2, max_steps: int) -> Itinerary:
    steps = []
    for _ in range(max_steps):
        if st.is_terminal(u):
            return Itinerary(tuple(steps), True, u)
        i, u = st.advance(u)
        steps.append(i)
    return Itinerary(tuple(steps), st.is_terminal(u), u)


def cf_itinerary_mp(ctx: HeckeContext, u: tuple[Any, Any], max_steps: int, prec: int) -> Itinerary:
    """Itinerary computed in mpmath at ``prec`` bits.

    Coordinates may be zero-argument callables, evaluated at the working
    precision (e.g. ``lambda: mpmath.sqrt(2)``).  The termination tolerance is
    2^(-prec/2) relative.
    """
    with mpmath.workprec(prec):
        x, y = (mpmath.mpf(c() if callable(c) else c) for c in u)
        eps = mpmath.mpf(2) ** (-(prec // 2))
        return cf_itinerary(ctx, (x, y), max_steps, eps)
