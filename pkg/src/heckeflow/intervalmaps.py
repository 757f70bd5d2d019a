"""The symmetric G_q-Farey and G_q-Gauss interval maps and their natural extensions.

The Farey map F acts on (0, 1] through the projectivization a <-> (a, 1-a):
on I_i = (e_{i+1}, e_i], e_i = x_i/(x_i + y_i), it is the Moebius branch
induced by M_i^{-1}.  The natural extension acts on the side set S; the Gauss
map G accelerates F through the parabolic branches I_0 and I_{q-2}.

Scalar functions are generic: floats, mpmath numbers and exact inputs
(ints, fractions, field elements) are all accepted and keep their type.
Orbit-scale work goes through :mod:`heckeflow._kernels`.
"""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate

from . import _kernels, _mpfast
from .algebra import EPS
from .cfrac import Itinerary
from .errors import DomainError, FixedPointError
from .hecke import HeckeContext
from .suspension import R_side, branch_of, in_S, s_top, side_map_V_to_H

# literal iteration of the parabolic branches is used up to this many steps
LITERAL_LIMIT = 10_000


# -- typed group data ------------------------------------------------------------


@lru_cache(maxsize=64)
def _mp_coords(q: int, prec: int):
    from .hecke import make_context

    ctx = make_context(q)
    with mpmath.workprec(prec):
        ws, _ = ctx.numeric(ctx.field.lambda_mp())
        return tuple(ws), ctx.field.lambda_mp()


def _coords(ctx: HeckeContext, a):
    """(x_i, y_i) for i = 0..q and lambda, in the arithmetic type of ``a``."""
    if isinstance(a, (float, np.floating)):
        return [tuple(r) for r in ctx.wf.tolist()], ctx.lam_float
    if isinstance(a, mpmath.mpf):
        return _mp_coords(ctx.q, mpmath.mp.prec)
    return [tuple(ctx.w_exact(i)) for i in range(ctx.q + 1)], ctx.lam


def _check_unit(a) -> None:
    if not (0 < a <= 1):
        raise DomainError(f"a = {a} outside (0, 1]")


def branch(ctx: HeckeContext, a) -> int:
    """Farey branch index i with a in I_i (right-closed).

    Exact and mpmath inputs are classified exactly; floats within EPS above
    an end point are snapped onto it.
    """
    _check_unit(a)
    if isinstance(a, (float, np.floating)):
        return branch_of(ctx, float(a))
    ws, _ = _coords(ctx, a)
    for i in range(ctx.q - 1):
        x, y = ws[i + 1]
        # a > x/(x+y)  <=>  a (x + y) > x
        if a * (x + y) > x:
            return i
    raise DomainError(f"a = {a} in no branch")  # pragma: no cover


def branch_batch(ctx: HeckeContext, a: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Vectorized float :func:`branch`."""
    asc = ctx.ends[::-1] + eps
    k = np.searchsorted(asc, np.asarray(a, dtype=float), side="left")
    return (ctx.q - 1 - k).astype(np.int64)


@dataclass(frozen=True)
class FareyBranch:
    """One full branch: interval (lo, hi] and Moebius coefficients F(a) = (p a + r)/(s a + t)."""

    i: int
    lo: float
    hi: float
    coeffs: tuple


def farey_branches(ctx: HeckeContext) -> list[FareyBranch]:
    out = []
    for i in range(ctx.q - 1):
        (xi, yi), (xj, yj) = ctx.w[i], ctx.w[i + 1]
        out.append(FareyBranch(i, float(ctx.ends[i + 1]), float(ctx.ends[i]), (xj + yj, -xj, xj - yi, xi - xj)))
    return out


# -- Farey map -------------------------------------------------------------------


def rho_i(ctx: HeckeContext, i: int, a):
    ws, _ = _coords(ctx, a)
    (xi, yi), (xj, _) = ws[i], ws[i + 1]
    return (xj - yi) * a + (xi - xj)


def farey(ctx: HeckeContext, a):
    """F(a) = ((x_{i+1} + y_{i+1}) a - x_{i+1}) / rho_i(a) on I_i."""
    i = branch(ctx, a)
    if a == 1:
        return a
    return _farey_on(ctx, i, a)


def _farey_on(ctx: HeckeContext, i: int, a):
    ws, _ = _coords(ctx, a)
    xj, yj = ws[i + 1]
    out = ((xj + yj) * a - xj) / rho_i(ctx, i, a)
    if isinstance(out, float) and out > 1.0:
        out = 1.0
    return out


def farey_derivative(ctx: HeckeContext, a, eps: float = EPS, with_flag: bool = False):
    """F'(a) = 1/rho_i(a)^2.

    At a branch end point (within ``eps``) the value is the one-sided limit
    from inside I_i; ``with_flag`` returns (value, at_endpoint).
    """
    i = branch(ctx, a)
    r = rho_i(ctx, i, a)
    val = 1 / (r * r)
    if not with_flag:
        return val
    e = ctx.ends
    af = float(a)
    return val, bool(abs(af - e[i]) <= eps or abs(af - e[i + 1]) <= eps)


def inverse_branch(ctx: HeckeContext, i: int, x):
    """The a in I_i with F(a) = x, for x in (0, 1]."""
    _check_unit(x)
    if not 0 <= i <= ctx.q - 2:
        raise DomainError(f"branch index {i} out of range")
    ws, _ = _coords(ctx, x)
    (xi, yi), (xj, yj) = ws[i], ws[i + 1]
    a = (xj + x * (xi - xj)) / ((xj + yj) - x * (xj - yi))
    if isinstance(a, float):
        # rounding may push the image of x = 1 just past the right end e_i
        a = min(a, float(ctx.ends[i]))
    return a


def farey_density(a):
    """Infinite invariant density 1/(a(1-a)) of the Farey map."""
    return 1 / (a * (1 - a))


def transfer_terms(ctx: HeckeContext, x, density=farey_density) -> list:
    """The terms density(a_i)/F'(a_i) over the q-1 preimages a_i of x."""
    terms = []
    for i in range(ctx.q - 1):
        a = inverse_branch(ctx, i, x)
        r = rho_i(ctx, i, a)
        terms.append(density(a) * r * r)
    return terms


def farey_transfer_check(ctx: HeckeContext, xs, density=farey_density) -> float:
    """max_x |sum_i density(a_i)/F'(a_i) - density(x)| (relative to density(x) when > 1)."""
    worst = 0.0
    for x in xs:
        d = density(x)
        res = abs(sum(transfer_terms(ctx, x, density)) - d)
        worst = max(worst, float(res / max(1, abs(d))))
    return worst


# -- natural extension of the Farey map ---------------------------------------------


def farey_ext_step(ctx: HeckeContext, point, eps: float = EPS) -> tuple[float, float]:
    """One step of the extended Farey map on S (matrix reference path)."""
    a, s = float(point[0]), float(point[1])
    if not in_S(ctx, a, s, eps):
        raise DomainError(f"({a}, {s}) is not in S")
    return side_map_V_to_H(ctx, (a, s), eps)


def farey_ext_step_fast(ctx: HeckeContext, point) -> tuple[float, float, int]:
    """Closed form a' = F(a), s' = s rho^2 + x_{i+1} rho/(a a'); returns (a', s', branch)."""
    return _kernels.farey_ext_step(ctx.wf, ctx.ends, float(point[0]), float(point[1]))


def farey_orbit(ctx: HeckeContext, a0: float, n: int, s0: float | None = None):
    """(a, s, branch) arrays for the first n states; s is NaN-free only when s0 is given."""
    ext = s0 is not None
    av, sv, br, m = _kernels.farey_orbit(ctx.wf, ctx.ends, float(a0), float(s0 or 0.0), int(n), ext)
    return av[:m], (sv[:m] if ext else None), br[:m]


# -- Gauss map -------------------------------------------------------------------


def n_accel(ctx: HeckeContext, a: float) -> int:
    """Closed-form step count of the Gauss map at a float a < 1."""
    _, _, _, n = _kernels.gauss_step(ctx.wf, ctx.ends, ctx.lam_float, float(a), 0.0)
    return int(n)


def gauss(ctx: HeckeContext, a):
    """G(a) and the number n of Farey steps it takes.

    On I_0 and I_{q-2} the Farey map is iterated until the orbit leaves the
    starting interval.  Exact and mpmath inputs are always iterated
    literally; float inputs are iterated literally unless more than
    LITERAL_LIMIT steps are needed, in which case the closed form of the
    parabolic branch is used.  a = 1 is the indifferent fixed point.
    """
    _check_unit(a)
    if a == 1:
        raise FixedPointError("a = 1 is an indifferent fixed point; the acceleration count is undefined")
    i = branch(ctx, a)
    if i not in (0, ctx.q - 2):
        return farey(ctx, a), 1
    if isinstance(a, (float, np.floating)):
        n = n_accel(ctx, a)
        if n > LITERAL_LIMIT:
            a2, _, _, n = _kernels.gauss_step(ctx.wf, ctx.ends, ctx.lam_float, float(a), 0.0)
            return a2, n
    x, n = a, 0
    while True:
        x = farey(ctx, x)
        n += 1
        if branch(ctx, x) != i:
            return x, n


def in_R(ctx: HeckeContext, a: float, s: float, eps: float = EPS) -> bool:
    """Membership in R^q = S minus (H_0 cap V_{q-2}) and (H_{q-2} cap V_0)."""
    if not in_S(ctx, a, s, eps):
        return False
    i = branch_of(ctx, a)
    if i == ctx.q - 2 and s < R_side(ctx, 1, a):
        return False
    if i == 0 and s >= R_side(ctx, ctx.q - 2, a):
        return False
    return True


def gauss_ext_step(ctx: HeckeContext, point, eps: float = EPS, strict: bool = False) -> tuple[float, float, int]:
    """Extended Gauss map; returns (a', s', n).

    Iterates the reference extended Farey step n times with n from
    :func:`gauss`; beyond LITERAL_LIMIT steps the closed form is used.  The
    map leaves R^q invariant; the formula itself is defined on all of S, and
    points of S outside R^q are accepted unless ``strict`` is set.
    """
    a, s = float(point[0]), float(point[1])
    if not in_S(ctx, a, s, eps):
        raise DomainError(f"({a}, {s}) is not in S")
    if strict and not in_R(ctx, a, s, eps):
        raise DomainError(f"({a}, {s}) is not in R^{ctx.q}")
    if a >= 1:
        raise FixedPointError("a = 1 is an indifferent fixed point of the Gauss map")
    i = branch_of(ctx, a)
    if i in (0, ctx.q - 2):
        n = n_accel(ctx, a)
        if n > LITERAL_LIMIT:
            a2, s2, _, n = _kernels.gauss_step(ctx.wf, ctx.ends, ctx.lam_float, a, s)
            return a2, s2, n
    else:
        n = 1
    x, t = a, s
    for _ in range(n):
        x, t = side_map_V_to_H(ctx, (x, t), eps=1e-9)
    return x, t, n


def gauss_orbit(ctx: HeckeContext, a0: float, s0: float, n: int):
    """First n states of the extended Gauss orbit: (a, s, branch, nsteps) arrays.

    A final record with nsteps 0 marks the fixed point a = 1.
    """
    av, sv, br, ns, m = _kernels.gauss_orbit(ctx.wf, ctx.ends, ctx.lam_float, float(a0), float(s0), int(n))
    return av[:m], sv[:m], br[:m], ns[:m]


def gauss_density(ctx: HeckeContext, a: float) -> float:
    """Invariant density of the Gauss map (unnormalized)."""
    if not 0 < a < 1:
        raise DomainError(f"a = {a} outside (0, 1)")
    lam = ctx.lam_float
    i = branch_of(ctx, a)
    if i == 0:
        return lam / (a * (a + lam * (1 - a)))
    if i == ctx.q - 2:
        return lam / ((1 - a) * ((1 - a) + lam * a))
    return 1 / (a * (1 - a))


def gauss_density_batch(ctx: HeckeContext, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    lam = ctx.lam_float
    br = branch_batch(ctx, a)
    out = 1 / (a * (1 - a))
    m0 = br == 0
    out[m0] = lam / (a[m0] * (a[m0] + lam * (1 - a[m0])))
    m1 = br == ctx.q - 2
    out[m1] = lam / ((1 - a[m1]) * ((1 - a[m1]) + lam * a[m1]))
    return out


def gauss_pieces(ctx: HeckeContext) -> list[tuple[float, float]]:
    """Integration pieces: I_{q-2}, the middle intervals (if any), I_0."""
    e = ctx.ends
    pieces = [(0.0, float(e[ctx.q - 2]))]
    if ctx.q > 3:
        pieces.append((float(e[ctx.q - 2]), float(e[1])))
    pieces.append((float(e[1]), 1.0))
    return pieces


def gauss_mass(ctx: HeckeContext, epsabs: float = 1e-13, epsrel: float = 1e-13, limit: int = 200) -> float:
    """Total mass of the Gauss density by adaptive quadrature on each smooth piece."""
    total = 0.0
    for lo, hi in gauss_pieces(ctx):
        mid = 0.5 * (lo + hi)
        val, _ = integrate.quad(lambda t: gauss_density(ctx, t), lo, hi, points=[mid], epsabs=epsabs, epsrel=epsrel, limit=limit)
        total += val
    return total


def gauss_piece_integrals(ctx: HeckeContext, order: int) -> list[float]:
    """Fixed-order Gauss-Legendre integrals of the density over each piece."""
    x, wts = np.polynomial.legendre.leggauss(order)
    out = []
    for lo, hi in gauss_pieces(ctx):
        t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        # evaluate strictly inside the piece so the case split is unambiguous
        out.append(float(0.5 * (hi - lo) * np.dot(wts, gauss_density_batch(ctx, t))))
    return out


def gauss_cdf(ctx: HeckeContext, a):
    """Unnormalized distribution function int_0^a of the Gauss density (closed form)."""
    lam = ctx.lam_float
    a = np.asarray(a, dtype=float)
    e1, el = float(ctx.ends[1]), float(ctx.ends[ctx.q - 2])

    def low(t):  # int_0^t lam/((1-u)(1-u+lam u)) du
        return np.log((1 + (lam - 1) * t) / (1 - t)) if lam != 1 else -np.log(1 - t)

    def mid(t):
        return np.log(t / (1 - t))

    def high(t):  # int lam/(u(u + lam(1-u))) du = ln u - ln(lam + (1-lam) u)
        return np.log(t) - np.log(lam + (1 - lam) * t)

    t1 = np.minimum(a, el)
    out = low(t1)
    if ctx.q > 3:
        t2 = np.clip(a, el, e1)
        out = out + mid(t2) - mid(el)
    t3 = np.clip(a, e1, 1.0)
    out = out + high(t3) - high(e1)
    return out


def acceleration_cells(ctx: HeckeContext, which: int, n_max: int) -> np.ndarray:
    """End points (lo, hi] of the cells I_{which,n}, n = 1..n_max, on which the count is n.

    For which = 0 the cells increase to 1; for which = q-2 they decrease to 0.
    """
    lam = ctx.lam_float
    n = np.arange(1, n_max + 1, dtype=float)
    if which == 0:
        # n_0(a) = n  <=>  u = 1/(1-a) in (1 + n lam, 1 + (n+1) lam]
        return np.column_stack([1 - 1 / (1 + n * lam), 1 - 1 / (1 + (n + 1) * lam)])
    if which == ctx.q - 2:
        # n_{q-2}(a) = n  <=>  v = 1/a in [1 + n lam, 1 + (n+1) lam)
        return np.column_stack([1 / (1 + (n + 1) * lam), 1 / (1 + n * lam)])
    raise DomainError("acceleration cells exist for branches 0 and q-2 only")


def gauss_transfer_check(ctx: HeckeContext, xs, n_max: int = 100_000) -> float:
    """Relative residual of the Gauss transfer operator on its density, truncated at n_max cells.

    Inverse branches: the middle Farey branches, and F_0^{-n}, F_{q-2}^{-n}
    (n >= 1), which act as u -> u + n lam on u = 1/(1-a) and v -> v + n lam
    on v = 1/a.  The neglected tail is O(1/n_max).
    """
    lam = ctx.lam_float
    n = np.arange(1, n_max + 1, dtype=float)
    worst = 0.0
    for x in xs:
        x = float(x)
        total = 0.0
        bx = branch_of(ctx, x)
        for i in range(1, ctx.q - 2):
            a = inverse_branch(ctx, i, x)
            r = rho_i(ctx, i, a)
            total += gauss_density(ctx, a) * r * r
        if bx != 0:
            u = 1 / (1 - x) + n * lam
            an = 1 - 1 / u
            dn = 1 / u
            total += float(np.sum(gauss_density_batch(ctx, an) * (dn * (1 / (1 - x))) ** 2))
        if bx != ctx.q - 2:
            v = 1 / x + n * lam
            an = 1 / v
            total += float(np.sum(gauss_density_batch(ctx, an) * (an * (1 / x)) ** 2))
        d = gauss_density(ctx, x)
        worst = max(worst, abs(total - d) / d)
    return worst


# -- statistics and coding -------------------------------------------------------


@dataclass
class Histogram:
    counts: np.ndarray
    edges: np.ndarray
    n_iter: int
    truncated: bool
    density: np.ndarray  # empirical density per bin
    expected: np.ndarray | None = None  # normalized invariant density, bin averages
    admissible: np.ndarray | None = None
    sup_distance: float | None = None


def birkhoff_histogram(ctx: HeckeContext, kind: str, a0: float, n_iter: int, n_bins: int, min_expected: float = 100.0) -> Histogram:
    """Visit histogram of a single orbit on (0, 1].

    For the Gauss map the histogram is compared, in sup-norm over bins with at
    least ``min_expected`` expected visits, with the normalized invariant
    density averaged over each bin.  The Farey map has an infinite invariant
    measure, so no comparison is made there.
    """
    if kind == "gauss":
        av, m = _kernels.gauss_values(ctx.wf, ctx.ends, ctx.lam_float, float(a0), int(n_iter))
        vals = av[:m]
    elif kind == "farey":
        av, _, _, m = _kernels.farey_orbit(ctx.wf, ctx.ends, float(a0), 0.0, int(n_iter), False)
        vals = av[:m]
    else:
        raise DomainError(f"unknown map kind {kind!r}")
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    width = np.diff(edges)
    dens = counts / (max(m, 1) * width)
    hist = Histogram(counts, edges, int(m), m < n_iter, dens)
    if kind == "gauss":
        cdf = gauss_cdf(ctx, edges)
        mass = cdf[-1]
        prob = np.diff(cdf) / mass
        hist.expected = prob / width
        hist.admissible = prob * m >= min_expected
        if hist.admissible.any():
            hist.sup_distance = float(np.max(np.abs(dens - hist.expected)[hist.admissible]))
    return hist


def geodesic_code(ctx: HeckeContext, point, n: int) -> Itinerary:
    """Branch indices of the first n iterates of (a, s) under the extended Farey map.

    Symbols depend on a only, so a is iterated in its own arithmetic type
    (float, mpmath or exact).  The orbit of a vector parallel to Lambda_q
    reaches the fixed point a = 1; its symbol 0 is emitted and the sequence
    stops there with ``terminated`` set.
    """
    a, s = point
    if not in_S(ctx, float(a), float(s)):
        raise DomainError(f"({a}, {s}) is not in S")
    _check_unit(a)
    if isinstance(a, (float, np.floating)):
        a = float(a)

        def which(x):
            return branch_of(ctx, x)

        def step(x, i):
            return _farey_on(ctx, i, x)

        return _code_loop(which, step, a, n)
    # branch tests a (x_{i+1} + y_{i+1}) > x_{i+1} and Moebius coefficients,
    # in the arithmetic type of a (exact comparisons for exact and mp input)
    ws, _ = _coords(ctx, a)
    fast = isinstance(a, mpmath.mpf) and _mpfast.active()
    with _mpfast.context(mpmath.mp.prec) if fast else nullcontext():
        if fast:
            # same bits as mpmath, computed on MPFR numbers
            ws = [tuple(_mpfast.to_fast(c) for c in w) for w in ws]
            a = _mpfast.to_fast(a)
        tests = [(xj + yj, xj) for xj, yj in ws[1 : ctx.q]]
        mob = [(xj + yj, xj, xj - yi, xi - xj) for (xi, yi), (xj, yj) in zip(ws, ws[1:])]

        def which(x):
            for i, (d, c) in enumerate(tests):
                if x * d > c:
                    return i
            raise DomainError(f"a = {x} in no branch")  # pragma: no cover

        def step(x, i):
            p, r, u, v = mob[i]
            return (p * x - r) / (u * x + v)

        return _code_loop(which, step, a, n)


def _code_loop(which, step, a, n: int) -> Itinerary:
    out = []
    for _ in range(n):
        i = which(a)
        out.append(i)
        if a == 1:
            return Itinerary(tuple(out), True)
        a = step(a, i)
        if not 0 < a <= 1:
            return Itinerary(tuple(out), True)
    return Itinerary(tuple(out), False)


__all__ = [
    "branch",
    "branch_batch",
    "FareyBranch",
    "farey_branches",
    "rho_i",
    "farey",
    "farey_derivative",
    "inverse_branch",
    "farey_density",
    "transfer_terms",
    "farey_transfer_check",
    "farey_ext_step",
    "farey_ext_step_fast",
    "farey_orbit",
    "n_accel",
    "gauss",
    "in_R",
    "gauss_ext_step",
    "gauss_orbit",
    "gauss_density",
    "gauss_density_batch",
    "gauss_pieces",
    "gauss_mass",
    "gauss_piece_integrals",
    "gauss_cdf",
    "acceleration_cells",
    "gauss_transfer_check",
    "Histogram",
    "birkhoff_histogram",
    "geodesic_code",
    "s_top",
]
