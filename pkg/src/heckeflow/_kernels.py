"""Float64 orbit and batch kernels.

Every kernel takes the float group data explicitly (``wf``: rows w_0..w_q,
``ends``: Farey interval end points e_0 = 1 > ... > e_{q-1} = 0, ``lam``) so
that it compiles under numba without Python objects.  The reference
implementations in :mod:`heckeflow.bcz` and :mod:`heckeflow.intervalmaps`
iterate the defining formulas literally; the Gauss kernels instead jump
through the parabolic branches in closed form (see :func:`gauss_step`).
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import jit
from .algebra import EPS

# float points within SNAP of an interval end point e_i are treated as e_i,
# which belongs to I_i (right-closed intervals)
SNAP = EPS

# -- Farey map -------------------------------------------------------------------


@jit
def farey_branch(ends, a):
    """Index i with ends[i+1] < a <= ends[i] (right-closed, snapped by SNAP)."""
    lo = 0
    hi = ends.shape[0] - 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a <= ends[mid] + SNAP:
            lo = mid
        else:
            hi = mid - 1
    return lo


@jit
def farey_step(wf, ends, a):
    """(F(a), branch, rho_i(a)); F(a) is clamped to (0, 1]."""
    i = farey_branch(ends, a)
    xi = wf[i, 0]
    yi = wf[i, 1]
    xj = wf[i + 1, 0]
    yj = wf[i + 1, 1]
    rho = (xj - yi) * a + (xi - xj)
    if i == 0 and a == 1.0:
        return 1.0, 0, 1.0
    a2 = ((xj + yj) * a - xj) / rho
    if a2 > 1.0:
        a2 = 1.0
    return a2, i, rho


@jit
def farey_ext_step(wf, ends, a, s):
    """Natural extension step: a' = F(a), s' = s rho^2 + x_{i+1} rho / (a a')."""
    a2, i, rho = farey_step(wf, ends, a)
    s2 = s * rho * rho + wf[i + 1, 0] * rho / (a2 * a)
    return a2, s2, i


@jit
def farey_orbit(wf, ends, a0, s0, n, ext):
    """States 0..n-1 of the (extended) Farey orbit; returns (a, s, branch, m).

    ``m`` < n means the orbit left (0, 1] through rounding and was truncated.
    """
    av = np.empty(n)
    sv = np.empty(n)
    br = np.empty(n, dtype=np.int64)
    a = a0
    s = s0
    m = 0
    for k in range(n):
        if not (0.0 < a <= 1.0):
            break
        av[k] = a
        sv[k] = s
        br[k] = farey_branch(ends, a)
        m = k + 1
        if ext:
            a, s, _ = farey_ext_step(wf, ends, a, s)
        else:
            a, _, _ = farey_step(wf, ends, a)
    return av, sv, br, m


# -- Gauss map -------------------------------------------------------------------


@jit
def gauss_step(wf, ends, lam, a, s):
    """One step of the accelerated map and its natural extension.

    Returns (a', s', branch, n) where n is the number of Farey steps taken;
    n = 0 flags the indifferent fixed point a = 1.

    On I_0 the Farey branch acts on u = 1/(1 - a) as u -> u - lam, and
    K = s (1-a)^2 - (1-a)/a is invariant, so s_n = K u_n^2 + u_n / a_n.  On
    I_{q-2} it acts on v = 1/a as v -> v - lam with s_n = s (v_n / v)^2.
    """
    if a >= 1.0:
        return 1.0, s, 0, 0
    last = ends.shape[0] - 2
    i = farey_branch(ends, a)
    if i == 0:
        # leave I_0 once a_n <= e_1 + SNAP, i.e. u_n <= 1/(1 - e_1 - SNAP)
        d = 1.0 - a
        u = 1.0 / d
        n = int(math.ceil((u - 1.0 / (1.0 - ends[1] - SNAP)) / lam))
        if n < 1:
            n = 1
        un = u - n * lam
        an = 1.0 - 1.0 / un
        sn = (s * d * d - d / a) * un * un + un / an
        return an, sn, 0, n
    if i == last:
        # leave I_{q-2} once a_n > e_{q-2} + SNAP, i.e. v_n < 1/(e_{q-2} + SNAP)
        v = 1.0 / a
        n = int(math.floor((v - 1.0 / (ends[last] + SNAP)) / lam)) + 1
        if n < 1:
            n = 1
        vn = v - n * lam
        an = 1.0 / vn
        if an > 1.0:
            an = 1.0
        r = vn / v
        return an, s * r * r, i, n
    a2, s2, _ = farey_ext_step(wf, ends, a, s)
    return a2, s2, i, 1


@jit
def gauss_orbit(wf, ends, lam, a0, s0, n):
    """States 0..n-1 of the extended Gauss orbit; returns (a, s, branch, nsteps, m).

    nsteps[k] is the Farey step count used to leave state k.  The orbit stops
    at the fixed point a = 1 (recorded with nsteps 0) or when rounding pushes
    it out of (0, 1].
    """
    av = np.empty(n)
    sv = np.empty(n)
    br = np.empty(n, dtype=np.int64)
    ns = np.empty(n, dtype=np.int64)
    a = a0
    s = s0
    m = 0
    for k in range(n):
        if not (0.0 < a <= 1.0):
            break
        a2, s2, i, steps = gauss_step(wf, ends, lam, a, s)
        av[k] = a
        sv[k] = s
        br[k] = i
        ns[k] = steps
        m = k + 1
        if steps == 0:
            break
        a = a2
        s = s2
    return av, sv, br, ns, m


@jit
def gauss_values(wf, ends, lam, a0, n):
    """First coordinates of the Gauss orbit only (for histograms); returns (a, m)."""
    av = np.empty(n)
    a = a0
    m = 0
    for k in range(n):
        if not (0.0 < a < 1.0):
            break
        av[k] = a
        m = k + 1
        a, _, _, _ = gauss_step(wf, ends, lam, a, 0.0)
    return av, m


# -- BCZ map ---------------------------------------------------------------------


@jit
def bcz_step(wf, lam, a, b, eps):
    """(a', b', index, roof) for (a, b) in the Farey triangle."""
    q = wf.shape[0] - 1
    i = q - 1
    for j in range(2, q):
        if a * wf[j, 0] + b * wf[j, 1] <= 1.0 + eps:
            i = j
            break
    di = a * wf[i, 0] + b * wf[i, 1]
    dj = a * wf[i + 1, 0] + b * wf[i + 1, 1]
    roof = wf[i, 1] / (a * di)
    k = math.floor((1.0 - dj) / (lam * di))
    return di, dj + k * lam * di, i, roof


@jit
def bcz_orbit(wf, lam, a0, b0, n, eps):
    """States 0..n-1 of a BCZ orbit with partition index and roof at each state."""
    av = np.empty(n)
    bv = np.empty(n)
    idx = np.empty(n, dtype=np.int64)
    rf = np.empty(n)
    a = a0
    b = b0
    for k in range(n):
        a2, b2, i, r = bcz_step(wf, lam, a, b, eps)
        av[k] = a
        bv[k] = b
        idx[k] = i
        rf[k] = r
        a = a2
        b = b2
    return av, bv, idx, rf


@jit
def bcz_batch_loop(wf, lam, a, b, eps):
    n = a.shape[0]
    a2 = np.empty(n)
    b2 = np.empty(n)
    idx = np.empty(n, dtype=np.int64)
    rf = np.empty(n)
    for k in range(n):
        a2[k], b2[k], idx[k], rf[k] = bcz_step(wf, lam, a[k], b[k], eps)
    return a2, b2, idx, rf


def bcz_batch_numpy(wf, lam, a, b, eps):
    """Vectorized counterpart of :func:`bcz_batch_loop`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = wf.shape[0] - 1
    idx = np.full(a.shape, q - 1, dtype=np.int64)
    found = np.zeros(a.shape, dtype=bool)
    for j in range(2, q):
        hit = ~found & (a * wf[j, 0] + b * wf[j, 1] <= 1.0 + eps)
        idx[hit] = j
        found |= hit
    wi = wf[idx]
    wj = wf[idx + 1]
    di = a * wi[..., 0] + b * wi[..., 1]
    dj = a * wj[..., 0] + b * wj[..., 1]
    roof = wi[..., 1] / (a * di)
    k = np.floor((1.0 - dj) / (lam * di))
    return di, dj + k * lam * di, idx, roof


# -- continued fraction ----------------------------------------------------------


@jit
def cf_orbit(wf, minv, x, y, n, eps):
    """Float continued fraction; returns (sectors, xs, ys, m, terminated).

    xs/ys hold the input vector of each recorded step.  minv has shape
    (q-1, 2, 2).  Termination is y <= eps * x.
    """
    nsec = minv.shape[0]
    sec = np.empty(n, dtype=np.int64)
    xs = np.empty(n)
    ys = np.empty(n)
    m = 0
    for k in range(n):
        if x > 0.0 and abs(y) <= eps * abs(x):
            return sec, xs, ys, m, True
        tol = eps * max(abs(x), abs(y))
        if not (x > tol and y >= -tol):
            return sec, xs, ys, m, False
        lo = 0
        hi = nsec - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if wf[mid, 0] * y - x * wf[mid, 1] >= -tol:
                lo = mid
            else:
                hi = mid - 1
        sec[k] = lo
        xs[k] = x
        ys[k] = y
        m = k + 1
        nx = minv[lo, 0, 0] * x + minv[lo, 0, 1] * y
        ny = minv[lo, 1, 0] * x + minv[lo, 1, 1] * y
        t = eps * max(abs(nx), abs(ny))
        if -t < nx < 0.0:
            nx = 0.0
        if -t < ny < 0.0:
            ny = 0.0
        x = nx
        y = ny
    return sec, xs, ys, m, x > 0.0 and abs(y) <= eps * abs(x)
