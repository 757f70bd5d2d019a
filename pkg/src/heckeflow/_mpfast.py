"""Run mpmath-precision loops on gmpy2 MPFR numbers when gmpy2 is present.

Both libraries round every operation to nearest (ties to even) at the working
precision, so a loop of +, -, *, / and comparisons gives the same bits either
way; MPFR just has far less per-operation overhead.
"""

from __future__ import annotations

from contextlib import nullcontext

import mpmath

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

# tests switch this off to compare against plain mpmath
ENABLED = True


def active() -> bool:
    return ENABLED and gmpy2 is not None


def context(prec: int):
    """Context manager fixing the MPFR precision (no-op without gmpy2)."""
    if gmpy2 is None:  # pragma: no cover
        return nullcontext()
    return gmpy2.context(precision=prec, round=gmpy2.RoundToNearest)


def to_fast(x):
    """Exact conversion of an mpf (at most ``prec`` bits) to mpfr."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    r = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -r if sign else r


def to_mp(x) -> mpmath.mpf:
    """Exact conversion back to mpf."""
    m, e = x.as_mantissa_exp()
    return mpmath.mpf((int(m), int(e)))
