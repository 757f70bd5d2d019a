"""Exact arithmetic in Q(lambda_q), lambda_q = 2 cos(pi/q), and 2x2 primitives.

Elements of the field are stored as rational coefficient vectors in the power
basis 1, lambda, ..., lambda^(d-1), reduced modulo the minimal polynomial of
lambda_q.  The same :class:`Vec2` / :class:`Mat2` containers hold either exact
field elements or plain floats; every operation is written against the
arithmetic protocol only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Any, Callable, NamedTuple

import mpmath

from .errors import DomainError

#: Default tolerance for boundary tests on floats.
EPS = 1e-12


# -- integer polynomials (coefficient lists, lowest degree first) -----------


def _poly_mul(p: list[int], r: list[int]) -> list[int]:
    out = [0] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(r):
                out[i + j] += a * b
    return out


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    """Divide by a monic ``den``; the remainder must vanish."""
    num = list(num)
    dd = len(den) - 1
    quot = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            quot[k - dd] = c
            for j in range(dd + 1):
                num[k - dd + j] -= c * den[j]
    if any(num[:dd]):
        raise ArithmeticError("non-exact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    if n < 1:
        raise DomainError(f"cyclotomic index must be positive, got {n}")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(cyclotomic(d)))
    return tuple(num)


@lru_cache(maxsize=None)
def minimal_poly(q: int) -> tuple[int, ...]:
    """Monic minimal polynomial of 2 cos(pi/q) over Q, lowest degree first.

    Built from the cyclotomic polynomial of order 2q, which is palindromic of
    even degree 2m, by rewriting x^-m Phi(x) as a polynomial in y = x + 1/x
    (x^k + x^-k = D_k(y) with D_0 = 2, D_1 = y, D_{k+1} = y D_k - D_{k-1}).
    """
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    phi = cyclotomic(2 * q)
    m = (len(phi) - 1) // 2
    out = [phi[m]] + [0] * m
    d_prev, d_cur = [2], [0, 1]
    for k in range(1, m + 1):
        for j, c in enumerate(d_cur):
            out[j] += phi[m + k] * c
        d_next = [0] + d_cur
        for j, c in enumerate(d_prev):
            d_next[j] -= c
        d_prev, d_cur = d_cur, d_next
    assert out[-1] == 1
    return tuple(out)


def lambda_float(q: int) -> float:
    """Float value of lambda_q.  Exact 1.0 for q = 3."""
    return float(field(q).lam)


# -- the number field ----------------------------------------------------------


class HeckeField:
    """The field Q(lambda_q) in its power basis."""

    def __init__(self, q: int):
        self.q = q
        self.poly = minimal_poly(q)
        self.degree = len(self.poly) - 1
        self._lam_raw = 2.0 * math.cos(math.pi / q)
        self._powers = [self._lam_raw**k for k in range(self.degree)]
        self.zero = FieldElement(self, (Fraction(0),) * self.degree)
        self.one = self(1)
        self.lam = self._reduce([Fraction(0), Fraction(1)])

    def __repr__(self) -> str:
        return f"HeckeField(q={self.q})"

    def __call__(self, value: Any) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise DomainError("elements of different Hecke fields do not mix")
            return value
        if isinstance(value, (int, Rational)):
            return FieldElement(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))
        if isinstance(value, (list, tuple)):
            return self._reduce([Fraction(c) for c in value])
        raise TypeError(f"cannot convert {type(value).__name__} into {self!r}")

    def _reduce(self, coeffs: list[Fraction]) -> FieldElement:
        d = self.degree
        coeffs = list(coeffs)
        for k in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[k]
            if c:
                coeffs[k] = Fraction(0)
                for j in range(d):
                    if self.poly[j]:
                        coeffs[k - d + j] -= c * self.poly[j]
        coeffs += [Fraction(0)] * (d - len(coeffs))
        return FieldElement(self, tuple(coeffs[:d]))

    def lambda_mp(self):
        return 2 * mpmath.cos(mpmath.pi / self.q)


@lru_cache(maxsize=None)
def field(q: int) -> HeckeField:
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    return HeckeField(q)


def lam(q: int) -> tuple[FieldElement, float]:
    """lambda_q as an exact element and as a float."""
    k = field(q)
    return k.lam, float(k.lam)


class FieldElement:
    """Immutable element c_0 + c_1 lambda + ... + c_{d-1} lambda^(d-1)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, fld: HeckeField, coeffs: tuple[Fraction, ...]):
        self.field = fld
        self.coeffs = coeffs

    # conversions

    def _coerce(self, other: Any) -> FieldElement | None:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise DomainError("elements of different Hecke fields do not mix")
            return other
        if isinstance(other, (int, Rational)):
            return self.field(other)
        return None

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __float__(self) -> float:
        if self.is_rational():
            return float(self.coeffs[0])
        return math.fsum(float(c) * p for c, p in zip(self.coeffs, self.field._powers))

    def evaluate(self, lam_value: Any) -> Any:
        """Evaluate the coefficient polynomial at a given value of lambda."""
        out = 0
        for c in reversed(self.coeffs):
            out = out * lam_value + (c.numerator / c.denominator if isinstance(lam_value, float) else _mp_frac(c))
        return out

    def to_mpf(self):
        """Value at the current mpmath working precision."""
        return self.evaluate(self.field.lambda_mp())

    # arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            c = o.coeffs[0]
            return FieldElement(self.field, tuple(a * c for a in self.coeffs))
        if self.is_rational():
            c = self.coeffs[0]
            return FieldElement(self.field, tuple(c * b for b in o.coeffs))
        prod = [Fraction(0)] * (2 * self.field.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return self.field._reduce(prod)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if not any(self.coeffs):
            raise ZeroDivisionError("inverse of zero field element")
        if self.is_rational():
            return self.field(1 / self.coeffs[0])
        # extended Euclid in Q[x]: find u with u * self = 1 mod minpoly
        r0 = [Fraction(c) for c in self.field.poly]
        r1 = _trim(list(self.coeffs))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            quo, rem = _qdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _qsub(s0, _qmul(quo, s1))
        # r0 is a nonzero constant
        c = r0[0]
        return self.field._reduce([x / c for x in s0])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # ordering via the real embedding lambda_q = 2 cos(pi/q)

    def sign(self) -> int:
        if not any(self.coeffs):
            return 0
        if self.is_rational():
            return 1 if self.coeffs[0] > 0 else -1
        v = float(self)
        scale = math.fsum(abs(float(c)) * p for c, p in zip(self.coeffs, self.field._powers))
        if abs(v) > 1e-9 * scale:
            return 1 if v > 0 else -1
        dps = 60
        while True:
            with mpmath.workdps(dps):
                val = self.to_mpf()
                if abs(val) > mpmath.mpf(10) ** (-(dps - 15)) * scale:
                    return 1 if val > 0 else -1
            dps *= 2

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int | None:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return (float(self) > other) - (float(self) < other)
            return None
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, float) else None
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.field.q, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if k == 0 else f"{c}*lam" + (f"^{k}" if k > 1 else ""))
        return f"<{' + '.join(terms) or '0'} in Q(lam_{self.field.q})>"


def _mp_frac(c: Fraction):
    return mpmath.mpf(c.numerator) / c.denominator


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _qmul(p, r):
    out = [Fraction(0)] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(r):
            out[i + j] += a * b
    return _trim(out)


def _qsub(p, r):
    n = max(len(p), len(r))
    p = p + [Fraction(0)] * (n - len(p))
    r = r + [Fraction(0)] * (n - len(r))
    return _trim([a - b for a, b in zip(p, r)])


def _qdivmod(num, den):
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [Fraction(0)], _trim(num)
    quo = [Fraction(0)] * (len(num) - dd)
    lead = den[-1]
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k] / lead
        quo[k - dd] = c
        if c:
            for j in range(dd + 1):
                num[k - dd + j] -= c * den[j]
    return _trim(quo), _trim(num[:dd] or [Fraction(0)])


# -- vectors and matrices -------------------------------------------------------


class Vec2(NamedTuple):
    x: Any
    y: Any

    def map(self, f: Callable[[Any], Any]) -> Vec2:
        return Vec2(f(self.x), f(self.y))

    def scale(self, c) -> Vec2:
        return Vec2(c * self.x, c * self.y)

    def __neg__(self) -> Vec2:  # type: ignore[override]
        return Vec2(-self.x, -self.y)


class Mat2(NamedTuple):
    a11: Any
    a12: Any
    a21: Any
    a22: Any

    @classmethod
    def columns(cls, c0: Vec2, c1: Vec2) -> Mat2:
        return cls(c0[0], c1[0], c0[1], c1[1])

    @classmethod
    def identity(cls, one: Any = 1) -> Mat2:
        return cls(one, 0 * one, 0 * one, one)

    def __matmul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(
                self.a11 * other.a11 + self.a12 * other.a21,
                self.a11 * other.a12 + self.a12 * other.a22,
                self.a21 * other.a11 + self.a22 * other.a21,
                self.a21 * other.a12 + self.a22 * other.a22,
            )
        x, y = other
        return Vec2(self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def __neg__(self) -> Mat2:  # type: ignore[override]
        return Mat2(-self.a11, -self.a12, -self.a21, -self.a22)

    @property
    def T(self) -> Mat2:
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def adjugate(self) -> Mat2:
        return Mat2(self.a22, -self.a12, -self.a21, self.a11)

    def inverse(self) -> Mat2:
        d = self.det()
        if d == 1:
            return self.adjugate()
        return Mat2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def map(self, f: Callable[[Any], Any]) -> Mat2:
        return Mat2(f(self.a11), f(self.a12), f(self.a21), f(self.a22))

    def power(self, n: int) -> Mat2:
        out = Mat2.identity(self.a11 * 0 + 1)
        for _ in range(n):
            out = out @ self
        return out

    def col(self, j: int) -> Vec2:
        return Vec2(self.a11, self.a21) if j == 0 else Vec2(self.a12, self.a22)


def wedge(u, v):
    """Scalar wedge product x_u y_v - x_v y_u."""
    return u[0] * v[1] - v[0] * u[1]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]
