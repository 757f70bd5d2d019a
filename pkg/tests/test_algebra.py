from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckeflow.algebra import Mat2, Vec2, cyclotomic, dot, field, lam, lambda_float, minimal_poly, wedge
from heckeflow.errors import DomainError


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@pytest.mark.parametrize(
    "q, poly",
    [(3, (-1, 1)), (4, (-2, 0, 1)), (5, (-1, -1, 1)), (6, (-3, 0, 1))],
)
def test_minimal_poly_examples(q, poly):
    # coefficients are stored low degree first
    assert minimal_poly(q) == poly


@pytest.mark.parametrize("q", range(3, 25))
def test_minimal_poly_oracle(q):
    p = minimal_poly(q)
    assert p[-1] == 1
    # degree of 2cos(pi/q) over Q is phi(2q)/2
    assert len(p) - 1 == max(1, euler_phi(2 * q) // 2)
    root = 2 * math.cos(math.pi / q)
    assert abs(np.polyval(p[::-1], root)) < 1e-9


def test_minimal_poly_rejects_small_q():
    with pytest.raises(DomainError):
        minimal_poly(2)


def test_cyclotomic_small():
    assert cyclotomic(1) == (-1, 1)
    assert cyclotomic(4) == (1, 0, 1)
    assert cyclotomic(6) == (1, -1, 1)


@pytest.mark.parametrize("q, value", [(3, 1.0), (4, 1.4142135624), (5, 1.6180339887)])
def test_lambda_values(q, value):
    exact, f = lam(q)
    assert abs(f - value) < 1e-10
    assert lambda_float(q) == f
    assert exact.field.q == q


def test_lambda_q3_is_exactly_one():
    assert lambda_float(3) == 1.0
    assert lam(3)[0] == 1


@pytest.mark.parametrize("q", range(3, 13))
def test_lambda_satisfies_its_polynomial_exactly(q):
    K = field(q)
    acc = K.zero
    for c in reversed(minimal_poly(q)):
        acc = acc * K.lam + c
    assert acc == 0


def test_wedge_and_dot_examples():
    assert wedge((1, 0), (0, 1)) == 1
    assert wedge((1, 0), (1, 1)) == 1
    assert wedge((2, 3), (2, 3)) == 0
    assert dot((1, 0), (0, 1)) == 0
    assert dot((1, 1), (0, 1)) == 1
    lam5 = lambda_float(5)
    assert abs(dot((1, -0.5), (lam5, lam5)) - 0.5 * lam5) < 1e-15
    assert abs(0.5 * lam5 - 0.80902) < 1e-5


def test_field_arithmetic_q5():
    K = field(5)
    l = K.lam
    assert l * l == l + 1  # golden ratio
    assert (l - 1) * l == 1
    assert 1 / l == l - 1
    assert float(l**5) == pytest.approx(lambda_float(5) ** 5, rel=1e-14)


def test_field_elements_do_not_mix():
    with pytest.raises(DomainError):
        _ = field(5).lam + field(7).lam


@pytest.mark.parametrize("q", [4, 5, 7, 9])
def test_sign_and_order_are_exact(q):
    K = field(q)
    l = K.lam
    assert l > 1 and l < 2
    assert (l - Fraction(lambda_float(q))).sign() in (-1, 0, 1)
    tiny = l * l - l * l + Fraction(1, 10**30)
    assert tiny > 0


coef = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@given(q=st.integers(3, 12), a=st.lists(coef, min_size=3, max_size=3), b=st.lists(coef, min_size=3, max_size=3))
def test_field_matches_floats(q, a, b):
    K = field(q)
    x, y = K(a), K(b)
    lf = lambda_float(q)
    fx = sum(float(c) * lf**k for k, c in enumerate(a))
    fy = sum(float(c) * lf**k for k, c in enumerate(b))
    scale = 1 + abs(fx) + abs(fy)
    assert float(x + y) == pytest.approx(fx + fy, abs=1e-9 * scale)
    assert float(x * y) == pytest.approx(fx * fy, abs=1e-9 * scale**2)
    if y != 0:
        assert float(x / y) * float(y) == pytest.approx(float(x), abs=1e-8 * scale**2)
        assert (x / y) * y == x
    assert (x < y) == (float(x) < float(y)) or abs(float(x) - float(y)) < 1e-12


@given(q=st.integers(3, 10), n=st.integers(0, 12))
def test_mat2_power_and_det(q, n):
    K = field(q)
    T = Mat2(K.one, K.lam, K.zero, K.one)
    S = Mat2(K.zero, -K.one, K.one, K.zero)
    U = T @ S
    assert U.power(n).det() == 1
    assert U.power(n) @ U.inverse().power(n) == Mat2.identity(K.one)


def test_vec2_helpers():
    v = Vec2(1, 2)
    assert -v == Vec2(-1, -2)
    assert v.scale(3) == Vec2(3, 6)
