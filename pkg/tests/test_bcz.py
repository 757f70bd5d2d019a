from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckeflow import _kernels
from heckeflow.bcz import (
    Strip,
    bcz_batch,
    bcz_map,
    bcz_orbit,
    first_return_oracle,
    in_triangle,
    least_slope_vector,
    partition_index,
    roof,
    sample_triangle,
)
from heckeflow.errors import BoundsExhausted, DomainError
from heckeflow.hecke import make_context


def test_partition_examples(c3, c5, rng):
    a, b = sample_triangle(c3, 50, rng)
    assert all(partition_index(c3, p) == 2 for p in zip(a, b))
    assert partition_index(c5, (1, 1)) == 4
    assert partition_index(c5, (1, -0.5)) == 2


def test_roof_examples(c3, c5):
    assert roof(c3, (1, 1)) == pytest.approx(1.0, abs=1e-15)
    assert roof(c5, (1, 1)) == pytest.approx(1.0, abs=1e-15)
    assert roof(c5, (1, -0.5)) == pytest.approx(2.0, abs=1e-14)


def test_map_examples(c3, c5):
    assert tuple(bcz_map(c3, (1, 1))) == (1.0, 1.0)
    assert tuple(bcz_map(c3, (1, 0.5))) == (0.5, 1.0)
    p = bcz_map(c5, (1, 1))
    assert p.a == pytest.approx(1.0, abs=1e-15)
    assert p.b == pytest.approx(c5.lam_float - 1, abs=1e-14)


def test_oracle_examples(c3, c5):
    R, p = first_return_oracle(c3, (1, 1))
    assert R == pytest.approx(1.0) and tuple(p) == pytest.approx((1.0, 1.0))
    R, p = first_return_oracle(c5, (1, 1))
    assert R == pytest.approx(1.0) and tuple(p) == pytest.approx((1.0, c5.lam_float - 1))
    R, _ = first_return_oracle(c3, (1, 0.5))
    assert R == pytest.approx(roof(c3, (1, 0.5))) == pytest.approx(2.0)


def test_rejects_points_outside_triangle(c5):
    for p in [(0.0, 1.0), (1.2, 0.5), (0.5, 1.5), (0.1, 0.5)]:
        with pytest.raises(DomainError):
            bcz_map(c5, p)


def test_strip():
    s = Strip(1.0)
    assert s.contains(1.0) and not s.contains(0.0) and not s.contains(1.5)
    with pytest.raises(DomainError):
        Strip(0.0)


def test_oracle_reports_small_box(c5):
    with pytest.raises(BoundsExhausted) as exc:
        first_return_oracle(c5, (0.05, 0.99), norm_bound=1.0)
    assert exc.value.required is not None and exc.value.required > 1.0
    R, p = first_return_oracle(c5, (0.05, 0.99), expand=True)
    assert R == pytest.approx(roof(c5, (0.05, 0.99)), rel=1e-12)


@pytest.mark.parametrize("q", [3, 4, 5, 6, 7])
def test_oracle_agreement_sample(q, rng):
    ctx = make_context(q)
    a, b = sample_triangle(ctx, 60, rng)
    for p in zip(a, b):
        R, nxt = first_return_oracle(ctx, p, expand=True)
        img = bcz_map(ctx, p)
        assert abs(R - roof(ctx, p)) <= 1e-9 * max(1, R)
        assert abs(nxt.a - img.a) <= 1e-9 and abs(nxt.b - img.b) <= 1e-9


def test_least_slope_vector(c5):
    v = least_slope_vector(c5, (1, 1), 4)
    assert v[1] / v[0] == pytest.approx(roof(c5, (1, 1)))


@given(q=st.integers(3, 9), seed=st.integers(0, 2**32 - 1))
def test_image_stays_in_triangle(q, seed):
    ctx = make_context(q)
    a, b = sample_triangle(ctx, 200, np.random.default_rng(seed))
    a2, b2, idx, rf = bcz_batch(ctx, a, b)
    assert np.all((a2 > 0) & (a2 <= 1 + 1e-12) & (b2 <= 1 + 1e-12) & (b2 > 1 - ctx.lam_float * a2 - 1e-12))
    assert np.all((idx >= 2) & (idx <= q - 1))
    assert np.all(rf > 0)


@given(q=st.integers(3, 9), seed=st.integers(0, 2**32 - 1))
def test_batch_matches_scalar_and_fallback(q, seed):
    ctx = make_context(q)
    a, b = sample_triangle(ctx, 100, np.random.default_rng(seed))
    j = _kernels.bcz_batch_loop(ctx.wf, ctx.lam_float, a, b, 1e-12)
    n = _kernels.bcz_batch_numpy(ctx.wf, ctx.lam_float, a, b, 1e-12)
    for x, y in zip(j, n):
        assert np.array_equal(x, y)
    for k in range(5):
        p = bcz_map(ctx, (a[k], b[k]))
        assert (p.a, p.b) == (j[0][k], j[1][k])
        assert partition_index(ctx, (a[k], b[k])) == j[2][k]


def test_roof_is_return_time_of_horocycle(c5, rng):
    # h_R g_{a,b} maps the least-slope vector to the x-axis
    a, b = sample_triangle(c5, 20, rng)
    for p in zip(a, b):
        v = least_slope_vector(c5, p, 64)
        R = roof(c5, p)
        assert v[1] - R * v[0] == pytest.approx(0.0, abs=1e-9 * max(1, v[1]))


def test_orbit_fixed_point(c3):
    av, bv, idx, rf = bcz_orbit(c3, (1, 1), 10)
    assert np.all(av == 1.0) and np.all(bv == 1.0) and np.all(idx == 2) and np.all(rf == 1.0)


def test_in_triangle_boundary(c3):
    assert in_triangle(c3, 1.0, 1.0)
    assert not in_triangle(c3, 0.5, 0.5 - 1e-6)
