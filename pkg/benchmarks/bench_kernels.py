"""Compare the numba kernels with their pure-Python / numpy fallbacks.

    python3 benchmarks/bench_kernels.py --q 5 --n 100000

Each row times the compiled kernel (after a warm-up call) against the
undecorated ``py_func`` or the vectorized numpy fallback, and checks that the
results agree.  With HECKEFLOW_DISABLE_JIT=1 both columns run Python.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from heckeflow import _kernels as K
from heckeflow._accel import using_jit
from heckeflow.bcz import sample_triangle
from heckeflow.hecke import make_context


def best_of(fn, repeat: int) -> tuple[float, object]:
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def py(kernel):
    return getattr(kernel, "py_func", kernel)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--n", type=int, default=100_000, help="orbit length / batch size")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    ctx = make_context(args.q)
    wf, ends, lam, n = ctx.wf, ctx.ends, ctx.lam_float, args.n
    rng = np.random.default_rng(args.seed)
    a, b = sample_triangle(ctx, n, rng)
    minv = np.array([np.linalg.inv(m) for m in ctx.Mf[: args.q - 1]])

    def gauss_py():
        # py_func of gauss_values would still call the compiled gauss_step
        av = np.empty(n)
        x, m = 0.3141592653589793, 0
        for k in range(n):
            if not 0.0 < x < 1.0:
                break
            av[k] = x
            m = k + 1
            x = _gauss_step_py(x)
        return av, m

    def _gauss_step_py(x):
        # pure-Python gauss_step with a pure-Python branch search
        i = py(K.farey_branch)(ends, x)
        last = ends.shape[0] - 2
        if i == 0:
            d = 1.0 - x
            u = 1.0 / d
            k = max(1, int(np.ceil((u - 1.0 / (1.0 - ends[1] - K.SNAP)) / lam)))
            return 1.0 - 1.0 / (u - k * lam)
        if i == last:
            v = 1.0 / x
            k = max(1, int(np.floor((v - 1.0 / (ends[last] + K.SNAP)) / lam)) + 1)
            return min(1.0, 1.0 / (v - k * lam))
        xi, yi = wf[i]
        xj, yj = wf[i + 1]
        return min(1.0, ((xj + yj) * x - xj) / ((xj - yi) * x + (xi - xj)))

    def bcz_loop_py():
        a2, b2 = np.empty(n), np.empty(n)
        step = _bcz_step_py
        for k in range(n):
            a2[k], b2[k] = step(a[k], b[k])
        return a2, b2

    def _bcz_step_py(x, y):
        q = wf.shape[0] - 1
        i = q - 1
        for j in range(2, q):
            if x * wf[j, 0] + y * wf[j, 1] <= 1.0 + 1e-12:
                i = j
                break
        di = x * wf[i, 0] + y * wf[i, 1]
        dj = x * wf[i + 1, 0] + y * wf[i + 1, 1]
        k = np.floor((1.0 - dj) / (lam * di))
        return di, dj + k * lam * di

    rows = []

    # warm-up compiles everything once
    K.gauss_values(wf, ends, lam, 0.3, 10)
    K.farey_orbit(wf, ends, 0.3, 0.1, 10, True)
    K.bcz_batch_loop(wf, lam, a[:10], b[:10], 1e-12)
    K.cf_orbit(wf, minv, 1.0, 0.7071067811865476, 10, 1e-12)

    t_jit, (av, m) = best_of(lambda: K.gauss_values(wf, ends, lam, 0.3141592653589793, n), args.repeat)
    t_py, (av2, m2) = best_of(gauss_py, 1)
    rows.append(("gauss_values", n, t_jit, t_py, m == m2 and np.allclose(av[:m], av2[:m2], atol=1e-9, rtol=0)))

    t_jit, r1 = best_of(lambda: K.farey_orbit(wf, ends, 0.3141592653589793, 0.5, n, True), args.repeat)
    t_py, r2 = best_of(lambda: py(K.farey_orbit)(wf, ends, 0.3141592653589793, 0.5, n, True), 1)
    k = min(r1[3], r2[3], 200)
    rows.append(("farey_orbit (extended)", n, t_jit, t_py, np.allclose(r1[0][:k], r2[0][:k], atol=1e-9)))

    t_jit, r1 = best_of(lambda: K.bcz_batch_loop(wf, lam, a, b, 1e-12), args.repeat)
    t_np, r2 = best_of(lambda: K.bcz_batch_numpy(wf, lam, a, b, 1e-12), args.repeat)
    t_py, r3 = best_of(bcz_loop_py, 1)
    same = np.array_equal(r1[0], r2[0]) and np.array_equal(r1[1], r2[1]) and np.allclose(r1[0], r3[0], atol=0)
    rows.append(("bcz_batch (numpy fallback)", n, t_jit, t_np, same))
    rows.append(("bcz_batch (python loop)", n, t_jit, t_py, same))

    t_jit, r1 = best_of(lambda: K.cf_orbit(wf, minv, 1.0, 0.7071067811865476, min(n, 2000), 1e-12), args.repeat)
    t_py, r2 = best_of(lambda: py(K.cf_orbit)(wf, minv, 1.0, 0.7071067811865476, min(n, 2000), 1e-12), 1)
    rows.append(("cf_orbit", min(n, 2000), t_jit, t_py, r1[3] == r2[3] and np.array_equal(r1[0][: r1[3]], r2[0][: r2[3]])))

    print(f"q={args.q}  numba {'on' if using_jit() else 'off (HECKEFLOW_DISABLE_JIT)'}")
    print(f"{'kernel':28s} {'n':>8s} {'jit [s]':>10s} {'fallback [s]':>13s} {'speedup':>8s}  agree")
    for name, size, tj, tf, ok in rows:
        print(f"{name:28s} {size:8d} {tj:10.4f} {tf:13.4f} {tf / tj:8.1f}x  {bool(ok)}")


if __name__ == "__main__":
    main()
