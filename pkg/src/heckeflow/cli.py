"""Command-line front end: identity suites, orbits, verification harnesses, codes.

Exit codes: 0 pass, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import __version__
from . import bcz as bczmod
from . import intervalmaps as im
from . import suspension as sus
from .algebra import EPS
from .cfrac import cf_step
from .errors import DomainError, FixedPointError
from .hecke import HeckeContext, identity_suite, make_context

KINDS = ("cf", "bcz", "farey", "gauss", "farey-ext", "gauss-ext")
SUITES = ("bcz-oracle", "markov", "jacobian", "transfer", "histogram", "slabs")
COLUMNS = {
    "cf": ("step", "x", "y", "sector", "terminal"),
    "bcz": ("step", "a", "b", "index", "roof"),
    "farey": ("step", "a", "branch"),
    "gauss": ("step", "a", "branch", "n_steps"),
    "farey-ext": ("step", "a", "s", "branch"),
    "gauss-ext": ("step", "a", "s", "branch"),
}
ORBIT_EPILOG = """\
columns per kind:
  cf         step,x,y,sector,terminal  (a terminal orbit ends with a record
             holding the final vector, empty sector and terminal=1)
  bcz        step,a,b,index,roof
  farey      step,a,branch
  gauss      step,a,branch,n_steps     (n_steps=0 marks the fixed point a=1)
  farey-ext  step,a,s,branch
  gauss-ext  step,a,s,branch           (start must lie in R^q)
CSV files start with one '#' metadata line; JSONL files with a {"meta": ...} object.
Without --start a random valid start is drawn from PCG64(--seed)."""


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    q: int
    seed: int = 0
    tolerance: float = EPS
    out: str = "-"
    fmt: str = "csv"

    def __post_init__(self):
        if self.q < 3:
            raise UsageError(f"q must be >= 3, got {self.q}")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))

    def meta(self, **extra) -> dict:
        return {"tool": "heckeflow", "version": __version__, "q": self.q, "seed": self.seed,
                "tolerance": self.tolerance, "rng": "PCG64", **extra}


# -- output ----------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def write_records(cfg: RunConfig, kind: str, records: Iterable[tuple], stream) -> int:
    cols = COLUMNS[kind]
    meta = cfg.meta(kind=kind, columns=list(cols))
    n = 0
    if cfg.fmt == "csv":
        stream.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            w.writerow([repr(x) if isinstance(x, float) else x for x in map(_fmt, r)])
            n += 1
    else:
        stream.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for r in records:
            stream.write(json.dumps(dict(zip(cols, map(_fmt, r)))) + "\n")
            n += 1
    return n


# -- orbit generation ------------------------------------------------------------


def _parse_number(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise UsageError(f"not a number: {tok!r}") from None


def parse_start(kind: str, text: str | None) -> tuple | None:
    if text is None:
        return None
    vals = [_parse_number(t) for t in text.split(",")]
    want = 1 if kind in ("farey", "gauss") else 2
    if len(vals) != want:
        raise UsageError(f"--start for {kind} needs {want} comma-separated value(s)")
    return tuple(vals)


def _random_start(ctx: HeckeContext, kind: str, rng: np.random.Generator) -> tuple:
    if kind == "cf":
        return (1.0, float(rng.random()))
    if kind == "bcz":
        a, b = bczmod.sample_triangle(ctx, 1, rng)
        return (float(a[0]), float(b[0]))
    if kind in ("farey", "gauss"):
        return (float(1.0 - rng.random()),)
    while True:
        a = float(1.0 - rng.random())
        if a >= 1.0:
            continue
        s = float(rng.random() * sus.s_top(ctx, a))
        if kind == "farey-ext" or im.in_R(ctx, a, s):
            return (a, s)


def _validate_start(ctx: HeckeContext, kind: str, start: tuple, tol: float) -> None:
    if kind == "cf":
        x, y = start
        if not (x > 0 and y >= 0):
            raise UsageError("cf start needs x > 0 and y >= 0")
    elif kind == "bcz":
        if not bczmod.in_triangle(ctx, float(start[0]), float(start[1]), tol):
            raise UsageError(f"{start} is not in the Farey triangle for q={ctx.q}")
    elif kind in ("farey", "gauss"):
        if not 0 < start[0] <= 1:
            raise UsageError("a must lie in (0, 1]")
    else:
        a, s = map(float, start)
        if not sus.in_S(ctx, a, s, tol):
            raise UsageError(f"({a}, {s}) is not in the side set S")
        if kind == "gauss-ext" and not im.in_R(ctx, a, s, tol):
            raise UsageError(f"({a}, {s}) is not in R^{ctx.q}, the domain of the extended Gauss map")


def orbit_records(ctx: HeckeContext, kind: str, start: tuple, steps: int, tol: float) -> Iterator[tuple]:
    """Records of one orbit, columns as in COLUMNS[kind]."""
    if kind == "cf":
        # integer starts run in exact arithmetic, anything else in floats
        exact = all(isinstance(v, int) for v in start)
        u = tuple(start) if exact else tuple(float(v) for v in start)
        for k in range(steps):
            x, y = u
            terminal = (y == 0 and x > 0) if exact else (x > 0 and abs(y) <= tol * abs(x))
            if terminal:
                yield (k, float(x), float(y), "", 1)
                return
            st = cf_step(ctx, u, tol)
            yield (k, float(x), float(y), st.sector, 0)
            u = st.output
        return
    if kind == "bcz":
        av, bv, idx, rf = bczmod.bcz_orbit(ctx, start, steps, tol)
        yield from zip(range(steps), av, bv, idx, rf)
        return
    if kind == "farey":
        av, _, br = im.farey_orbit(ctx, float(start[0]), steps)
        yield from zip(range(len(av)), av, br)
        return
    if kind == "gauss":
        av, _, br, ns = im.gauss_orbit(ctx, float(start[0]), 0.0, steps)
        yield from zip(range(len(av)), av, br, ns)
        return
    if kind == "farey-ext":
        av, sv, br = im.farey_orbit(ctx, float(start[0]), steps, s0=float(start[1]))
        yield from zip(range(len(av)), av, sv, br)
        return
    if kind == "gauss-ext":
        av, sv, br, _ = im.gauss_orbit(ctx, float(start[0]), float(start[1]), steps)
        yield from zip(range(len(av)), av, sv, br)
        return
    raise UsageError(f"unknown kind {kind!r}")  # pragma: no cover


# -- verification harnesses ------------------------------------------------------


def _suite_bcz_oracle(ctx, n, rng, tol=1e-9):
    a, b = bczmod.sample_triangle(ctx, n, rng)
    a2, b2, _, roof = bczmod.bcz_batch(ctx, a, b)
    worst = 0.0
    for k in range(n):
        R, p = bczmod.first_return_oracle(ctx, (a[k], b[k]), expand=True)
        worst = max(worst, abs(R - roof[k]) / max(1.0, R), abs(p.a - a2[k]), abs(p.b - b2[k]))
    return {"max_residual": worst, "tolerance": tol, "ok": worst <= tol}


def _sample_V(ctx, i, n, rng):
    lo, hi = float(ctx.ends[i + 1]), float(ctx.ends[i])
    a = hi - (hi - lo) * rng.random(n)  # (lo, hi]
    a = a[a > lo]
    s = rng.random(a.size) * np.array([sus.s_top(ctx, x) for x in a])
    return a, s


def _suite_markov(ctx, n, rng, tol=1e-9):
    worst_out, rows = 0, []
    for i in range(ctx.q - 1):
        j = ctx.q - 2 - i
        a, s = _sample_V(ctx, i, n, rng)
        out = 0
        lo_hit = hi_hit = False
        for x, t in zip(a, s):
            x2, t2 = sus.side_map_V_to_H(ctx, (x, t))
            if not sus.in_H(ctx, j, x2, t2, tol):
                out += 1
                continue
            lo, hi = sus.R_side(ctx, j, x2), sus.R_side(ctx, j + 1, x2)
            frac = (t2 - lo) / (hi - lo)
            lo_hit |= frac < 0.05
            hi_hit |= frac > 0.95
        worst_out += out
        rows.append({"i": i, "target": j, "samples": int(a.size), "outside": out,
                     "bottom_strip_hit": bool(lo_hit), "top_strip_hit": bool(hi_hit)})
    return {"branches": rows, "outside_total": worst_out, "ok": worst_out == 0}


def _stencil_ok(ctx, a, s, h, gauss_map):
    """All points within h of (a, s) lie in one smooth piece of the map."""
    pts = [(a + h, s), (a - h, s), (a, s + h), (a, s - h)]
    if not all(0 < x < 1 and sus.in_S(ctx, x, t, 0.0) for x, t in pts):
        return False
    if len({sus.branch_of(ctx, x) for x, _ in pts + [(a, s)]}) != 1:
        return False
    if gauss_map:
        if len({im.n_accel(ctx, x) for x, _ in pts + [(a, s)]}) != 1:
            return False
        if not all(im.in_R(ctx, x, t) for x, t in pts):
            return False
    return True


def _suite_jacobian(ctx, n, rng, tol=1e-6, h=1e-5):
    # five-point stencil: the accelerated branches curve on the scale of their
    # cells, so the three-point truncation error is too large near 0 and 1
    maps = {
        "V_to_S": lambda x, t: sus.side_map_V_to_S(ctx, sus.branch_of(ctx, x), (x, t), eps=1e-6),
        "extended_farey": lambda x, t: sus.side_map_V_to_H(ctx, (x, t), eps=1e-6),
        "extended_gauss": lambda x, t: im.gauss_ext_step(ctx, (x, t), eps=1e-6)[:2],
    }
    worst = {k: 0.0 for k in maps}
    worst["S_to_H"] = 0.0
    counts = {k: 0 for k in worst}
    for name, f in maps.items():
        got = 0
        while got < n:
            a = float(rng.uniform(0.02, 0.98))
            s = float(rng.uniform(0.01, 0.99) * sus.s_top(ctx, a))
            if not _stencil_ok(ctx, a, s, 1e-4, name == "extended_gauss"):
                continue
            if name == "extended_gauss" and im.n_accel(ctx, a) > 50:
                continue
            J = sus.jacobian(f, a, s, h, order=4)
            worst[name] = max(worst[name], abs(J - 1))
            got += 1
            if name == "V_to_S":
                i = sus.branch_of(ctx, a)
                al, sg = f(a, s)
                if 1e-4 < al < 1 - 1e-4:
                    g = lambda x, t: sus.side_map_S_to_H(ctx, i, (x, t), eps=1e-6)
                    worst["S_to_H"] = max(worst["S_to_H"], abs(sus.jacobian(g, al, sg, h, order=4) - 1))
                    counts["S_to_H"] += 1
        counts[name] = got
    m = max(worst.values())
    return {"max_abs_J_minus_1": worst, "evaluated": counts, "tolerance": tol, "ok": m <= tol}


def _suite_transfer(ctx, n, rng, tol=1e-10, gauss_tol=1e-4):
    xs = np.sort(1.0 - rng.random(n))
    xs = xs[xs < 1.0]
    farey = im.farey_transfer_check(ctx, xs)
    gx = xs[np.linspace(0, xs.size - 1, min(20, xs.size)).astype(int)]
    gauss = im.gauss_transfer_check(ctx, gx)
    return {"farey_max_residual": farey, "farey_tolerance": tol,
            "gauss_max_residual": gauss, "gauss_tolerance": gauss_tol, "gauss_truncation": 100_000,
            "ok": farey < tol and gauss < gauss_tol}


def _suite_histogram(ctx, n, rng, tol=0.05, bins=64):
    a0 = float(rng.uniform(0.05, 0.95))
    h = im.birkhoff_histogram(ctx, "gauss", a0, n, bins)
    adm = int(h.admissible.sum()) if h.admissible is not None else 0
    d = h.sup_distance if h.sup_distance is not None else math.inf
    return {"start": a0, "iterates": h.n_iter, "truncated": h.truncated, "bins": bins, "admissible_bins": adm,
            "sup_distance": d, "tolerance": tol, "ok": d < tol and not h.truncated}


def _suite_slabs(ctx, n, rng):
    rep = sus.slab_partition_check(ctx, n, rng)
    rep["ok"] = bool(rep["tiling_ok"] and rep["gap_ok"] and all(rep["vertex_identities"].values()))
    return rep


SUITE_FUNCS = {
    "bcz-oracle": (_suite_bcz_oracle, 1000),
    "markov": (_suite_markov, 10_000),
    "jacobian": (_suite_jacobian, 200),
    "transfer": (_suite_transfer, 100),
    "histogram": (_suite_histogram, 1_000_000),
    "slabs": (_suite_slabs, 10_000),
}


def run_suite(name: str, q: int, samples: int | None = None, seed: int = 0) -> dict:
    cfg = RunConfig(q, seed)
    func, default = SUITE_FUNCS[name]
    n = default if samples is None else samples
    if n <= 0:
        raise UsageError("samples must be positive")
    rep = func(make_context(q), n, cfg.rng())
    rep["ok"] = bool(rep["ok"])
    return {"suite": name, "q": q, "samples": n, "seed": seed, "version": __version__, **rep}


# -- commands --------------------------------------------------------------------


def cmd_identities(args) -> int:
    cfg = RunConfig(args.q)
    res = identity_suite(make_context(cfg.q))
    for name, ok in res.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    passed = all(res.values())
    print(f"q={cfg.q}: {sum(res.values())}/{len(res)} identity families hold")
    return 0 if passed else 1


def cmd_orbit(args) -> int:
    fmt = args.format or ("jsonl" if args.out.endswith((".jsonl", ".json")) else "csv")
    cfg = RunConfig(args.q, args.seed, args.tolerance, args.out, fmt)
    if args.steps <= 0:
        raise UsageError("--steps must be positive")
    ctx = make_context(cfg.q)
    start = parse_start(args.kind, args.start)
    if start is None:
        start = _random_start(ctx, args.kind, cfg.rng())
    _validate_start(ctx, args.kind, start, cfg.tolerance)
    recs = orbit_records(ctx, args.kind, start, args.steps, cfg.tolerance)
    if cfg.out == "-":
        write_records(cfg, args.kind, recs, sys.stdout)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            write_records(cfg, args.kind, recs, fh)
    return 0


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, RunConfig(args.q, args.seed).q, args.samples, args.seed)
    print(json.dumps(rep, indent=2, sort_keys=True, default=str))
    return 0 if rep["ok"] else 1


def cmd_code(args) -> int:
    ctx = make_context(RunConfig(args.q).q)
    if args.n <= 0:
        raise UsageError("--n must be positive")
    if not sus.in_S(ctx, args.a, args.s):
        raise UsageError(f"({args.a}, {args.s}) is not in the side set S")
    it = im.geodesic_code(ctx, (args.a, args.s), args.n)
    print(" ".join(map(str, it.steps)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heckeflow", description="Dynamics of Hecke triangle groups G_q.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("identities", help="run the exact identity suite")
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("orbit", help="simulate an orbit and export it",
                       epilog=ORBIT_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--start", help="comma-separated start; one value for farey/gauss")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--out", default="-", help="output path ('-' for stdout)")
    s.add_argument("--format", choices=("csv", "jsonl"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tolerance", type=float, default=EPS)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("verify", help="run a verification harness and print a JSON report")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("code", help="print the geodesic code of (a, s)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_code)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, FixedPointError) as exc:
        parser.error(str(exc))  # exits with status 2
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
