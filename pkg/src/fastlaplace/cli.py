"""Benchmark harness: deterministic test data, error metric, CSV reports.

Test data follows the standard setup for these transforms: uniformly
random coefficients, equispaced descending exponents ``n..1``, uniform
spatial nodes, and decay rates drawn from ``[0, (2q-1)*log 2]`` so disk
nodes stay above the truncation radius.  All randomness comes from
numpy's seeded ``default_rng`` (PCG64), never from OS entropy, so output
is reproducible across platforms.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .diskeval import make_disk_plan, naive_disk_apply
from .kernels import bessel_half_kernel, exp_kernel
from .laplace import make_plan, naive_apply

__all__ = [
    "TestData",
    "gen_testdata",
    "relative_error",
    "BenchRecord",
    "main",
    "console_main",
]


class TestData(NamedTuple):
    fhat: np.ndarray  # coefficients, uniform in [0, 1) (complex on request)
    xi: np.ndarray    # exponents n, n-1, ..., 1
    x: np.ndarray     # angular coordinates in [0, 1)
    y: np.ndarray     # decay rates, descending in [0, (2q-1)*log 2]


def gen_testdata(n: int, q: int, seed: int, complex_coeffs: bool = False) -> TestData:
    """Deterministic benchmark data for problem size ``n`` and rank ``q``.

    Draw order is fixed (y, then x, then fhat) so records are reproducible
    for a given seed.
    """
    if n < 1:
        raise ValueError(f"problem size must be >= 1, got {n}")
    if q < 1:
        raise ValueError(f"rank must be >= 1, got {q}")
    rng = np.random.default_rng(seed)
    y = np.sort(rng.uniform(0.0, (2 * q - 1) * math.log(2.0), size=n))[::-1].copy()
    x = rng.uniform(0.0, 1.0, size=n)
    fhat = rng.uniform(0.0, 1.0, size=n)
    if complex_coeffs:
        fhat = fhat + 1j * rng.uniform(0.0, 1.0, size=n)
    xi = np.arange(n, 0, -1, dtype=float)
    return TestData(fhat=fhat, xi=xi, x=x, y=y)


def relative_error(f, ftilde, fhat) -> float:
    """Max-norm error of ``ftilde`` against ``f``, relative to ``||fhat||_1``."""
    denom = float(np.abs(np.asarray(fhat)).sum())
    if denom == 0.0:
        raise ValueError("coefficient vector must not be identically zero")
    diff = np.asarray(f) - np.asarray(ftilde)
    return float(np.max(np.abs(diff))) / denom


@dataclass
class BenchRecord:
    """One benchmark line: problem size, accuracy, plan shape, error, timings."""

    n: int
    epsilon: float
    q: int
    M: int
    E: float | None
    time_fast_s: float
    time_naive_s: float | None

    def row(self) -> list[str]:
        return [str(self.n), _fmt(self.epsilon), str(self.q), str(self.M),
                _fmt(self.E) if self.E is not None else "",
                _fmt(self.time_fast_s),
                _fmt(self.time_naive_s) if self.time_naive_s is not None else ""]


_RECORD_HEADER = ["n", "epsilon", "q", "M", "E", "time_fast_s", "time_naive_s"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else sys.stdout


def _write_csv(path, header, rows) -> None:
    out = _open_out(path)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


# ----------------------------------------------------------------------
# node-data CSV formats (UTF-8, '.' decimal, 17 significant digits)
# ----------------------------------------------------------------------

def write_laplace_input(path, y, xi, fhat) -> None:
    fh = np.asarray(fhat, dtype=complex)
    rows = [[_fmt(a), _fmt(b), _fmt(c.real), _fmt(c.imag)] for a, b, c in zip(y, xi, fh)]
    _write_csv(path, ["y", "xi", "fhat_re", "fhat_im"], rows)


def read_laplace_input(path):
    with open(path, newline="", encoding="utf-8") as fp:
        reader = csv.reader(fp)
        header = next(reader)
        if header != ["y", "xi", "fhat_re", "fhat_im"]:
            raise ValueError(f"unexpected header {header!r} in {path}")
        data = [[float(c) for c in row] for row in reader if row]
    arr = np.asarray(data, dtype=float).reshape(-1, 4)
    return arr[:, 0], arr[:, 1], arr[:, 2] + 1j * arr[:, 3]


def write_disk_input(path, nodes, exponents, fhat) -> None:
    z = np.asarray(nodes, dtype=complex)
    fh = np.asarray(fhat, dtype=complex)
    rows = [[_fmt(a.real), _fmt(a.imag), _fmt(b), _fmt(c.real), _fmt(c.imag)]
            for a, b, c in zip(z, exponents, fh)]
    _write_csv(path, ["z_re", "z_im", "exponent", "fhat_re", "fhat_im"], rows)


def read_disk_input(path):
    with open(path, newline="", encoding="utf-8") as fp:
        reader = csv.reader(fp)
        header = next(reader)
        if header != ["z_re", "z_im", "exponent", "fhat_re", "fhat_im"]:
            raise ValueError(f"unexpected header {header!r} in {path}")
        data = [[float(c) for c in row] for row in reader if row]
    arr = np.asarray(data, dtype=float).reshape(-1, 5)
    return arr[:, 0] + 1j * arr[:, 1], arr[:, 2], arr[:, 3] + 1j * arr[:, 4]


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _rank_for(epsilon: float) -> int:
    from .partition import interp_order

    return interp_order(epsilon)


def _cmd_laplace(args) -> int:
    kernel = exp_kernel() if args.kernel == "exp" else bessel_half_kernel()
    variant = "exp" if args.kernel == "exp" else "general"
    if args.input:
        y, xi, fhat = read_laplace_input(args.input)
    else:
        data = gen_testdata(args.n, _rank_for(args.epsilon), args.seed, args.complex)
        y, xi, fhat = data.y, data.xi, data.fhat
        if kernel.singular_at_zero:
            y = np.maximum(y, 1e-300)  # kernel is singular on the axis itself
    plan = make_plan(args.epsilon, kernel, y, xi, variant)
    t0 = time.perf_counter()
    ftilde = plan.apply(fhat)
    t_fast = time.perf_counter() - t0

    e = t_naive = None
    if args.check:
        t0 = time.perf_counter()
        f = naive_apply(kernel, y, xi, fhat)
        t_naive = time.perf_counter() - t0
        e = relative_error(f, ftilde, fhat)
    rec = BenchRecord(n=len(y), epsilon=args.epsilon, q=plan.q, M=plan.M,
                      E=e, time_fast_s=t_fast, time_naive_s=t_naive)
    _write_csv(args.output, _RECORD_HEADER, [rec.row()])
    if e is not None and e > args.epsilon:
        print(f"accuracy check failed: E={e:.3e} > epsilon={args.epsilon:g}", file=sys.stderr)
        return 1
    return 0


def _cmd_disk(args) -> int:
    if args.input:
        z, xi, fhat = read_disk_input(args.input)
    else:
        data = gen_testdata(args.n, _rank_for(args.epsilon), args.seed, args.complex)
        z = np.exp(-data.y) * np.exp(2j * math.pi * data.x)
        xi, fhat = data.xi, data.fhat
    plan = make_disk_plan(args.epsilon, z, xi, args.backend)
    t0 = time.perf_counter()
    ftilde = plan.apply(fhat)
    t_fast = time.perf_counter() - t0

    e = t_naive = None
    if args.check:
        t0 = time.perf_counter()
        f = naive_disk_apply(z, xi, fhat)
        t_naive = time.perf_counter() - t0
        e = relative_error(f, ftilde, fhat)
    rec = BenchRecord(n=len(z), epsilon=args.epsilon, q=plan.q, M=plan.M,
                      E=e, time_fast_s=t_fast, time_naive_s=t_naive)
    _write_csv(args.output, _RECORD_HEADER, [rec.row()])
    if e is not None and e > args.epsilon:
        print(f"accuracy check failed: E={e:.3e} > epsilon={args.epsilon:g}", file=sys.stderr)
        return 1
    return 0


def _cmd_bench_error(args) -> int:
    rows = []
    for q in range(args.q_min, args.q_max + 1):
        eps = 4.0 ** (0.5 - q)  # accuracy whose rank rule gives this q
        data = gen_testdata(args.n, q, args.seed)
        bound = 2.0 ** (1 - 2 * q)
        if args.algo == "laplace":
            plan = make_plan(eps, exp_kernel(), data.y, data.xi, "exp")
            ftilde = plan.apply(data.fhat)
            f = naive_apply(exp_kernel(), data.y, data.xi, data.fhat)
        else:
            backend = "direct" if args.algo == "disk-direct" else "nfft"
            z = np.exp(-data.y) * np.exp(2j * math.pi * data.x)
            plan = make_disk_plan(eps, z, data.xi, backend)
            ftilde = plan.apply(data.fhat)
            f = naive_disk_apply(z, data.xi, data.fhat)
        e = relative_error(f, ftilde, data.fhat)
        rows.append([str(q), _fmt(eps), _fmt(e), _fmt(bound)])
    _write_csv(args.output, ["q", "epsilon", "E", "bound"], rows)
    return 0


def _cmd_bench_time(args) -> int:
    eps = 4.0 ** (0.5 - args.q)
    rows = []
    naive_affordable = True
    n = args.n_min
    while n <= args.n_max:
        data = gen_testdata(n, args.q, args.seed)
        if args.algo == "laplace":
            plan = make_plan(eps, exp_kernel(), data.y, data.xi, "exp")
            fast = lambda: plan.apply(data.fhat)  # noqa: E731
            naive = lambda: naive_apply(exp_kernel(), data.y, data.xi, data.fhat)  # noqa: E731
        else:
            z = np.exp(-data.y) * np.exp(2j * math.pi * data.x)
            plan = make_disk_plan(eps, z, data.xi, "nfft")
            fast = lambda: plan.apply(data.fhat)  # noqa: E731
            naive = lambda: naive_disk_apply(z, data.xi, data.fhat)  # noqa: E731

        times = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            fast()
            times.append(time.perf_counter() - t0)
        t_fast = float(np.median(times))

        t_naive = None
        if naive_affordable:
            t0 = time.perf_counter()
            naive()
            t_naive = time.perf_counter() - t0
            if t_naive > 2.0:
                naive_affordable = False  # stop timing the quadratic reference
        rows.append([str(n), _fmt(t_fast), _fmt(t_naive) if t_naive is not None else ""])
        n *= 2
    _write_csv(args.output, ["n", "time_fast_s", "time_naive_s"], rows)
    return 0


def _epsilon(value: str) -> float:
    e = float(value)
    if not 0.0 < e < 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {value}")
    return e


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastlaplace",
        description="Fast Laplace-type kernel sums and unit-disk polynomial evaluation.",
        epilog="Random data uses numpy's seeded default_rng (PCG64); identical "
               "flags and seed reproduce identical CSV except timing columns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laplace", help="one fast kernel-sum run, optionally checked")
    p.add_argument("--epsilon", type=_epsilon, required=True)
    p.add_argument("--n", type=int, default=1024, help="problem size for generated data")
    p.add_argument("--kernel", choices=["exp", "bessel"], default="exp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="CSV with columns y,xi,fhat_re,fhat_im")
    p.add_argument("--output", help="write the record here instead of stdout")
    p.add_argument("--check", action="store_true", help="run the exact reference and report E")
    p.add_argument("--complex", action="store_true", help="draw complex coefficients")
    p.set_defaults(func=_cmd_laplace)

    p = sub.add_parser("disk", help="one unit-disk evaluation run, optionally checked")
    p.add_argument("--epsilon", type=_epsilon, required=True)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--backend", choices=["direct", "nfft"], default="direct")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="CSV with columns z_re,z_im,exponent,fhat_re,fhat_im")
    p.add_argument("--output")
    p.add_argument("--check", action="store_true")
    p.add_argument("--complex", action="store_true")
    p.set_defaults(func=_cmd_disk)

    p = sub.add_parser("bench-error",
                       help="error vs rank sweep; epsilon = 4**(1/2 - q) inverts the rank rule")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q-min", type=int, required=True)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--algo", choices=["laplace", "disk-direct", "disk-nfft"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_bench_error)

    p = sub.add_parser("bench-time", help="timing sweep over doubling problem sizes")
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--algo", choices=["laplace", "disk-nfft"], required=True)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_bench_time)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())
