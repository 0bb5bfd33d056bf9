"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 the computation itself failed (no convergence, parameters outside the
range of a closed form, I/O error).
"""
from __future__ import annotations

import argparse
import sys

from . import criticality as cr
from .complexpoly import NonConvergence
from .leeyang import compute_zeros, write_zeros_csv, write_zeros_rows
from .locus import STEP2_VARIANTS, RenderSettings, render, write_image
from .partition import TreeKind, TreeSpec
from .renorm import DegenerateMap, Params, fixed_points
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_COMPUTE = 3


def parse_complex(s: str) -> complex:
    """Parse ``a+bi`` (or ``a+bj``, or a plain real) at full double precision."""
    text = s.strip().replace(" ", "").replace("i", "j")
    if text in ("j", "+j", "-j"):
        text = text.replace("j", "1j")
    try:
        return complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def _q(s: str) -> int:
    try:
        q = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"q must be an integer, got {s!r}") from None
    if q < 2:
        raise argparse.ArgumentTypeError("q must be >= 2")
    return q


def _positive(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
    return x


def _nonnegative(s: str) -> float:
    x = float(s)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return x


def _count(s: str) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return n


def _depth(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return n


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _fmt_c(z: complex) -> str:
    # imaginary parts at rounding level are noise from the root finder
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return _fmt(z.real)
    return f"{z.real:.10g}{z.imag:+.10g}i"


# ---------------------------------------------------------------------------


def cmd_critical(args) -> int:
    q = args.q
    rows = [
        ("t_wangwu", cr.t_wangwu(q)),
        ("t1 (Bethe-Peierls)", cr.t1(q)),
        ("t2", cr.t2(q)),
        ("t3", cr.t3(q)),
        ("zc at t3", cr.zc_at_t3(q)),
    ]
    print(f"q = {q}")
    for name, v in rows:
        print(f"{name:<20}{_fmt(v)}")
    if args.t is not None:
        t = args.t
        print(f"t = {_fmt(t)}")
        pts = cr.accumulation_points(t, q).points
        shown = ", ".join(_fmt(p) for p in pts) if pts else "(empty)"
        print(f"accumulation set: {shown}")
    return EXIT_OK


def cmd_zeros(args) -> int:
    spec = TreeSpec(args.n, TreeKind(args.tree))
    zs = compute_zeros(spec, args.t, args.q)
    if zs.ill_conditioned:
        print("warning: zeros at t > 1 and depth > 6 are ill-conditioned", file=sys.stderr)
    if zs.pole_adjacent.any():
        print(f"note: {int(zs.pole_adjacent.sum())} zeros pass near the pole; their residuals are not meaningful", file=sys.stderr)
    if args.out:
        write_zeros_csv(zs, args.out)
        print(f"wrote {len(zs)} zeros to {args.out}", file=sys.stderr)
    else:
        write_zeros_rows(zs, sys.stdout)
    return EXIT_OK


def cmd_locus(args) -> int:
    try:
        s = RenderSettings(
            t=args.t,
            q=args.q,
            center=args.center,
            width=args.width,
            nx=args.nx,
            ny=args.ny,
            theta=args.theta,
            eps=args.eps,
            m0=args.m0,
            power=args.power,
            step2=args.step2,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    img = render(s, workers=args.workers)
    sidecar = write_image(img, args.out)
    st = img.stats
    print(f"wrote {args.out} ({s.nx}x{s.ny}) and {sidecar}")
    print(" ".join(f"{k}={v}" for k, v in st.items()))
    return EXIT_OK


def cmd_fixed_points(args) -> int:
    p = Params(args.z, args.t, args.q)
    reps = fixed_points(p, args.order)
    print(f"{'period':>6}  {'point':<36}{'|multiplier|':>14}  {'stability':<11}{'mult.':>5}")
    for r in reps:
        print(f"{r.period:>6}  {_fmt_c(r.point):<36}{abs(r.multiplier):>14.8g}  {r.stability.value:<11}{r.multiplicity:>5}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cayleypotts",
        description="Lee-Yang zeros and renormalisation dynamics of the Potts model on Cayley trees.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critical", help="critical temperatures and the accumulation set")
    p.add_argument("--q", type=_q, required=True)
    p.add_argument("--t", type=_nonnegative, help="also print the accumulation set at this t")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("zeros", help="Lee-Yang zeros of one tree as CSV")
    p.add_argument("--q", type=_q, required=True)
    p.add_argument("--t", type=_nonnegative, required=True)
    p.add_argument("--n", type=_depth, required=True, help="tree depth")
    p.add_argument("--tree", choices=[k.value for k in TreeKind], default=TreeKind.ROOTED.value)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("locus", help="render the active/passive locus to a P6 pixmap")
    p.add_argument("--q", type=_q, required=True)
    p.add_argument("--t", type=_positive, required=True)
    p.add_argument("--center", type=parse_complex, default=0j, help="window centre, e.g. 0.25+0.1i")
    p.add_argument("--width", type=_positive, required=True)
    p.add_argument("--nx", type=_count, default=400)
    p.add_argument("--ny", type=_count, default=400)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--eps", type=_positive, default=1e-12)
    p.add_argument("--m0", type=_count, default=2000)
    p.add_argument("--power", type=int, choices=(1, 2), default=1, help="classify with R (1) or R o R (2)")
    p.add_argument("--step2", choices=STEP2_VARIANTS, default="orbit", help="derivative used by the passivity test")
    p.add_argument("--workers", type=_count, default=1)
    p.add_argument("--out", required=True, help="output .ppm path; settings go to <out>.json")
    p.set_defaults(func=cmd_locus)

    p = sub.add_parser("fixed-points", help="fixed points or 2-cycles of the renormalisation map")
    p.add_argument("--q", type=_q, required=True)
    p.add_argument("--t", type=_positive, required=True)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_fixed_points)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (cr.OutOfRange, DegenerateMap, NonConvergence, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
