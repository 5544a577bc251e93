"""Command-line front end.

Subcommands:

  expand   digit table with convergents and approximation coefficients
  orbit    orbit-state table with the pairing-identity residual column
  region   boundary polylines of an image region, as CSV
  witness  a fold witness for k < 1, as JSON
  verify   the full verification suite, writing report.json

Exit codes: 0 success, 1 a verification check failed, 2 usage or domain
error.  Every subcommand is deterministic given its flags; --seed fully
determines all sampled output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments, geometry, jager
from .cf import OrbitEnded, expand as cf_expand
from .jager import Orbit
from .scalar import DomainError, Mode, NumericContext, TolerancePolicy

_MODES = {"hw": Mode.HARDWARE, "ext": Mode.EXTENDED, "exact": Mode.EXACT}

USAGE_ERROR = 2
CHECK_FAILED = 1


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return value
    return float(value)


def _build_context(args) -> NumericContext:
    tol = TolerancePolicy.for_mode(_MODES[args.mode])
    overrides = {}
    for name in ("eps_compare", "eps_snap", "eps_boundary"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    if overrides:
        tol = TolerancePolicy(
            eps_compare=overrides.get("eps_compare", tol.eps_compare),
            eps_snap=overrides.get("eps_snap", tol.eps_snap),
            eps_boundary=overrides.get("eps_boundary", tol.eps_boundary),
        )
    return NumericContext(_MODES[args.mode], args.bits, tol)


def _parse_value(ctx: NumericContext, text: str):
    """Parse k or x0 per the active mode; exact mode wants num/den."""
    try:
        return ctx.convert(text)
    except (ValueError, TypeError) as exc:
        raise DomainError(str(exc)) from exc


def _emit_table(rows, header, fmt: str) -> None:
    if fmt == "json":
        payload = [dict(zip(header, (_jsonable(c) for c in row))) for row in rows]
        print(json.dumps(payload, indent=2))
        return
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(c) for c in row))


def _add_common(parser) -> None:
    parser.add_argument("--mode", choices=sorted(_MODES), default="hw")
    parser.add_argument("--bits", type=int, default=128,
                        help="mantissa bits in extended mode")
    parser.add_argument("--eps-compare", type=float, dest="eps_compare")
    parser.add_argument("--eps-snap", type=float, dest="eps_snap")
    parser.add_argument("--eps-boundary", type=float, dest="eps_boundary")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def cmd_expand(args) -> int:
    ctx = _build_context(args)
    k = _parse_value(ctx, args.k)
    _parse_value(ctx, args.x0)  # early validation of syntax/mode
    orbit = Orbit(ctx, args.k, args.x0, args.n)
    from .cf import ConvergentState, convergent_step
    state = ConvergentState.initial(ctx)
    rows = []
    for n in range(1, len(orbit) + 1):
        a = orbit.digit(n)
        state = convergent_step(ctx, state, a, k)
        rows.append((n, a, state.p_cur, state.q_cur, state.value, orbit.theta(n)))
    _emit_table(rows, ("n", "a_n", "p_n", "q_n", "p_over_q", "theta_n"), args.format)
    if orbit.terminated:
        print(f"# expansion terminated at n={len(orbit)}", file=sys.stderr)
    return 0


def cmd_orbit(args) -> int:
    ctx = _build_context(args)
    _parse_value(ctx, args.k)
    _parse_value(ctx, args.x0)
    orbit = Orbit(ctx, args.k, args.x0, args.n)
    rows = []
    for n in range(1, len(orbit) + 1):
        point = orbit.jager_point(n)
        if point.terminal:
            rows.append((n, 0.0, orbit._step(n).y, point.u, point.v, orbit.residual(n)))
            break
        pair = orbit.dynamic_pair(n)
        rows.append((n, pair.x, pair.y, point.u, point.v, orbit.residual(n)))
    _emit_table(rows, ("n", "x_n", "y_n", "u", "v", "residual"), args.format)
    if orbit.terminated:
        print(f"# orbit ended at n={len(orbit)}; table truncated", file=sys.stderr)
    return 0


def cmd_region(args) -> int:
    k = float(Fraction(args.k) if "/" in args.k else Fraction(str(float(args.k))))
    if k <= 0:
        raise DomainError("k must be positive")
    which = args.which
    if which == "p0":
        if k >= 1:
            raise DomainError("the five-curve region requires k < 1")
        curves = geometry.p0_boundary_curves(k, arc_points=args.points)
    elif which.startswith("pa:"):
        a = int(which.partition(":")[2])
        quad = geometry.pa_sharp_quad(k, a)
        curves = [geometry.LabeledCurve(f"pa_quad_{a}", tuple(quad.closed_polyline()))]
    elif which == "gamma-constructive":
        curves = geometry.gamma_boundary_polyline(k, arc_points=args.points)
    elif which == "gamma-literal":
        quad = geometry.corollary_quad(k)
        poly = quad.closed_polyline()
        curves = [geometry.LabeledCurve(f"corollary_edge_{i + 1}", (poly[i], poly[i + 1]))
                  for i in range(4)]
        if k < 1:
            curves.append(geometry.hyperbola_arc(k, args.points))
    else:
        raise DomainError(f"unknown region {which!r}")
    experiments.write_region_csv(args.out, curves)
    print(f"wrote {args.out}")
    return 0


def cmd_witness(args) -> int:
    witness = experiments.injectivity_witness(float(args.k), args.seed)
    print(json.dumps(witness.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    suites = tuple(args.suite.split(",")) if args.suite != "all" else experiments.SUITES
    k_list = tuple(float(s) for s in args.k_list.split(",")) if args.k_list else experiments.DEFAULT_K_GRID
    cfg = experiments.ExperimentConfig(
        k_list=k_list, samples=args.samples, n_min=1, n_max=args.n_max,
        seed=args.seed, mode=Mode.EXTENDED, bits=args.bits,
        tol=TolerancePolicy(
            eps_compare=args.eps_compare or 1e-25,
            eps_snap=args.eps_snap or 1e-12,
            eps_boundary=args.eps_boundary or 1e-9,
        ),
    )
    report = experiments.run_verification(cfg, suites)
    for check in report.checks:
        tag = "PASS" if check.failures == 0 else "FAIL"
        where = f" k={check.k}" if check.k is not None else ""
        print(f"[{tag}] {check.name}{where}: {check.samples} samples, "
              f"{check.failures} failures, worst {check.worst_residual:.3e}")
    Path(args.out).write_text(report.to_json())
    print(f"report: {args.out} ({'pass' if report.passed else 'FAIL'})")
    return 0 if report.passed else CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jagerlab",
        description="parametric continued fractions, approximation pairs, "
                    "and their image regions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="digit/convergent/coefficient table")
    p.add_argument("--k", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("-n", "--steps", dest="n", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("orbit", help="orbit states and pairing residuals")
    p.add_argument("--k", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("-n", "--steps", dest="n", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("region", help="region boundary CSV")
    p.add_argument("--k", required=True)
    p.add_argument("--which", required=True,
                   help="p0 | pa:<a> | gamma-constructive | gamma-literal")
    p.add_argument("--out", default="region_boundary.csv")
    p.add_argument("--points", type=int, default=256,
                   help="samples along curved boundary pieces")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("witness", help="fold witness for k < 1")
    p.add_argument("--k", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", default="all",
                   help="all or comma list of " + ",".join(experiments.SUITES))
    p.add_argument("--k-list", dest="k_list", default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--n-max", dest="n_max", type=int, default=30)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--eps-compare", type=float, dest="eps_compare")
    p.add_argument("--eps-snap", type=float, dest="eps_snap")
    p.add_argument("--eps-boundary", type=float, dest="eps_boundary")
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", "absent") is None:
        from .cf import DEFAULT_DEPTH
        args.n = DEFAULT_DEPTH[_MODES[args.mode]]
    try:
        return args.func(args)
    except (DomainError, OrbitEnded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
