"""Command-line front end.

Subcommands: cost (closed-form tables), threshold (quadratic roots), sweep
(threshold curves as CSV and optional SVG), verify (formula-vs-engine grid),
contract (build and contract a real network), bench (wall-clock medians).

Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from statistics import median
from typing import Optional, Sequence

import numpy as np

from . import costmodel
from .costmodel import SweepRow, threshold_roots, threshold_sweep
from .engine import comb_plan, execute, mps_plan, plan_for
from .network import NetworkParams, attach_data, build_comb, build_mps, \
    set_orthonormal_compressions
from .tensor import CountOverflowError
from .verification import run_verification

QUOTED_UPPER_ROOT = 28.83  # commonly quoted threshold that the formula does not reproduce


class DataFormatError(ValueError):
    """Malformed data-matrix CSV."""


def _params_from_args(args: argparse.Namespace) -> NetworkParams:
    return NetworkParams(dim_raw=args.dim_raw, dim_comp=args.dim_comp,
                         bond_dim=args.bond, teeth=args.teeth,
                         tooth_len=args.tooth_len)


def _fmt(count: int) -> str:
    return f"{count:,}"


def _root_str(value: Optional[float], places: int) -> str:
    return "" if value is None else f"{value:.{places}f}"


def load_data_matrix(path: str, sites: int, dim_raw: int) -> np.ndarray:
    """Read a headerless CSV of ``sites`` rows with ``dim_raw`` floats each."""
    rows = []
    with open(path, newline="") as handle:
        for r, row in enumerate(csv.reader(handle), start=1):
            if len(row) != dim_raw:
                raise DataFormatError(
                    f"{path}: row {r} has {len(row)} columns, expected {dim_raw}")
            values = []
            for c, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: row {r}, column {c}: {cell!r} is not a number"
                    ) from None
            rows.append(values)
    if len(rows) != sites:
        raise DataFormatError(
            f"{path}: {len(rows)} rows, expected {sites} (one per site)")
    return np.asarray(rows, dtype=np.float64)


def cmd_cost(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    print(f"parameters: teeth={p.teeth} tooth-len={p.tooth_len} "
          f"dim-raw={p.dim_raw} dim-comp={p.dim_comp} bond={p.bond_dim} "
          f"(sites={p.sites})")
    print()
    mps_terms = costmodel.mps_cost_terms(p)
    mps_total = costmodel.mps_cost(p)
    print("mps contraction cost")
    for name, value in mps_terms.items():
        print(f"  {name:<28} {_fmt(value):>14}")
    print(f"  {'total':<28} {_fmt(mps_total):>14}")
    print()
    for basis in ("schedule", "printed"):
        terms = costmodel.comb_cost_terms(p, basis)
        total = sum(terms.values())
        print(f"comb contraction cost [{basis} basis]")
        for name, value in terms.items():
            print(f"  {name:<28} {_fmt(value):>14}")
        print(f"  {'total':<28} {_fmt(total):>14}")
        print()
    delta = costmodel.cost_delta(p, args.basis)
    verdict = "comb cheaper" if delta > 0 else ("tie" if delta == 0 else "mps cheaper")
    print(f"cost gap mps - comb [{args.basis} basis]: {_fmt(delta)}  ({verdict})")
    other = "printed" if args.basis == "schedule" else "schedule"
    print(f"cost gap mps - comb [{other} basis]: "
          f"{_fmt(costmodel.cost_delta(p, other))}")
    return 0


def cmd_threshold(args: argparse.Namespace) -> int:
    result = threshold_roots(args.dim_comp, args.teeth)
    if args.json:
        payload = {
            "x_minus": None if result.x_minus is None else round(result.x_minus, 6),
            "x_plus": None if result.x_plus is None else round(result.x_plus, 6),
            "regime": result.regime.value,
            "discriminant": result.discriminant,
        }
        print(json.dumps(payload))
        return 0
    print(f"teeth (M):          {result.teeth}")
    print(f"compressed dim (d): {result.comp_dim:g}")
    print(f"quadratic: {result.a:g}*x^2 + {result.b:g}*x + {result.c:g} = 0  "
          f"(discriminant {result.discriminant:g})")
    if result.roots is None:
        print("no real roots; MPS always cheaper")
        return 0
    print(f"x- = {result.x_minus:.2f}")
    print(f"x+ = {result.x_plus:.2f}")
    print(f"regime: {result.regime.value}")
    if result.teeth == 50 and result.comp_dim == 30:
        print(f"note: direct evaluation of the root formula gives "
              f"x+ = {result.x_plus:.2f}; the commonly quoted value "
              f"{QUOTED_UPPER_ROOT} differs from the formula by about "
              f"{abs(result.x_plus - QUOTED_UPPER_ROOT):.2f}.")
    return 0


def sweep_csv_lines(rows: Sequence[SweepRow]) -> list[str]:
    lines = ["d,x_minus,x_plus,regime"]
    for row in rows:
        lines.append(f"{row.comp_dim},{_root_str(row.x_minus, 6)},"
                     f"{_root_str(row.x_plus, 6)},{row.regime.value}")
    return lines


def sweep_svg(rows: Sequence[SweepRow], teeth: int) -> str:
    """Two-polyline chart of the threshold roots, emitted as a standalone SVG."""
    width, height, margin = 800, 600, 70
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    d_lo, d_hi = rows[0].comp_dim, rows[-1].comp_dim
    d_span = max(d_hi - d_lo, 1)
    y_max = max((r.x_plus for r in rows if r.x_plus is not None), default=1.0) * 1.05

    def sx(d: float) -> float:
        return margin + (d - d_lo) / d_span * plot_w

    def sy(x: float) -> float:
        return height - margin - x / y_max * plot_h

    def polyline(points: list[tuple[float, float]], color: str) -> str:
        if not points:
            return ""
        coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
        return (f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                f'points="{coords}"/>')

    lower = [(sx(r.comp_dim), sy(r.x_minus)) for r in rows if r.x_minus is not None]
    upper = [(sx(r.comp_dim), sy(r.x_plus)) for r in rows if r.x_plus is not None]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for i in range(6):
        d_tick = d_lo + d_span * i / 5
        px = sx(d_tick)
        parts.append(f'<line x1="{px:.2f}" y1="{height - margin}" x2="{px:.2f}" '
                     f'y2="{height - margin + 6}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{height - margin + 22}" '
                     f'font-size="13" text-anchor="middle">{d_tick:g}</text>')
        x_tick = y_max * i / 5
        py = sy(x_tick)
        parts.append(f'<line x1="{margin - 6}" y1="{py:.2f}" x2="{margin}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{margin - 10}" y="{py + 4:.2f}" font-size="13" '
                     f'text-anchor="end">{x_tick:.1f}</text>')
    parts.append(f'<text x="{width / 2:.0f}" y="{height - 20}" font-size="16" '
                 f'text-anchor="middle">d</text>')
    parts.append(f'<text x="22" y="{height / 2:.0f}" font-size="16" '
                 f'text-anchor="middle" transform="rotate(-90 22 {height / 2:.0f})">x</text>')
    parts.append(f'<text x="{width / 2:.0f}" y="{margin - 30}" font-size="16" '
                 f'text-anchor="middle">threshold roots vs d (teeth={teeth})</text>')
    parts.append(polyline(lower, "#1f77b4"))
    parts.append(polyline(upper, "#d62728"))
    legend_x = width - margin - 120
    parts.append(f'<line x1="{legend_x}" y1="{margin + 10}" x2="{legend_x + 30}" '
                 f'y2="{margin + 10}" stroke="#1f77b4" stroke-width="2"/>')
    parts.append(f'<text x="{legend_x + 38}" y="{margin + 14}" font-size="14">x-</text>')
    parts.append(f'<line x1="{legend_x}" y1="{margin + 32}" x2="{legend_x + 30}" '
                 f'y2="{margin + 32}" stroke="#d62728" stroke-width="2"/>')
    parts.append(f'<text x="{legend_x + 38}" y="{margin + 36}" font-size="14">x+</text>')
    parts.append("</svg>")
    return "\n".join(part for part in parts if part) + "\n"


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = threshold_sweep(args.teeth, args.d_min, args.d_max, args.step)
    with open(args.out, "w", newline="") as handle:
        handle.write("\n".join(sweep_csv_lines(rows)) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.svg:
        with open(args.svg, "w") as handle:
            handle.write(sweep_svg(rows, args.teeth))
        print(f"wrote chart to {args.svg}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(grid=args.grid, seed=args.seed)
    print(f"verification grid: {report.grid} ({report.tuples} parameter tuples), "
          f"seed {report.seed}")
    for check in report.checks:
        status = "PASS" if check.ok else "FAIL"
        detail = f"{check.passed} checked"
        if check.skipped:
            detail += f", {check.skipped} skipped"
        print(f"  [{status}] {check.name} ({detail})")
        if check.failure:
            print(f"         {check.failure}")
    print("all checks passed" if report.ok
          else f"FAILED: {report.first_failure}")
    return report.exit_code


def cmd_contract(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    build = build_mps if args.kind == "mps" else build_comb
    net = build(p, seed=args.seed)
    if args.orthonormal_u:
        net = set_orthonormal_compressions(net, seed=args.seed)
    if args.data:
        matrix = load_data_matrix(args.data, p.sites, p.dim_raw)
        net = attach_data(net, matrix)
    scalar, report = execute(net, plan_for(net))
    if args.json:
        payload = {
            "kind": args.kind,
            "scalar": scalar,
            "measured_multiplications": report.total,
            "analytic_schedule": report.analytic_schedule,
            "analytic_printed": report.analytic_printed,
            "residual_printed_minus_measured": report.residual_printed_minus_measured,
        }
        print(json.dumps(payload))
        return 0
    print(f"kind: {args.kind}")
    print(f"parameters: teeth={p.teeth} tooth-len={p.tooth_len} "
          f"dim-raw={p.dim_raw} dim-comp={p.dim_comp} bond={p.bond_dim} "
          f"seed={args.seed}")
    print(f"scalar: {scalar:.17g}")
    print(f"measured multiplications: {_fmt(report.total)}")
    print(f"analytic (schedule basis): {_fmt(report.analytic_schedule)}")
    print(f"analytic (printed basis):  {_fmt(report.analytic_printed)}")
    print(f"residual (printed - measured): "
          f"{_fmt(report.residual_printed_minus_measured)}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.reps < 3:
        raise ValueError(f"reps must be >= 3, got {args.reps}")
    bonds = [int(b) for b in args.bond_list.split(",") if b]
    if not bonds:
        raise ValueError("bond-list must name at least one bond dimension")
    lines = ["kind,x,measured_mults,median_ns,reps"]
    for kind, build, plan in (("mps", build_mps, mps_plan),
                              ("comb", build_comb, comb_plan)):
        for x in bonds:
            p = NetworkParams(dim_raw=args.dim_raw, dim_comp=args.dim_comp,
                              bond_dim=x, teeth=args.teeth,
                              tooth_len=args.tooth_len)
            net = build(p, seed=args.seed)
            steps = plan(net)
            timings = []
            total = None
            for _ in range(args.reps):
                start = time.perf_counter_ns()
                _, report = execute(net, steps)
                timings.append(time.perf_counter_ns() - start)
                total = report.total
            lines.append(f"{kind},{x},{total},{round(median(timings))},{args.reps}")
    with open(args.out, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {args.out}")
    return 0


def _add_param_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--teeth", type=int, required=True, help="backbone length M")
    sub.add_argument("--tooth-len", type=int, required=True, help="tensors per tooth N")
    sub.add_argument("--dim-raw", type=int, required=True, help="raw physical dimension D")
    sub.add_argument("--dim-comp", type=int, required=True,
                     help="compressed physical dimension d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combtn",
        description="Contraction-cost laboratory for MPS chains and comb tensor networks.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    cost = subparsers.add_parser("cost", help="closed-form cost tables")
    _add_param_flags(cost)
    cost.add_argument("--bond", type=int, required=True, help="bond dimension x")
    cost.add_argument("--basis", choices=costmodel.BASES, default="schedule")
    cost.set_defaults(handler=cmd_cost)

    threshold = subparsers.add_parser("threshold", help="threshold quadratic roots")
    threshold.add_argument("--teeth", type=int, required=True)
    threshold.add_argument("--dim-comp", type=float, required=True)
    threshold.add_argument("--json", action="store_true")
    threshold.set_defaults(handler=cmd_threshold)

    sweep = subparsers.add_parser("sweep", help="threshold roots over a range of d")
    sweep.add_argument("--teeth", type=int, required=True)
    sweep.add_argument("--d-min", type=int, required=True)
    sweep.add_argument("--d-max", type=int, required=True)
    sweep.add_argument("--step", type=int, default=1)
    sweep.add_argument("--out", required=True, help="CSV output path")
    sweep.add_argument("--svg", help="optional SVG chart path")
    sweep.set_defaults(handler=cmd_sweep)

    verify = subparsers.add_parser("verify", help="formula-vs-engine verification grid")
    verify.add_argument("--grid", choices=("small", "full"), default="small")
    verify.add_argument("--seed", type=int, default=42)
    verify.set_defaults(handler=cmd_verify)

    contract = subparsers.add_parser("contract", help="build and contract a network")
    contract.add_argument("--kind", choices=("mps", "comb"), required=True)
    _add_param_flags(contract)
    contract.add_argument("--bond", type=int, required=True)
    contract.add_argument("--seed", type=int, default=42)
    contract.add_argument("--data", help="data-matrix CSV (sites rows, dim-raw columns)")
    contract.add_argument("--orthonormal-u", action="store_true",
                          help="use orthonormal compression matrices")
    contract.add_argument("--json", action="store_true")
    contract.set_defaults(handler=cmd_contract)

    bench = subparsers.add_parser("bench", help="wall-clock medians per bond dimension")
    _add_param_flags(bench)
    bench.add_argument("--bond-list", required=True,
                       help="comma-separated bond dimensions")
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, CountOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
