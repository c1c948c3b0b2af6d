"""Grid verification of the closed forms against instrumented execution.

Runs every parameter tuple of a grid through both geometries and checks:
measured MPS count equals the MPS closed form; measured comb count equals
the printed comb form minus M*x^2 (and the residual equals M*x^2); the
executed scalar agrees with the value oracle wherever the oracle's size
guard admits; Vieta identities on the threshold roots; and independence of
the cost gap from N and D. The formula arguments exist so tests can inject
a corrupted formula and observe the failure path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np

from . import costmodel
from .costmodel import threshold_roots, verify_vieta
from .engine import OracleGuardError, comb_plan, execute, mps_plan, naive_value_oracle
from .network import NetworkParams, build_comb, build_mps

GRIDS = ("small", "full")


def grid_params(grid: str = "small") -> list[NetworkParams]:
    """Parameter tuples of the named verification grid."""
    if grid == "small":
        n_values, m_values, x_values = (1, 2, 3), (2, 3, 5), (1, 2, 3)
    elif grid == "full":
        n_values, m_values, x_values = range(1, 9), range(2, 9), range(1, 7)
    else:
        raise ValueError(f"grid must be one of {GRIDS}, got {grid!r}")
    tuples = []
    for n, m, d, extra, x in product(n_values, m_values, (1, 2, 3), (0, 1), x_values):
        tuples.append(NetworkParams(dim_raw=d + extra, dim_comp=d,
                                    bond_dim=x, teeth=m, tooth_len=n))
    return tuples


@dataclass
class CheckResult:
    name: str
    passed: int = 0
    skipped: int = 0
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class VerificationReport:
    grid: str
    seed: int
    tuples: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    @property
    def first_failure(self) -> Optional[str]:
        for check in self.checks:
            if check.failure:
                return f"{check.name}: {check.failure}"
        return None


def _describe(p: NetworkParams) -> str:
    return (f"(M={p.teeth}, N={p.tooth_len}, D={p.dim_raw}, "
            f"d={p.dim_comp}, x={p.bond_dim})")


def run_verification(
    grid: str = "small",
    seed: int = 42,
    mps_cost_fn: Callable[[NetworkParams], int] = costmodel.mps_cost,
    comb_printed_fn: Callable[[NetworkParams], int] = costmodel.comb_cost_printed,
    comb_schedule_fn: Callable[[NetworkParams], int] = costmodel.comb_cost_schedule,
) -> VerificationReport:
    """Run every check over the grid; deterministic for a fixed seed."""
    params_list = grid_params(grid)
    report = VerificationReport(grid=grid, seed=seed, tuples=len(params_list))

    mps_check = CheckResult("mps measured == closed form")
    comb_check = CheckResult("comb measured == printed form - M*x^2")
    residual_check = CheckResult("printed - measured residual == M*x^2")
    oracle_check = CheckResult("executed scalar == value oracle")

    for idx, p in enumerate(params_list):
        tuple_seed = seed + idx
        overhead = p.teeth * p.bond_dim * p.bond_dim

        mps_net = build_mps(p, seed=tuple_seed)
        mps_scalar, mps_report = execute(mps_net, mps_plan(mps_net))
        expected = mps_cost_fn(p)
        if mps_report.total != expected:
            if mps_check.failure is None:
                mps_check.failure = (f"at {_describe(p)}: measured "
                                     f"{mps_report.total}, formula {expected}")
        else:
            mps_check.passed += 1

        comb_net = build_comb(p, seed=tuple_seed)
        comb_scalar, comb_report = execute(comb_net, comb_plan(comb_net))
        expected = comb_printed_fn(p) - overhead
        if comb_report.total != expected:
            if comb_check.failure is None:
                comb_check.failure = (f"at {_describe(p)}: measured "
                                      f"{comb_report.total}, formula {expected}")
        else:
            comb_check.passed += 1
        schedule = comb_schedule_fn(p)
        if comb_printed_fn(p) - schedule != overhead:
            if residual_check.failure is None:
                residual_check.failure = (
                    f"at {_describe(p)}: printed - schedule = "
                    f"{comb_printed_fn(p) - schedule}, expected {overhead}")
        else:
            residual_check.passed += 1

        for net, scalar in ((mps_net, mps_scalar), (comb_net, comb_scalar)):
            try:
                reference = naive_value_oracle(net)
            except OracleGuardError:
                oracle_check.skipped += 1
                continue
            if not math.isclose(scalar, reference, rel_tol=1e-10, abs_tol=1e-12):
                if oracle_check.failure is None:
                    oracle_check.failure = (
                        f"at {_describe(p)} [{net.kind}]: executed {scalar!r}, "
                        f"oracle {reference!r}")
            else:
                oracle_check.passed += 1

    vieta_check = CheckResult("vieta identities on threshold roots")
    pairs = {(p.teeth, float(p.dim_comp)) for p in params_list if p.teeth >= 3}
    # the grids keep d tiny, so add seeded pairs that actually have real roots
    rng = np.random.default_rng(seed)
    while len(pairs) < 200:
        pairs.add((int(rng.integers(3, 200)), float(rng.uniform(5.0, 100.0))))
    for m, d in sorted(pairs):
        result = threshold_roots(d, m)
        if result.roots is None:
            vieta_check.skipped += 1
        elif verify_vieta(result):
            vieta_check.passed += 1
        elif vieta_check.failure is None:
            vieta_check.failure = (f"at (M={m}, d={d}): "
                                   f"roots {result.roots} break Vieta")

    delta_check = CheckResult("cost gap independent of N and D")
    groups: dict[tuple[int, int, int], tuple[int, int, NetworkParams]] = {}
    for p in params_list:
        key = (p.teeth, p.dim_comp, p.bond_dim)
        deltas = (costmodel.cost_delta(p, "schedule"), costmodel.cost_delta(p, "printed"))
        if key not in groups:
            groups[key] = (*deltas, p)
            continue
        ref_sched, ref_printed, ref_p = groups[key]
        if deltas != (ref_sched, ref_printed):
            if delta_check.failure is None:
                delta_check.failure = (
                    f"{_describe(p)} and {_describe(ref_p)} disagree: "
                    f"{deltas} vs {(ref_sched, ref_printed)}")
        else:
            delta_check.passed += 1

    report.checks = [mps_check, comb_check, residual_check,
                     oracle_check, vieta_check, delta_check]
    return report
