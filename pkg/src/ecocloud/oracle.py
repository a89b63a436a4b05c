"""Exhaustive search over placements and frequency assignments.

Serves as the ground-truth optimizer for desk-scale instances: the per-blade
structure of the objective (revenue, costs, and footprint all decompose over
blades) lets the enumeration cache blade-level evaluations, but the state
space accounted against the guard is the full n^m x k^n grid and the result
is exact over it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .errors import InfeasibleInstanceError, SearchSpaceTooLargeError
from .evaluation import (
    EvaluationReport,
    Instance,
    ParetoArchive,
    _evaluate_blade,
    evaluate,
)
from .model import Placement
from .sustainability import IndicatorVector

DEFAULT_STATE_GUARD = 10**6


@dataclass(frozen=True)
class OracleResult:
    best: Placement
    report: EvaluationReport
    states_enumerated: int
    feasible_min_rates: IndicatorVector
    pareto: ParetoArchive | None = None


def state_space_size(inst: Instance) -> int:
    n = len(inst.topology.blades)
    m = len(inst.topology.vms)
    return n**m * prod(len(b.levels) for b in inst.topology.blades)


def brute_force_optimum(
    inst: Instance,
    guard: int = DEFAULT_STATE_GUARD,
    include_pareto: bool = False,
) -> OracleResult:
    """Exact feasible maximum of virtual profit; optionally the exact Pareto
    front over (-real profit, six indicator rates).

    Raises SearchSpaceTooLargeError when the grid exceeds `guard` (the
    enumeration never silently samples) and InfeasibleInstanceError when no
    feasible state exists.
    """
    topo = inst.topology
    blades = list(topo.blades)
    vms = list(topo.vms)
    states = state_space_size(inst)
    if states > guard:
        raise SearchSpaceTooLargeError(
            f"state space {states} exceeds guard {guard}"
        )

    region = {dc.id: dc.region_tag for dc in topo.datacenters}
    factors = inst.region_factors()

    # Cache per (blade index, VM bitmask, level index): (feasible, vp, rp, rates)
    cache: dict[tuple[int, int, int], tuple[bool, float, float, IndicatorVector]] = {}

    def blade_option(bi: int, mask: int, li: int):
        key = (bi, mask, li)
        if key not in cache:
            blade = blades[bi]
            assigned = [vms[j] for j in range(len(vms)) if mask >> j & 1]
            load, rates, costs, violations = _evaluate_blade(
                blade,
                assigned,
                blade.levels[li],
                factors[region[blade.datacenter_id]],
                inst.tariff,
                inst.taxes,
                inst.timestamp,
            )
            cache[key] = (not violations, costs.virtual_profit, costs.real_profit, rates)
        return cache[key]

    best_vp: float | None = None
    best_assignment: tuple[int, ...] | None = None
    best_levels: tuple[int, ...] | None = None
    min_rates = [float("inf")] * 6
    archive = ParetoArchive() if include_pareto else None

    def decode(assignment, levels) -> Placement:
        return Placement(
            vm_to_blade={vm.id: blades[bi].id for vm, bi in zip(vms, assignment)},
            blade_freq={
                blades[bi].id: blades[bi].levels[li] for bi, li in enumerate(levels)
            },
        )

    for assignment in itertools.product(range(len(blades)), repeat=len(vms)):
        masks = [0] * len(blades)
        for j, bi in enumerate(assignment):
            masks[bi] |= 1 << j
        # Per blade: feasible levels and the best-VP one.
        per_blade_feasible: list[list[int]] = []
        choice: list[int] = []
        vp_total = 0.0
        feasible = True
        for bi in range(len(blades)):
            fs = [
                li
                for li in range(len(blades[bi].levels))
                if blade_option(bi, masks[bi], li)[0]
            ]
            if not fs:
                feasible = False
                break
            per_blade_feasible.append(fs)
            best_li = max(fs, key=lambda li: (blade_option(bi, masks[bi], li)[1], -li))
            choice.append(best_li)
            vp_total += blade_option(bi, masks[bi], best_li)[1]
        if not feasible:
            continue
        if best_vp is None or vp_total > best_vp:
            best_vp = vp_total
            best_assignment = assignment
            best_levels = tuple(choice)
        for i, rate in enumerate(_min_rates_for(blade_option, masks, per_blade_feasible)):
            min_rates[i] = min(min_rates[i], rate)
        if archive is not None:
            for combo in itertools.product(*per_blade_feasible):
                rp = 0.0
                rates = IndicatorVector.zero()
                for bi, li in enumerate(combo):
                    _, _, blade_rp, blade_rates = blade_option(bi, masks[bi], li)
                    rp += blade_rp
                    rates = rates.plus(blade_rates)
                archive.offer((-rp, *rates), decode(assignment, combo))

    if best_vp is None:
        raise InfeasibleInstanceError("no feasible state within the enumerated space")

    best = decode(best_assignment, best_levels)
    return OracleResult(
        best=best,
        report=evaluate(best, inst),
        states_enumerated=states,
        feasible_min_rates=IndicatorVector(*min_rates),
        pareto=archive,
    )


def _min_rates_for(blade_option, masks, per_blade_feasible) -> IndicatorVector:
    """Per-indicator feasible minimum for one VM assignment: indicator rates
    decompose over blades, so each blade independently takes its cheapest
    feasible level per indicator."""
    totals = [0.0] * 6
    for bi, fs in enumerate(per_blade_feasible):
        per_level = [blade_option(bi, masks[bi], li)[3] for li in fs]
        for i in range(6):
            totals[i] += min(r[i] for r in per_level)
    return IndicatorVector(*totals)
