"""Full model chain evaluation of a placement: utilization -> power ->
footprint rates -> cost breakdown, per blade and aggregated, plus the
dominance machinery used for Pareto bookkeeping and trade-off sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import NamedTuple

from .economics import (
    CostBreakdown,
    Tariff,
    VirtualTaxSchedule,
    real_profit,
    virtual_profit,
)
from .errors import InvalidParameterError, InvalidPlacementError
from .model import (
    BladeLoad,
    BladeSpec,
    CloudTopology,
    FrequencyLevel,
    Placement,
    blade_power,
    blade_utilization,
)
from .sustainability import (
    GridMixSample,
    IndicatorVector,
    SourceIndicatorRow,
    default_indicator_table,
    footprint_rates,
    mix_factors,
)

# Any feasible virtual profit on a desk-scale instance is far above this
# floor; infeasible fitness is floor minus weighted violations so every
# feasible solution strictly beats every infeasible one.
INFEASIBLE_FITNESS_FLOOR = -1e12
VIOLATION_PENALTY_WEIGHT = 1e3


class Violation(NamedTuple):
    blade_id: str
    constraint: str  # "cpu" | "mem" | "net"
    amount: float  # excess over the limit


@dataclass(frozen=True)
class Instance:
    """One frozen optimization problem: topology + mixes + prices + taxes."""

    topology: CloudTopology
    mixes: dict[str, GridMixSample]  # region tag -> current sample
    tariff: Tariff
    taxes: VirtualTaxSchedule
    timestamp: datetime
    indicator_table: list[SourceIndicatorRow] = field(default_factory=default_indicator_table)

    def __post_init__(self):
        for dc in self.topology.datacenters:
            if dc.region_tag not in self.mixes:
                raise InvalidParameterError(
                    f"datacenter {dc.id}: no mix sample for region {dc.region_tag}"
                )

    def region_factors(self) -> dict[str, IndicatorVector]:
        return {
            region: mix_factors(sample, self.indicator_table)
            for region, sample in self.mixes.items()
        }


@dataclass(frozen=True)
class EvaluationReport:
    blade_loads: dict[str, BladeLoad]
    blade_rates: dict[str, IndicatorVector]  # g/h
    blade_costs: dict[str, CostBreakdown]
    total_power_kw: float
    total_rates: IndicatorVector
    total_costs: CostBreakdown
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def objective_vector(self) -> tuple[float, ...]:
        """Minimization-oriented vector (-real profit, six indicator rates);
        real profit, not virtual, so Pareto bookkeeping is tax-invariant."""
        return (-self.total_costs.real_profit, *self.total_rates)


def _evaluate_blade(
    blade: BladeSpec,
    assigned: list,
    f: FrequencyLevel,
    factors: IndicatorVector,
    tariff: Tariff,
    taxes: VirtualTaxSchedule,
    t: datetime,
) -> tuple[BladeLoad, IndicatorVector, CostBreakdown, list[Violation]]:
    u = blade_utilization(blade, assigned, f)
    mem = sum(vm.mem_demand for vm in assigned)
    net = sum(vm.net_demand for vm in assigned)
    power = blade_power(blade, u, f)
    violations = []
    if u > 1:
        violations.append(Violation(blade.id, "cpu", u - 1.0))
    if mem > blade.mem_capacity:
        violations.append(Violation(blade.id, "mem", mem - blade.mem_capacity))
    if net > blade.net_capacity:
        violations.append(Violation(blade.id, "net", net - blade.net_capacity))
    rates = footprint_rates(power, tariff.pue, factors)
    costs = real_profit(blade, f, min(u, 1.0), power, tariff, t)
    costs = virtual_profit(costs, taxes, blade.datacenter_id, rates)
    load = BladeLoad(blade_id=blade.id, utilization=u, mem_used=mem, net_used=net, power_kw=power)
    return load, rates, costs, violations


def evaluate(placement: Placement, inst: Instance) -> EvaluationReport:
    """Evaluate one placement against the full model chain."""
    placement.validate(inst.topology)
    region_factors = inst.region_factors()
    vms_by_blade: dict[str, list] = {b.id: [] for b in inst.topology.blades}
    for vm in inst.topology.vms:
        vms_by_blade[placement.vm_to_blade[vm.id]].append(vm)

    loads, rates, costs = {}, {}, {}
    violations: list[Violation] = []
    total_power = 0.0
    total_rates = IndicatorVector.zero()
    total_costs = CostBreakdown()
    dc_region = {dc.id: dc.region_tag for dc in inst.topology.datacenters}
    for blade in inst.topology.blades:
        factors = region_factors[dc_region[blade.datacenter_id]]
        load, rate, cost, viol = _evaluate_blade(
            blade,
            vms_by_blade[blade.id],
            placement.blade_freq[blade.id],
            factors,
            inst.tariff,
            inst.taxes,
            inst.timestamp,
        )
        loads[blade.id] = load
        rates[blade.id] = rate
        costs[blade.id] = cost
        violations.extend(viol)
        total_power += load.power_kw
        total_rates = total_rates.plus(rate)
        total_costs = total_costs.plus(cost)
    return EvaluationReport(
        blade_loads=loads,
        blade_rates=rates,
        blade_costs=costs,
        total_power_kw=total_power,
        total_rates=total_rates,
        total_costs=total_costs,
        violations=tuple(violations),
    )


def fitness(report: EvaluationReport) -> float:
    """Scalar objective to maximize: total virtual profit for feasible
    reports; a penalized value strictly below any feasible one otherwise."""
    if report.feasible:
        return report.total_costs.virtual_profit
    excess = sum(v.amount for v in report.violations)
    return INFEASIBLE_FITNESS_FLOOR - VIOLATION_PENALTY_WEIGHT * excess


def dominates(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    """Pareto dominance under minimization: a <= b everywhere, < somewhere."""
    if len(a) != len(b):
        raise InvalidParameterError("objective vectors differ in length")
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


class ParetoArchive:
    """Passive non-dominated archive over (objective vector, placement)."""

    def __init__(self):
        self._members: list[tuple[tuple[float, ...], Placement]] = []

    def offer(self, vector: tuple[float, ...], placement: Placement) -> bool:
        """Insert unless dominated; evict members the newcomer dominates.
        Returns True if the vector was admitted."""
        for existing, _ in self._members:
            if dominates(existing, vector) or existing == vector:
                return False
        self._members = [
            (v, p) for v, p in self._members if not dominates(vector, v)
        ]
        self._members.append((vector, placement))
        return True

    @property
    def members(self) -> list[tuple[tuple[float, ...], Placement]]:
        return list(self._members)

    def __len__(self) -> int:
        return len(self._members)


class SweepPoint(NamedTuple):
    u: float
    f_ghz: float
    real_profit: float
    virtual_profit: float
    rates: IndicatorVector
    is_current: bool


def tradeoff_sweep(
    blade: BladeSpec,
    inst: Instance,
    u_grid: list[float],
    current: tuple[float, float] | None = None,
) -> list[SweepPoint]:
    """Single-blade (utilization, frequency) grid evaluation driving the
    trade-off scatter figures.

    `current` is an optional (u, f_ghz) live state; the matching grid
    point is flagged, or an extra flagged point is appended if the live
    state falls off the grid.
    """
    if any(not 0 <= u <= 1 for u in u_grid):
        raise InvalidParameterError("u_grid values must be in [0, 1]")
    region = {dc.id: dc.region_tag for dc in inst.topology.datacenters}[blade.datacenter_id]
    factors = inst.region_factors()[region]

    def point(u: float, f: FrequencyLevel, flag: bool) -> SweepPoint:
        power = blade_power(blade, u, f)
        rates = footprint_rates(power, inst.tariff.pue, factors)
        costs = real_profit(blade, f, u, power, inst.tariff, inst.timestamp)
        costs = virtual_profit(costs, inst.taxes, blade.datacenter_id, rates)
        return SweepPoint(u, f.ghz, costs.real_profit, costs.virtual_profit, rates, flag)

    points = []
    matched = False
    for u in u_grid:
        for f in blade.levels:
            flag = current is not None and current == (u, f.ghz)
            matched = matched or flag
            points.append(point(u, f, flag))
    if current is not None and not matched:
        u, f_ghz = current
        level = next((lv for lv in blade.levels if lv.ghz == f_ghz), FrequencyLevel(f_ghz))
        points.append(point(u, level, True))
    return points
