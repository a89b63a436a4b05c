"""The control loop (sense -> model -> optimize -> actuate -> log) and the
event-sourced state it maintains.

Every state mutation goes through the append-only run log, so replaying a
log against the same configuration reconstructs the manager byte-exactly.
"""
from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .configio import AppConfig, placement_from_dict, placement_to_dict, taxes_from_dict
from .economics import VirtualTaxSchedule
from .errors import EcoCloudError, InfeasibleInstanceError, NoDataError
from .evaluation import EvaluationReport, Instance, evaluate
from .ga import GaParams, MlggaResult, ffd_at_max_frequency, mlgga_run
from .model import FrequencyLevel, Placement
from .sustainability import GridMixSample, sample_at
from .telemetry import LogStore, format_timestamp


@dataclass(frozen=True)
class ActuationStep:
    kind: str  # "migrate" | "set_frequency"
    target: str  # vm id for migrate, blade id for set_frequency
    value: str | float  # destination blade id, or frequency in GHz
    latency_s: float = 0.0


@dataclass(frozen=True)
class ActuationPlan:
    steps: tuple[ActuationStep, ...]

    def apply_to(self, placement: Placement) -> Placement:
        vm_to_blade = dict(placement.vm_to_blade)
        blade_freq = dict(placement.blade_freq)
        for step in self.steps:
            if step.kind == "migrate":
                vm_to_blade[step.target] = str(step.value)
            else:
                blade_freq[step.target] = FrequencyLevel(float(step.value))
        return Placement(vm_to_blade=vm_to_blade, blade_freq=blade_freq)

    def to_dicts(self) -> list[dict]:
        return [
            {"kind": s.kind, "target": s.target, "value": s.value, "latency_s": s.latency_s}
            for s in self.steps
        ]


def diff_placements(old: Placement, new: Placement, step_latency_s: float = 0.0) -> ActuationPlan:
    """One migrate step per VM whose blade changed, one frequency step per
    blade whose level changed; empty iff the placements are equal."""
    steps: list[ActuationStep] = []
    for vm_id in sorted(old.vm_to_blade):
        if old.vm_to_blade[vm_id] != new.vm_to_blade[vm_id]:
            steps.append(
                ActuationStep("migrate", vm_id, new.vm_to_blade[vm_id], step_latency_s)
            )
    for blade_id in sorted(old.blade_freq):
        if old.blade_freq[blade_id] != new.blade_freq[blade_id]:
            steps.append(
                ActuationStep(
                    "set_frequency", blade_id, new.blade_freq[blade_id].ghz, step_latency_s
                )
            )
    return ActuationPlan(steps=tuple(steps))


@dataclass
class Proposal:
    placement: Placement
    report: EvaluationReport
    plan: ActuationPlan
    seed: int
    generations: int
    applied: bool = False


class Manager:
    """Owns the mutable system state; one instance per control loop."""

    def __init__(self, config: AppConfig, log_path, step_latency_s: float = 0.0):
        self.config = config
        self.topology = config.topology
        self.tariff = config.tariff
        self.taxes = config.taxes
        self.ga_params = config.ga
        self.step_latency_s = step_latency_s
        self.clock: datetime = config.start_time
        self.tick_count = 0
        self.log = LogStore(log_path)
        self.pending: Proposal | None = None
        self.last_archive = None  # ParetoArchive from the latest optimizer run
        self.placement: Placement = ffd_at_max_frequency(self.topology).to_placement()
        self.mixes: dict[str, GridMixSample] = {}
        self._advance_mixes()
        self.latest_report: EvaluationReport = self._evaluate_current()

    # -- state assembly -------------------------------------------------

    def _advance_mixes(self) -> list[str]:
        """Step-hold each region's mix to the current clock; returns regions
        whose sample changed."""
        changed = []
        for region, series in self.config.mix_series.items():
            lookup = sample_at(series, self.clock)
            if self.mixes.get(region) is not lookup.sample:
                if region in self.mixes:
                    changed.append(region)
                self.mixes[region] = lookup.sample
        return changed

    def instance(self) -> Instance:
        return Instance(
            topology=self.topology,
            mixes=dict(self.mixes),
            tariff=self.tariff,
            taxes=self.taxes,
            timestamp=self.clock,
            indicator_table=self.config.indicator_table,
        )

    def _evaluate_current(self) -> EvaluationReport:
        if not self.topology.blades:
            raise NoDataError("topology has no blades")
        return evaluate(self.placement, self.instance())

    # -- control loop ----------------------------------------------------

    def control_tick(self) -> list[int]:
        """One sense -> model -> optimize -> actuate -> log cycle.  Returns
        the sequence numbers of the entries written."""
        self.tick_count += 1
        self.clock = self.config.start_time + timedelta(
            seconds=self.config.tick_interval_s * self.tick_count
        )
        seqs = []
        for region in self._advance_mixes():
            seqs.append(
                self.log.append(
                    "mix_update",
                    self.clock,
                    {"region": region, "shares": self.mixes[region].shares},
                )
            )
        if not self.topology.vms and not self.topology.blades:
            seqs.append(self.log.append("tick", self.clock, {"tick": self.tick_count, "empty": True}))
            return seqs
        self.latest_report = self._evaluate_current()
        seqs.append(self.log.append("tick", self.clock, self._tick_payload()))

        seed = self.ga_params.rng_seed + self.tick_count
        try:
            result = mlgga_run(
                self.instance(),
                GaParams(**{**self.ga_params.__dict__, "rng_seed": seed}),
            )
        except InfeasibleInstanceError as exc:
            seqs.append(
                self.log.append(
                    "optimize", self.clock, {"seed": seed, "error": str(exc)}
                )
            )
            return seqs
        self.last_archive = result.archive
        current_vp = self.latest_report.total_costs.virtual_profit
        gain = result.report.total_costs.virtual_profit - current_vp
        if result.report.feasible and gain > self.config.improvement_threshold:
            plan = diff_placements(self.placement, result.best, self.step_latency_s)
            proposal = Proposal(
                placement=result.best,
                report=result.report,
                plan=plan,
                seed=seed,
                generations=result.generations_run,
            )
            if self.config.auto_apply:
                seqs.append(self._log_optimize(result, seed))
                seqs.append(self._apply(proposal))
            else:
                self.pending = proposal
                seqs.append(self._log_optimize(result, seed))
        return seqs

    def _tick_payload(self) -> dict:
        return {
            "tick": self.tick_count,
            "time": format_timestamp(self.clock),
            "mixes": {r: s.shares for r, s in sorted(self.mixes.items())},
            "placement": placement_to_dict(self.placement),
            "totals": report_totals(self.latest_report),
        }

    def _log_optimize(self, result: MlggaResult, seed: int) -> int:
        return self.log.append(
            "optimize",
            self.clock,
            {
                "seed": seed,
                "generations": result.generations_run,
                "best_fitness": result.best_fitness,
                "trajectory": result.trajectory,
                "proposal": placement_to_dict(result.best),
            },
        )

    def _apply(self, proposal: Proposal) -> int:
        applied = proposal.plan.apply_to(self.placement)
        assert applied == proposal.placement
        self.placement = proposal.placement
        self.latest_report = self._evaluate_current()
        proposal.applied = True
        self.pending = None
        return self.log.append(
            "apply",
            self.clock,
            {
                "plan": proposal.plan.to_dicts(),
                "placement": placement_to_dict(self.placement),
                "totals": report_totals(self.latest_report),
            },
        )

    # -- operator commands ------------------------------------------------

    def propose(self) -> Proposal:
        """Run the optimizer once and stage the result without applying."""
        seed = self.ga_params.rng_seed + 10_000 + self.log._next_seq
        result = mlgga_run(
            self.instance(), GaParams(**{**self.ga_params.__dict__, "rng_seed": seed})
        )
        self.last_archive = result.archive
        plan = diff_placements(self.placement, result.best, self.step_latency_s)
        self.pending = Proposal(
            placement=result.best,
            report=result.report,
            plan=plan,
            seed=seed,
            generations=result.generations_run,
        )
        self._log_optimize(result, seed)
        return self.pending

    def apply_pending(self) -> Proposal:
        if self.pending is None:
            raise NoDataError("no pending proposal to apply")
        proposal = self.pending
        self._apply(proposal)
        return proposal

    def set_taxes(self, taxes: VirtualTaxSchedule) -> None:
        self.taxes = taxes
        self.latest_report = self._evaluate_current()
        self.log.append("tax_update", self.clock, {"taxes": taxes.to_per_kg()})

    # -- summaries and replay ----------------------------------------------

    def summary(self) -> dict:
        return {
            "time": format_timestamp(self.clock),
            "tick_count": self.tick_count,
            "placement": placement_to_dict(self.placement),
            "taxes": self.taxes.to_per_kg(),
            "mixes": {r: s.shares for r, s in sorted(self.mixes.items())},
            "totals": report_totals(self.latest_report),
            "feasible": self.latest_report.feasible,
        }

    def summary_bytes(self) -> bytes:
        return json.dumps(self.summary(), sort_keys=True).encode()

    def run_virtual(self, ticks: int) -> None:
        """Virtual-clock run: execute `ticks` control cycles back to back."""
        for _ in range(ticks):
            self.control_tick()

    def run_forever(self, multiplier: float = 1.0, max_ticks: int | None = None) -> None:
        """Wall-clock loop; `multiplier` compresses the simulated tick
        interval (e.g. 60 means one simulated minute per real second)."""
        done = 0
        while max_ticks is None or done < max_ticks:
            self.control_tick()
            done += 1
            _time.sleep(self.config.tick_interval_s / max(multiplier, 1e-9))


def report_totals(report: EvaluationReport) -> dict:
    c = report.total_costs
    return {
        "power_kw": report.total_power_kw,
        "rates_g_per_h": report.total_rates.as_dict(),
        "revenue": c.revenue,
        "energy_cost": c.energy_cost,
        "opex": c.opex,
        "corporate_tax": c.corporate_tax,
        "real_profit": c.real_profit,
        "virtual_tax_total": c.virtual_tax_total,
        "virtual_profit": c.virtual_profit,
        "violations": [list(v) for v in report.violations],
    }


def replay(config: AppConfig, log_path) -> Manager:
    """Rebuild a manager's state from its run log without re-running the
    optimizer: tick entries advance the clock/mix, apply entries move the
    placement, tax updates swap the schedule."""
    import os
    import tempfile

    scratch = tempfile.NamedTemporaryFile(prefix="ecocloud-replay-", suffix=".log", delete=False)
    scratch.close()
    os.unlink(scratch.name)
    mgr = Manager(config, scratch.name)
    source = LogStore(log_path)
    for entry in source.read():
        if entry.kind == "tick":
            if "empty" in entry.payload:
                mgr.tick_count = entry.payload["tick"]
                mgr.clock = entry.timestamp
                continue
            mgr.tick_count = entry.payload["tick"]
            mgr.clock = entry.timestamp
            mgr._advance_mixes()
            mgr.latest_report = mgr._evaluate_current()
        elif entry.kind == "apply":
            mgr.placement = placement_from_dict(entry.payload["placement"])
            mgr.latest_report = mgr._evaluate_current()
        elif entry.kind == "tax_update":
            mgr.taxes = taxes_from_dict(entry.payload["taxes"])
            mgr.latest_report = mgr._evaluate_current()
        elif entry.kind == "mix_update":
            pass  # mixes re-derive from the clock on the next tick entry
    os.unlink(mgr.log.path)
    return mgr
