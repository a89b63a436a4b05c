"""Round-trip (de)serialization of topology, placement, and the manager
configuration document (YAML)."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import yaml

from .economics import Tariff, VirtualTaxSchedule
from .errors import MixParseError
from .ga import GaParams
from .model import (
    BladeSpec,
    CloudTopology,
    Datacenter,
    FrequencyLevel,
    Placement,
    PowerModelCoefficients,
    VmSpec,
)
from .sustainability import MixSeries, SourceIndicatorRow, default_indicator_table, load_indicator_table
from .telemetry import format_timestamp, load_mix_file, parse_timestamp

CONFIG_VERSION = 1


# -- topology ---------------------------------------------------------------

def power_to_dict(c: PowerModelCoefficients) -> dict:
    if c.model_kind == "cubic":
        return {"kind": "cubic", "beta_kw": c.beta, "alpha_kw_per_ghz3": c.alpha_per_core}
    return {
        "kind": "empirical",
        "c0": c.c0,
        "c1": c.c1,
        "half_sat": c.half_sat,
        "c2": c.c2,
        "f_base": c.f_base,
        "f_span": c.f_span,
        "exponent": c.exponent,
    }


def power_from_dict(d: dict | None) -> PowerModelCoefficients:
    if not d:
        return PowerModelCoefficients()
    if d.get("kind") == "cubic":
        return PowerModelCoefficients(
            model_kind="cubic",
            beta=float(d.get("beta_kw", 0.0)),
            alpha_per_core=float(d.get("alpha_kw_per_ghz3", 0.0)),
        )
    defaults = PowerModelCoefficients()
    return PowerModelCoefficients(
        model_kind="empirical",
        c0=float(d.get("c0", defaults.c0)),
        c1=float(d.get("c1", defaults.c1)),
        half_sat=float(d.get("half_sat", defaults.half_sat)),
        c2=float(d.get("c2", defaults.c2)),
        f_base=float(d.get("f_base", defaults.f_base)),
        f_span=float(d.get("f_span", defaults.f_span)),
        exponent=float(d.get("exponent", defaults.exponent)),
    )


def topology_to_dict(topology: CloudTopology) -> dict:
    return {
        "datacenters": [
            {"id": dc.id, "region": dc.region_tag} for dc in topology.datacenters
        ],
        "blades": [
            {
                "id": b.id,
                "datacenter": b.datacenter_id,
                "cores": b.n_cores,
                "levels_ghz": [lv.ghz for lv in b.levels],
                "mem_capacity_mb": b.mem_capacity,
                "net_capacity_mbps": b.net_capacity,
                "power": power_to_dict(b.power),
            }
            for b in topology.blades
        ],
        "vms": [
            {
                "id": v.id,
                "cpu_demand_ghz": v.cpu_demand,
                "mem_demand_mb": v.mem_demand,
                "net_demand_mbps": v.net_demand,
            }
            for v in topology.vms
        ],
    }


def topology_from_dict(doc: dict) -> CloudTopology:
    default_blade = BladeSpec(id="_", datacenter_id="_", n_cores=1)
    blades = []
    for b in doc.get("blades", []):
        blades.append(
            BladeSpec(
                id=str(b["id"]),
                datacenter_id=str(b["datacenter"]),
                n_cores=int(b["cores"]),
                levels=tuple(
                    FrequencyLevel(float(g))
                    for g in b.get("levels_ghz", [lv.ghz for lv in default_blade.levels])
                ),
                power=power_from_dict(b.get("power")),
                mem_capacity=float(b.get("mem_capacity_mb", default_blade.mem_capacity)),
                net_capacity=float(b.get("net_capacity_mbps", default_blade.net_capacity)),
            )
        )
    return CloudTopology(
        datacenters=tuple(
            Datacenter(id=str(d["id"]), region_tag=str(d["region"]))
            for d in doc.get("datacenters", [])
        ),
        blades=tuple(blades),
        vms=tuple(
            VmSpec(
                id=str(v["id"]),
                cpu_demand=float(v["cpu_demand_ghz"]),
                mem_demand=float(v.get("mem_demand_mb", 0.0)),
                net_demand=float(v.get("net_demand_mbps", 0.0)),
            )
            for v in doc.get("vms", [])
        ),
    )


def load_topology(path) -> CloudTopology:
    with open(path) as fh:
        return topology_from_dict(yaml.safe_load(fh))


def save_topology(topology: CloudTopology, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(topology_to_dict(topology), fh, sort_keys=False)


# -- placement --------------------------------------------------------------

def placement_to_dict(placement: Placement) -> dict:
    return {
        "vm_to_blade": dict(sorted(placement.vm_to_blade.items())),
        "blade_freq_ghz": {
            b: lv.ghz for b, lv in sorted(placement.blade_freq.items())
        },
    }


def placement_from_dict(doc: dict) -> Placement:
    return Placement(
        vm_to_blade={str(k): str(v) for k, v in doc["vm_to_blade"].items()},
        blade_freq={
            str(k): FrequencyLevel(float(v)) for k, v in doc["blade_freq_ghz"].items()
        },
    )


# -- tariff / taxes ----------------------------------------------------------

def tariff_from_dict(d: dict | None) -> Tariff:
    d = d or {}
    defaults = Tariff()
    window = d.get("peak_window", list(defaults.peak_window))
    return Tariff(
        energy_price_normal=float(d.get("energy_price_normal", defaults.energy_price_normal)),
        energy_price_peak=float(d.get("energy_price_peak", defaults.energy_price_peak)),
        peak_window=(int(window[0]), int(window[1])),
        revenue_rate=float(d.get("revenue_rate", defaults.revenue_rate)),
        revenue_basis=str(d.get("revenue_basis", defaults.revenue_basis)),
        opex_rate=float(d.get("opex_rate", defaults.opex_rate)),
        corporate_tax_rate=float(d.get("corporate_tax_rate", defaults.corporate_tax_rate)),
        pue=float(d.get("pue", defaults.pue)),
    )


def tariff_to_dict(t: Tariff) -> dict:
    return {
        "energy_price_normal": t.energy_price_normal,
        "energy_price_peak": t.energy_price_peak,
        "peak_window": list(t.peak_window),
        "revenue_rate": t.revenue_rate,
        "revenue_basis": t.revenue_basis,
        "opex_rate": t.opex_rate,
        "corporate_tax_rate": t.corporate_tax_rate,
        "pue": t.pue,
    }


def taxes_from_dict(d: dict | None) -> VirtualTaxSchedule:
    d = d or {}
    return VirtualTaxSchedule.from_per_kg(
        defaults_per_kg=d.get("default_per_kg") or {},
        per_datacenter_per_kg=d.get("per_datacenter_per_kg") or {},
    )


# -- full configuration document ---------------------------------------------

@dataclass
class AppConfig:
    topology: CloudTopology
    tariff: Tariff
    taxes: VirtualTaxSchedule
    ga: GaParams
    mix_series: dict[str, MixSeries]
    indicator_table: list[SourceIndicatorRow]
    start_time: datetime
    tick_interval_s: float = 60.0
    improvement_threshold: float = 0.01
    auto_apply: bool = True


def ga_from_dict(d: dict | None) -> GaParams:
    d = d or {}
    defaults = GaParams()
    return GaParams(
        population_size=int(d.get("population_size", defaults.population_size)),
        max_generations=int(d.get("max_generations", defaults.max_generations)),
        stall_generations=int(d.get("stall_generations", defaults.stall_generations)),
        crossover_rate=float(d.get("crossover_rate", defaults.crossover_rate)),
        mutation_rate=float(d.get("mutation_rate", defaults.mutation_rate)),
        tournament_size=int(d.get("tournament_size", defaults.tournament_size)),
        elite_count=int(d.get("elite_count", defaults.elite_count)),
        rng_seed=int(d.get("rng_seed", defaults.rng_seed)),
    )


def load_config(path) -> AppConfig:
    """Load the manager configuration document; mix files and indicator
    table paths resolve relative to the document's directory."""
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise MixParseError(f"{path}: configuration document must be a mapping")
    topology = topology_from_dict(doc)
    manager = doc.get("manager") or {}
    mix_series: dict[str, MixSeries] = {}
    for region, mix_path in (doc.get("mix_files") or {}).items():
        resolved = mix_path if os.path.isabs(mix_path) else os.path.join(base, mix_path)
        series = load_mix_file(resolved)
        if series.region != region:
            raise MixParseError(
                f"{mix_path}: mix file region {series.region!r} does not match key {region!r}"
            )
        mix_series[region] = series
    table_path = doc.get("indicator_table")
    if table_path:
        resolved = table_path if os.path.isabs(table_path) else os.path.join(base, table_path)
        table = load_indicator_table(resolved)
    else:
        table = default_indicator_table()
    start_raw = manager.get("start_time")
    start_time = (
        parse_timestamp(str(start_raw))
        if start_raw
        else datetime(2014, 3, 6, 20, 0, tzinfo=timezone.utc)
    )
    return AppConfig(
        topology=topology,
        tariff=tariff_from_dict(doc.get("tariff")),
        taxes=taxes_from_dict(doc.get("taxes")),
        ga=ga_from_dict(doc.get("ga")),
        mix_series=mix_series,
        indicator_table=table,
        start_time=start_time,
        tick_interval_s=float(manager.get("tick_interval_s", 60.0)),
        improvement_threshold=float(manager.get("improvement_threshold", 0.01)),
        auto_apply=bool(manager.get("auto_apply", True)),
    )
