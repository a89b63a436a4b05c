"""Physical inventory types, utilization accounting, and blade power/energy models.

Units: power in kW, energy in kWh, time in hours, frequencies in GHz,
memory in MB, network in Mbps.  VM CPU demand is expressed in GHz of
instruction throughput, so a blade's utilization scales inversely with
the frequency its cores run at.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidFrequencyError, InvalidParameterError, InvalidPlacementError

# Discrete DVFS levels observed on the reference blade hardware.
DEFAULT_LEVELS_GHZ = (1.6, 1.73, 1.86, 2.0)


@dataclass(frozen=True, order=True)
class FrequencyLevel:
    ghz: float

    def __post_init__(self):
        if self.ghz <= 0:
            raise InvalidParameterError(f"frequency must be positive, got {self.ghz}")


@dataclass(frozen=True)
class PowerModelCoefficients:
    """Coefficients for either the empirical or the cubic blade power model."""

    model_kind: str = "empirical"  # "empirical" | "cubic"
    # empirical model: c0 + c1*(u/(u+half_sat)) + c2*((f-f_base)/f_span)^exponent * u
    c0: float = 0.054
    c1: float = 0.043
    half_sat: float = 0.1
    c2: float = 0.012
    f_base: float = 1.6
    f_span: float = 0.4
    exponent: float = 1.5
    # cubic model: beta + sum_cores alpha_per_core * f^3
    beta: float = 0.0
    alpha_per_core: float = 0.0

    def __post_init__(self):
        if self.model_kind not in ("empirical", "cubic"):
            raise InvalidParameterError(f"unknown power model kind {self.model_kind!r}")
        if self.model_kind == "empirical":
            if self.f_span <= 0:
                raise InvalidParameterError("f_span must be > 0")
            if self.half_sat <= 0:
                raise InvalidParameterError("half_sat must be > 0")


EMPIRICAL_DEFAULTS = PowerModelCoefficients()


@dataclass(frozen=True)
class BladeSpec:
    id: str
    datacenter_id: str
    n_cores: int
    levels: tuple[FrequencyLevel, ...] = tuple(FrequencyLevel(g) for g in DEFAULT_LEVELS_GHZ)
    power: PowerModelCoefficients = EMPIRICAL_DEFAULTS
    mem_capacity: float = 49152.0
    net_capacity: float = 10000.0

    def __post_init__(self):
        if self.n_cores < 1:
            raise InvalidParameterError(f"blade {self.id}: n_cores must be >= 1")
        if not self.levels:
            raise InvalidParameterError(f"blade {self.id}: empty frequency level set")
        ghzs = [lv.ghz for lv in self.levels]
        if sorted(set(ghzs)) != ghzs:
            raise InvalidParameterError(
                f"blade {self.id}: levels must be strictly increasing and duplicate-free"
            )
        if self.mem_capacity <= 0 or self.net_capacity <= 0:
            raise InvalidParameterError(f"blade {self.id}: capacities must be positive")

    @property
    def max_level(self) -> FrequencyLevel:
        return self.levels[-1]


@dataclass(frozen=True)
class VmSpec:
    id: str
    cpu_demand: float  # GHz of aggregate instruction throughput
    mem_demand: float = 0.0  # MB
    net_demand: float = 0.0  # Mbps

    def __post_init__(self):
        if min(self.cpu_demand, self.mem_demand, self.net_demand) < 0:
            raise InvalidParameterError(f"vm {self.id}: demands must be >= 0")


@dataclass(frozen=True)
class Datacenter:
    id: str
    region_tag: str


@dataclass(frozen=True)
class CloudTopology:
    datacenters: tuple[Datacenter, ...]
    blades: tuple[BladeSpec, ...]
    vms: tuple[VmSpec, ...]

    def __post_init__(self):
        for kind, ids in (
            ("datacenter", [d.id for d in self.datacenters]),
            ("blade", [b.id for b in self.blades]),
            ("vm", [v.id for v in self.vms]),
        ):
            if len(set(ids)) != len(ids):
                raise InvalidParameterError(f"duplicate {kind} ids in topology")
        dc_ids = {d.id for d in self.datacenters}
        for b in self.blades:
            if b.datacenter_id not in dc_ids:
                raise InvalidParameterError(
                    f"blade {b.id} references unknown datacenter {b.datacenter_id}"
                )

    def blade(self, blade_id: str) -> BladeSpec:
        for b in self.blades:
            if b.id == blade_id:
                return b
        raise InvalidPlacementError(f"unknown blade id {blade_id!r}")

    def vm(self, vm_id: str) -> VmSpec:
        for v in self.vms:
            if v.id == vm_id:
                return v
        raise InvalidPlacementError(f"unknown vm id {vm_id!r}")

    def blades_of(self, dc_id: str) -> list[BladeSpec]:
        return [b for b in self.blades if b.datacenter_id == dc_id]


@dataclass(frozen=True)
class Placement:
    """Decision variables: VM -> blade map plus one frequency per blade."""

    vm_to_blade: dict[str, str]
    blade_freq: dict[str, FrequencyLevel]

    def validate(self, topology: CloudTopology) -> None:
        blade_ids = {b.id for b in topology.blades}
        vm_ids = {v.id for v in topology.vms}
        if set(self.vm_to_blade) != vm_ids:
            raise InvalidPlacementError(
                "placement must map every VM exactly once; "
                f"got {sorted(self.vm_to_blade)} for VMs {sorted(vm_ids)}"
            )
        for vm_id, blade_id in self.vm_to_blade.items():
            if blade_id not in blade_ids:
                raise InvalidPlacementError(f"vm {vm_id} mapped to unknown blade {blade_id}")
        if set(self.blade_freq) != blade_ids:
            raise InvalidPlacementError("placement must assign a frequency to every blade")
        for b in topology.blades:
            if self.blade_freq[b.id] not in b.levels:
                raise InvalidFrequencyError(
                    f"blade {b.id}: frequency {self.blade_freq[b.id].ghz} not in level set"
                )


@dataclass(frozen=True)
class BladeLoad:
    blade_id: str
    utilization: float  # may exceed 1; >1 marks infeasibility downstream
    mem_used: float
    net_used: float
    power_kw: float


def blade_utilization(blade: BladeSpec, assigned: list[VmSpec], f: FrequencyLevel) -> float:
    """CPU utilization of `blade` hosting `assigned` at frequency `f`.

    May exceed 1; callers treat > 1 as a constraint violation.
    """
    if f not in blade.levels:
        raise InvalidFrequencyError(
            f"blade {blade.id}: frequency {f.ghz} not in level set "
            f"{[lv.ghz for lv in blade.levels]}"
        )
    total = sum(vm.cpu_demand for vm in assigned)
    return total / (blade.n_cores * f.ghz)


def empirical_power(u: float, f: FrequencyLevel, c: PowerModelCoefficients) -> float:
    """Blade power (kW) from the empirically fitted model.

    `u` is clamped to [0, 1] for the power computation only; over-commitment
    is reported through constraint checks, not through the power model.
    """
    if c.model_kind != "empirical":
        raise InvalidParameterError("empirical_power requires empirical coefficients")
    if u < 0:
        raise InvalidParameterError(f"utilization must be >= 0, got {u}")
    if f.ghz < c.f_base:
        raise InvalidParameterError(
            f"frequency {f.ghz} below model base {c.f_base}: fractional power of a negative base"
        )
    uc = min(u, 1.0)
    load_term = c.c1 * (uc / (uc + c.half_sat))
    freq_term = c.c2 * ((f.ghz - c.f_base) / c.f_span) ** c.exponent * uc
    return c.c0 + load_term + freq_term


def cubic_power(per_core_f: list[float], c: PowerModelCoefficients) -> float:
    """Blade power (kW) from the classic cubic model (pluggable alternative;
    fits the reference hardware poorly, hence not the default)."""
    if c.model_kind != "cubic":
        raise InvalidParameterError("cubic_power requires cubic coefficients")
    if any(f < 0 for f in per_core_f):
        raise InvalidParameterError("negative core frequency")
    return c.beta + sum(c.alpha_per_core * f**3 for f in per_core_f)


def blade_power(blade: BladeSpec, u: float, f: FrequencyLevel) -> float:
    """Dispatch to the blade's configured power model."""
    if blade.power.model_kind == "empirical":
        return empirical_power(u, f, blade.power)
    return cubic_power([f.ghz] * blade.n_cores, blade.power)


def total_energy(e_it: float, pue: float) -> float:
    """Facility energy (kWh) for a given IT energy via the PUE multiplier."""
    if pue < 1:
        raise InvalidParameterError(f"PUE must be >= 1, got {pue}")
    return e_it * pue


def interval_energy(power_kw: float, dt: float) -> float:
    """Energy (kWh) of constant power over a tick of `dt` hours."""
    if dt < 0:
        raise InvalidParameterError(f"negative interval {dt}")
    return power_kw * dt
