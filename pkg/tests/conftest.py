import os
import random
from datetime import datetime, timezone

import pytest

from ecocloud.economics import Tariff, VirtualTaxSchedule
from ecocloud.evaluation import Instance
from ecocloud.model import (
    BladeSpec,
    CloudTopology,
    Datacenter,
    FrequencyLevel,
    VmSpec,
)
from ecocloud.sustainability import GridMixSample, default_indicator_table

T0 = datetime(2014, 3, 6, 20, 0, tzinfo=timezone.utc)

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)

LEVELS = tuple(FrequencyLevel(g) for g in (1.6, 1.73, 1.86, 2.0))

MIX_PRESETS = {
    "coal_heavy": {"coal": 0.6, "gas": 0.2, "hydro": 0.2},
    "hydro": {"hydro": 1.0},
    "gas": {"gas": 1.0},
    "solar": {"solar": 1.0},
    "nuclear_mix": {"nuclear": 0.7, "hydro": 0.2, "wind": 0.1},
    "ontario_evening": {"nuclear": 0.58, "hydro": 0.22, "gas": 0.11, "wind": 0.04, "coal": 0.05},
}


def mix(region: str, shares: dict, ts=T0) -> GridMixSample:
    return GridMixSample(timestamp=ts, region=region, shares=shares)


def single_blade_instance(
    vm_demands=(9.6,),
    taxes: VirtualTaxSchedule | None = None,
    tariff: Tariff | None = None,
    shares: dict | None = None,
) -> Instance:
    topo = CloudTopology(
        datacenters=(Datacenter("dc1", "r1"),),
        blades=(BladeSpec(id="b1", datacenter_id="dc1", n_cores=6, levels=LEVELS),),
        vms=tuple(
            VmSpec(id=f"vm{i+1}", cpu_demand=d) for i, d in enumerate(vm_demands)
        ),
    )
    return Instance(
        topology=topo,
        mixes={"r1": mix("r1", shares or MIX_PRESETS["hydro"])},
        tariff=tariff or Tariff(),
        taxes=taxes or VirtualTaxSchedule(),
        timestamp=T0,
    )


def make_instance(
    n_blades: int,
    vm_demands,
    region_shares: dict[str, dict] | None = None,
    blades_per_dc: int | None = None,
    taxes: VirtualTaxSchedule | None = None,
    tariff: Tariff | None = None,
    mem_capacity: float = 8192.0,
    vm_mem=None,
) -> Instance:
    """Multi-datacenter instance; blades round-robin across the regions."""
    region_shares = region_shares or {"r1": MIX_PRESETS["hydro"]}
    regions = list(region_shares)
    n_dcs = len(regions)
    dcs = tuple(Datacenter(f"dc{i+1}", regions[i]) for i in range(n_dcs))
    blades = tuple(
        BladeSpec(
            id=f"b{i+1}",
            datacenter_id=dcs[i % n_dcs].id,
            n_cores=6,
            levels=LEVELS,
            mem_capacity=mem_capacity,
        )
        for i in range(n_blades)
    )
    vm_mem = vm_mem or [0.0] * len(vm_demands)
    vms = tuple(
        VmSpec(id=f"vm{i+1}", cpu_demand=d, mem_demand=m)
        for i, (d, m) in enumerate(zip(vm_demands, vm_mem))
    )
    return Instance(
        topology=CloudTopology(datacenters=dcs, blades=blades, vms=vms),
        mixes={r: mix(r, s) for r, s in region_shares.items()},
        tariff=tariff or Tariff(),
        taxes=taxes or VirtualTaxSchedule(),
        timestamp=T0,
    )


def random_small_instance(rng: random.Random) -> Instance:
    """Random instance inside the brute-force guard (<= 10^6 states)."""
    n_blades = rng.choice([2, 3, 4])
    n_vms = rng.randint(2, {2: 8, 3: 8, 4: 5}[n_blades])
    n_regions = rng.randint(1, 2)
    preset_names = rng.sample(sorted(MIX_PRESETS), n_regions)
    region_shares = {f"r{i+1}": MIX_PRESETS[name] for i, name in enumerate(preset_names)}
    demands = [round(rng.uniform(0.5, 3.5), 2) for _ in range(n_vms)]
    vm_mem = [float(rng.choice([256, 512, 1024, 2048])) for _ in range(n_vms)]
    carbon = rng.choice([0.0, 0.5, 2.0, 5.0])
    taxes = VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": carbon})
    return make_instance(
        n_blades,
        demands,
        region_shares=region_shares,
        taxes=taxes,
        vm_mem=vm_mem,
    )


@pytest.fixture
def hydro_instance() -> Instance:
    return single_blade_instance()


@pytest.fixture
def indicator_table():
    return default_indicator_table()
