"""Multi-level grouping genetic algorithm over the placement x frequency
space.

Chromosomes are grouping-structured: each datacenter is a second-level
group of blades, each blade carries its VM id set plus one frequency gene.
Crossover transplants whole datacenter groups between parents; mutation
dissolves a blade, jitters a frequency, or dissolves a datacenter.
Reinsertion of displaced VMs is first-fit in descending cpu-demand order
(ties by VM id) over blades in id order, so runs are deterministic for a
fixed seed.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace

from .errors import InfeasibleInstanceError
from .evaluation import EvaluationReport, Instance, ParetoArchive, evaluate, fitness
from .model import BladeSpec, CloudTopology, FrequencyLevel, Placement, VmSpec


@dataclass
class GaParams:
    population_size: int = 50
    max_generations: int = 200
    stall_generations: int = 30
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    tournament_size: int = 2
    elite_count: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class Chromosome:
    """Grouping encoding: per-blade VM id sets plus frequency genes."""

    vms_by_blade: dict[str, set[str]]
    freq_by_blade: dict[str, FrequencyLevel]

    def copy(self) -> "Chromosome":
        return Chromosome(
            vms_by_blade={b: set(vms) for b, vms in self.vms_by_blade.items()},
            freq_by_blade=dict(self.freq_by_blade),
        )

    def to_placement(self) -> Placement:
        vm_to_blade = {}
        for blade_id in sorted(self.vms_by_blade):
            for vm_id in sorted(self.vms_by_blade[blade_id]):
                vm_to_blade[vm_id] = blade_id
        return Placement(
            vm_to_blade=vm_to_blade,
            blade_freq={b: self.freq_by_blade[b] for b in sorted(self.freq_by_blade)},
        )

    @classmethod
    def from_placement(cls, topology: CloudTopology, placement: Placement) -> "Chromosome":
        vms_by_blade = {b.id: set() for b in topology.blades}
        for vm_id, blade_id in placement.vm_to_blade.items():
            vms_by_blade[blade_id].add(vm_id)
        return cls(
            vms_by_blade=vms_by_blade,
            freq_by_blade=dict(placement.blade_freq),
        )


def _fits(blade: BladeSpec, current: list[VmSpec], vm: VmSpec, f: FrequencyLevel) -> bool:
    cpu = sum(v.cpu_demand for v in current) + vm.cpu_demand
    mem = sum(v.mem_demand for v in current) + vm.mem_demand
    net = sum(v.net_demand for v in current) + vm.net_demand
    return (
        cpu <= blade.n_cores * f.ghz
        and mem <= blade.mem_capacity
        and net <= blade.net_capacity
    )


def _first_fit_insert(
    chromo: Chromosome, topology: CloudTopology, vms: list[VmSpec],
    exclude_blade: str | None = None, rng: random.Random | None = None,
) -> None:
    """Insert `vms` first-fit in descending cpu-demand order (ties by id).
    The blade scan order is id order, or a seed-deterministic shuffle when
    `rng` is given (keeps genetic repair from always funneling VMs to the
    same blades).  A VM that fits nowhere lands on the first candidate
    blade; the resulting violation is penalized by fitness, never raised."""
    order = sorted(vms, key=lambda v: (-v.cpu_demand, v.id))
    blades = sorted(
        (b for b in topology.blades if b.id != exclude_blade), key=lambda b: b.id
    )
    if not blades:  # single-blade topology: nowhere else to go
        blades = sorted(topology.blades, key=lambda b: b.id)
    if rng is not None:
        rng.shuffle(blades)
    for vm in order:
        target = None
        for blade in blades:
            current = [topology.vm(v) for v in chromo.vms_by_blade[blade.id]]
            if _fits(blade, current, vm, chromo.freq_by_blade[blade.id]):
                target = blade.id
                break
        if target is None:
            target = blades[0].id
        chromo.vms_by_blade[target].add(vm.id)


def ffd_at_max_frequency(topology: CloudTopology) -> Chromosome:
    """First-fit-decreasing packing with every blade at its top level; the
    feasible anchor of the initial population."""
    chromo = Chromosome(
        vms_by_blade={b.id: set() for b in topology.blades},
        freq_by_blade={b.id: b.max_level for b in topology.blades},
    )
    _first_fit_insert(chromo, topology, list(topology.vms))
    return chromo


def random_chromosome(topology: CloudTopology, rng: random.Random) -> Chromosome:
    blades = sorted(topology.blades, key=lambda b: b.id)
    chromo = Chromosome(
        vms_by_blade={b.id: set() for b in blades},
        freq_by_blade={b.id: rng.choice(b.levels) for b in blades},
    )
    for vm in topology.vms:
        chromo.vms_by_blade[rng.choice(blades).id].add(vm.id)
    return chromo


def mlgga_crossover(
    parent_a: Chromosome,
    parent_b: Chromosome,
    topology: CloudTopology,
    rng: random.Random,
) -> Chromosome:
    """Group crossover: transplant a non-empty subset of whole datacenter
    groups (blade VM sets + frequency genes) from the donor `parent_b` into
    a copy of `parent_a`, then repair duplicates and orphans.

    With a single datacenter the only available subset is the whole set and
    the child equals the donor (degenerate boundary case).
    """
    dc_ids = sorted(dc.id for dc in topology.datacenters)
    if len(dc_ids) == 1:
        return parent_b.copy()
    size = rng.randint(1, len(dc_ids) - 1)
    transplanted_dcs = set(rng.sample(dc_ids, size))

    child = parent_a.copy()
    transplanted_blades = {
        b.id for b in topology.blades if b.datacenter_id in transplanted_dcs
    }
    transplanted_vms: set[str] = set()
    for blade_id in transplanted_blades:
        child.vms_by_blade[blade_id] = set(parent_b.vms_by_blade[blade_id])
        child.freq_by_blade[blade_id] = parent_b.freq_by_blade[blade_id]
        transplanted_vms |= child.vms_by_blade[blade_id]

    # Drop VMs the transplant duplicated from the untouched groups.
    for blade_id, vm_ids in child.vms_by_blade.items():
        if blade_id not in transplanted_blades:
            vm_ids -= transplanted_vms

    placed = set().union(*child.vms_by_blade.values()) if child.vms_by_blade else set()
    orphans = [vm for vm in topology.vms if vm.id not in placed]
    _first_fit_insert(child, topology, orphans, rng=rng)
    return child


def mlgga_mutate(
    chromo: Chromosome, topology: CloudTopology, rng: random.Random
) -> Chromosome:
    """Apply exactly one of: blade dissolve, frequency jitter, datacenter
    dissolve (chosen uniformly)."""
    child = chromo.copy()
    op = rng.randrange(3)
    if op == 0:  # blade dissolve
        blade_id = rng.choice(sorted(child.vms_by_blade))
        vms = [topology.vm(v) for v in sorted(child.vms_by_blade[blade_id])]
        child.vms_by_blade[blade_id] = set()
        _first_fit_insert(child, topology, vms, exclude_blade=blade_id, rng=rng)
    elif op == 1:  # frequency jitter
        blade = rng.choice(sorted(topology.blades, key=lambda b: b.id))
        child.freq_by_blade[blade.id] = rng.choice(blade.levels)
    else:  # datacenter dissolve
        dc_id = rng.choice(sorted(dc.id for dc in topology.datacenters))
        vms: list[VmSpec] = []
        for blade in topology.blades_of(dc_id):
            vms.extend(topology.vm(v) for v in sorted(child.vms_by_blade[blade.id]))
            child.vms_by_blade[blade.id] = set()
        _first_fit_insert(child, topology, vms, rng=rng)
    return child


def _optimize_levels(
    chromo: Chromosome,
    blade_ids: tuple[str, ...],
    topology: CloudTopology,
    score: "callable",
) -> tuple[float, Chromosome]:
    """Scan every frequency combination of `blade_ids` (other genes fixed)
    and return the fittest variant; ties resolve to the lowest levels."""
    best_fit = float("-inf")
    best_chromo = chromo
    level_sets = [topology.blade(b).levels for b in blade_ids]
    for combo in itertools.product(*level_sets):
        cand = chromo.copy()
        for blade_id, level in zip(blade_ids, combo):
            cand.freq_by_blade[blade_id] = level
        fit = score(cand)
        if fit > best_fit:
            best_fit, best_chromo = fit, cand
    return best_fit, best_chromo


def local_refine(
    chromo: Chromosome, topology: CloudTopology, score: "callable"
) -> tuple[float, Chromosome]:
    """Deterministic first-improvement hill climb around `chromo`: single-VM
    relocations and pairwise VM swaps, each combined with an exhaustive
    frequency re-optimization of the one or two blades it touches.  The
    grouping operators move whole groups; this polishes the fine-grained
    remainder they cannot reach."""
    best = chromo.copy()
    best_fit, best = _optimize_levels(
        best, tuple(sorted(best.freq_by_blade)), topology, score
    )
    blade_ids = sorted(best.freq_by_blade)
    vm_ids = sorted(vm.id for vm in topology.vms)
    improved = True
    while improved:
        improved = False
        blade_of = {v: b for b, vs in best.vms_by_blade.items() for v in vs}
        for vm_id in vm_ids:
            src = blade_of[vm_id]
            for dst in blade_ids:
                if dst == src:
                    continue
                cand = best.copy()
                cand.vms_by_blade[src].discard(vm_id)
                cand.vms_by_blade[dst].add(vm_id)
                fit, cand = _optimize_levels(cand, (src, dst), topology, score)
                if fit > best_fit:
                    best_fit, best, improved = fit, cand, True
                    blade_of = {v: b for b, vs in best.vms_by_blade.items() for v in vs}
                    break  # src is stale once the VM has moved
        for i, vm_a in enumerate(vm_ids):
            for vm_b in vm_ids[i + 1 :]:
                ba, bb = blade_of[vm_a], blade_of[vm_b]
                if ba == bb:
                    continue
                cand = best.copy()
                cand.vms_by_blade[ba].discard(vm_a)
                cand.vms_by_blade[bb].add(vm_a)
                cand.vms_by_blade[bb].discard(vm_b)
                cand.vms_by_blade[ba].add(vm_b)
                fit, cand = _optimize_levels(cand, (ba, bb), topology, score)
                if fit > best_fit:
                    best_fit, best, improved = fit, cand, True
                    blade_of = {v: b for b, vs in best.vms_by_blade.items() for v in vs}
    return best_fit, best


def _individually_placeable(topology: CloudTopology) -> None:
    for vm in topology.vms:
        ok = any(
            vm.cpu_demand <= b.n_cores * b.max_level.ghz
            and vm.mem_demand <= b.mem_capacity
            and vm.net_demand <= b.net_capacity
            for b in topology.blades
        )
        if not ok:
            raise InfeasibleInstanceError(f"vm {vm.id} fits on no blade at any frequency")


@dataclass
class MlggaResult:
    best: Placement
    report: EvaluationReport
    archive: ParetoArchive
    generations_run: int
    seed: int
    best_fitness: float
    trajectory: list[float] = field(default_factory=list)


def mlgga_run(inst: Instance, params: GaParams | None = None) -> MlggaResult:
    """Single-objective MLGGA maximizing virtual profit, with a passive
    non-dominated archive over every evaluated feasible individual.
    Deterministic for a fixed seed."""
    params = params or GaParams()
    topology = inst.topology
    if not topology.blades:
        raise InfeasibleInstanceError("instance has no blades")
    _individually_placeable(topology)
    rng = random.Random(params.rng_seed)

    population = [ffd_at_max_frequency(topology)]
    population += [
        random_chromosome(topology, rng) for _ in range(params.population_size - 1)
    ]

    archive = ParetoArchive()
    best_chromo: Chromosome | None = None
    best_fit = float("-inf")
    best_report: EvaluationReport | None = None
    trajectory: list[float] = []
    stall = 0
    generations = 0

    def assess(chromo: Chromosome) -> tuple[float, EvaluationReport]:
        placement = chromo.to_placement()
        report = evaluate(placement, inst)
        if report.feasible:
            archive.offer(report.objective_vector(), placement)
        return fitness(report), report

    for generation in range(params.max_generations):
        generations = generation + 1
        scored = []
        improved = False
        for chromo in population:
            fit, report = assess(chromo)
            scored.append((fit, chromo))
            if fit > best_fit:
                best_fit, best_chromo, best_report = fit, chromo, report
                improved = True
        if improved:
            # Memetic polish: hill-climb the new incumbent before it seeds
            # the next generation as the elite.
            refined_fit, refined = local_refine(
                best_chromo, topology, lambda c: assess(c)[0]
            )
            if refined_fit > best_fit:
                best_fit, best_chromo = refined_fit, refined
                _, best_report = assess(refined)
                idx = max(range(len(scored)), key=lambda j: scored[j][0])
                scored[idx] = (refined_fit, refined)
        trajectory.append(best_fit)
        stall = 0 if improved else stall + 1
        if stall >= params.stall_generations:
            break

        scored.sort(key=lambda pair: pair[0], reverse=True)

        def tournament() -> Chromosome:
            picks = [rng.randrange(len(scored)) for _ in range(params.tournament_size)]
            return scored[min(picks)][1]  # scored is fitness-descending

        next_pop = [pair[1] for pair in scored[: params.elite_count]]
        while len(next_pop) < params.population_size:
            pa, pb = tournament(), tournament()
            if rng.random() < params.crossover_rate:
                child = mlgga_crossover(pa, pb, topology, rng)
            else:
                child = pa.copy()
            if rng.random() < params.mutation_rate:
                child = mlgga_mutate(child, topology, rng)
            next_pop.append(child)
        population = next_pop

    assert best_chromo is not None
    return MlggaResult(
        best=best_chromo.to_placement(),
        report=best_report,
        archive=archive,
        generations_run=generations,
        seed=params.rng_seed,
        best_fitness=best_fit,
        trajectory=trajectory,
    )
