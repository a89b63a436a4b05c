import random

import pytest

from conftest import MIX_PRESETS, make_instance, single_blade_instance
from ecocloud.economics import VirtualTaxSchedule
from ecocloud.errors import InfeasibleInstanceError, SearchSpaceTooLargeError
from ecocloud.evaluation import dominates, evaluate, fitness
from ecocloud.ga import GaParams, mlgga_run
from ecocloud.model import FrequencyLevel, Placement
from ecocloud.oracle import brute_force_optimum, state_space_size


class TestStateSpace:
    def test_one_blade_one_vm(self):
        inst = make_instance(1, [1.0])
        assert state_space_size(inst) == 1 * 4

    def test_two_blades_three_vms(self):
        inst = make_instance(2, [1.0, 1.0, 1.0])
        assert state_space_size(inst) == 2**3 * 4**2  # 128

    def test_guard_raises_without_sampling(self):
        inst = make_instance(4, [0.5] * 8)
        assert state_space_size(inst) > 10**4
        with pytest.raises(SearchSpaceTooLargeError):
            brute_force_optimum(inst, guard=10**4)


class TestOptimum:
    def test_two_point_search(self):
        inst = single_blade_instance(vm_demands=(4.0,))
        result = brute_force_optimum(inst)
        by_hand = max(
            (
                evaluate(
                    Placement({"vm1": "b1"}, {"b1": FrequencyLevel(g)}), inst
                ).total_costs.virtual_profit
                for g in (1.6, 1.73, 1.86, 2.0)
            ),
        )
        assert result.report.total_costs.virtual_profit == pytest.approx(by_hand)
        assert result.states_enumerated == 4

    def test_never_below_ga(self):
        rng = random.Random(7)
        for _ in range(5):
            from conftest import random_small_instance

            inst = random_small_instance(rng)
            oracle = brute_force_optimum(inst)
            ga = mlgga_run(inst, GaParams(rng_seed=1))
            assert (
                oracle.report.total_costs.virtual_profit
                >= ga.report.total_costs.virtual_profit - 1e-12
            )

    def test_infeasible_instance_raises(self):
        # one 6-core blade, two VMs that together exceed capacity at any level
        inst = single_blade_instance(vm_demands=(9.0, 9.0))
        with pytest.raises(InfeasibleInstanceError):
            brute_force_optimum(inst)

    def test_result_is_feasible_and_exact_on_fixture_scale(self):
        inst = make_instance(
            2,
            [4.8, 3.2, 1.6],
            region_shares={"r1": MIX_PRESETS["hydro"], "r2": MIX_PRESETS["gas"]},
            taxes=VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": 2.0}),
        )
        result = brute_force_optimum(inst)
        assert result.report.feasible
        assert result.states_enumerated == 128

    def test_feasible_min_rates_bound_every_feasible_state(self):
        inst = make_instance(2, [4.0, 2.0], region_shares={"r1": MIX_PRESETS["coal_heavy"]})
        result = brute_force_optimum(inst, include_pareto=True)
        for vec, _ in result.pareto.members:
            for i, rate in enumerate(vec[1:]):
                assert rate >= result.feasible_min_rates[i] - 1e-12
        assert result.report.total_rates.co2 >= result.feasible_min_rates.co2 - 1e-12


class TestParetoFront:
    def test_front_is_mutually_nondominated(self):
        inst = make_instance(
            2,
            [4.8, 3.2],
            region_shares={"r1": MIX_PRESETS["hydro"], "r2": MIX_PRESETS["gas"]},
        )
        result = brute_force_optimum(inst, include_pareto=True)
        members = result.pareto.members
        assert members
        for i, (a, _) in enumerate(members):
            for j, (b, _) in enumerate(members):
                if i != j:
                    assert not dominates(a, b)

    def test_best_vp_state_not_dominated_by_front(self):
        inst = make_instance(2, [4.8, 3.2], region_shares={"r1": MIX_PRESETS["gas"]})
        result = brute_force_optimum(inst, include_pareto=True)
        vec = result.report.objective_vector()
        assert not any(dominates(other, vec) for other, _ in result.pareto.members)
