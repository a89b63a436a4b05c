from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from conftest import LEVELS, T0
from ecocloud.economics import (
    CORE_HOUR_TARIFF,
    ZERO_TAXES,
    CostBreakdown,
    Tariff,
    VirtualTaxSchedule,
    energy_cost,
    real_profit,
    revenue,
    virtual_profit,
)
from ecocloud.errors import InvalidParameterError, InvalidScheduleError
from ecocloud.model import BladeSpec, FrequencyLevel
from ecocloud.sustainability import IndicatorVector

BLADE = BladeSpec(id="b1", datacenter_id="dc1", n_cores=6, levels=LEVELS)
F20 = FrequencyLevel(2.0)


def at_hour(hour: int) -> datetime:
    return datetime(2014, 3, 6, hour, 0, tzinfo=timezone.utc)


class TestTariff:
    def test_defaults(self):
        t = Tariff()
        assert (t.energy_price_normal, t.energy_price_peak) == (0.08, 0.16)
        assert t.peak_window == (11, 19)
        assert (t.revenue_rate, t.revenue_basis) == (0.08, "ghz_hour")
        assert (t.opex_rate, t.corporate_tax_rate, t.pue) == (0.02, 0.10, 1.2)

    def test_core_hour_preset(self):
        assert CORE_HOUR_TARIFF.revenue_basis == "core_hour"
        assert CORE_HOUR_TARIFF.revenue_rate == 0.10

    def test_peak_window_half_open(self):
        t = Tariff()
        assert t.energy_price_at(at_hour(10)) == 0.08
        assert t.energy_price_at(at_hour(11)) == 0.16
        assert t.energy_price_at(at_hour(18)) == 0.16
        assert t.energy_price_at(at_hour(19)) == 0.08

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            Tariff(energy_price_normal=-0.01)
        with pytest.raises(InvalidParameterError):
            Tariff(corporate_tax_rate=1.0)
        with pytest.raises(InvalidParameterError):
            Tariff(pue=0.99)
        with pytest.raises(InvalidParameterError):
            Tariff(revenue_basis="flat")


class TestRevenue:
    def test_ghz_hour_basis(self):
        assert revenue(BLADE, F20, 0.8, Tariff()) == pytest.approx(0.08 * 6 * 2.0 * 0.8)

    def test_core_hour_basis_ignores_load(self):
        assert revenue(BLADE, F20, 0.8, CORE_HOUR_TARIFF) == pytest.approx(0.10 * 6)
        assert revenue(BLADE, F20, 0.1, CORE_HOUR_TARIFF) == pytest.approx(0.10 * 6)

    def test_rejects_unclamped_utilization(self):
        with pytest.raises(InvalidParameterError):
            revenue(BLADE, F20, 1.2, Tariff())
        with pytest.raises(InvalidParameterError):
            revenue(BLADE, F20, -0.1, Tariff())


class TestEnergyCost:
    def test_off_peak_example(self):
        got = energy_cost(0.1018222, Tariff(), at_hour(20))
        assert got == pytest.approx(0.009775, abs=5e-7)

    def test_peak_doubles(self):
        off = energy_cost(0.1018222, Tariff(), at_hour(20))
        on = energy_cost(0.1018222, Tariff(), at_hour(12))
        assert on == pytest.approx(2 * off)

    def test_rejects_negative_power(self):
        with pytest.raises(InvalidParameterError):
            energy_cost(-1.0, Tariff(), T0)


class TestRealProfit:
    def test_breakdown_identity(self):
        b = real_profit(BLADE, F20, 0.8, 0.1018222, Tariff(), at_hour(20))
        pre_tax = b.revenue - b.energy_cost - b.opex
        assert b.corporate_tax == pytest.approx(0.10 * pre_tax)
        assert b.real_profit == pytest.approx(pre_tax - b.corporate_tax)
        assert b.virtual_tax_total == 0.0
        assert b.virtual_profit == b.real_profit

    def test_losses_not_negatively_taxed(self):
        lossy = Tariff(revenue_rate=0.0)
        b = real_profit(BLADE, F20, 0.8, 0.1018222, lossy, at_hour(20))
        assert b.corporate_tax == 0.0
        assert b.real_profit < 0

    def test_plus_adds_fieldwise(self):
        a = CostBreakdown(1, 2, 3, 4, 5, 6, 7)
        b = a.plus(a)
        assert b == CostBreakdown(2, 4, 6, 8, 10, 12, 14)


class TestVirtualTaxSchedule:
    def test_per_kg_conversion(self):
        taxes = VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": 2.0})
        assert taxes.rate("dc1", "co2") == pytest.approx(0.002)
        assert taxes.rate("dc1", "so2") == 0.0

    def test_per_datacenter_overrides_default(self):
        taxes = VirtualTaxSchedule.from_per_kg(
            defaults_per_kg={"co2": 2.0},
            per_datacenter_per_kg={"dc2": {"co2": 5.0}},
        )
        assert taxes.rate("dc1", "co2") == pytest.approx(0.002)
        assert taxes.rate("dc2", "co2") == pytest.approx(0.005)

    def test_round_trip_is_bit_exact(self):
        doc = {"co2": 0.123456789, "iron": 7.7}
        taxes = VirtualTaxSchedule.from_per_kg(
            defaults_per_kg=doc, per_datacenter_per_kg={"dc1": {"so2": 0.1}}
        )
        out = taxes.to_per_kg()
        assert out["default_per_kg"] == doc
        assert out["per_datacenter_per_kg"] == {"dc1": {"so2": 0.1}}

    def test_rejects_negative_rate(self):
        with pytest.raises(InvalidScheduleError):
            VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": -1.0})

    def test_rejects_unknown_indicator(self):
        with pytest.raises(InvalidScheduleError):
            VirtualTaxSchedule.from_per_kg(defaults_per_kg={"methane": 1.0})
        with pytest.raises(InvalidScheduleError):
            VirtualTaxSchedule.from_per_kg(per_datacenter_per_kg={"dc1": {"methane": 1.0}})


class TestVirtualProfit:
    RATES = IndicatorVector(10.0, 1.0, 0.5, 2.0, 0.1, 0.05)

    def test_levy_is_rate_times_mass(self):
        base = real_profit(BLADE, F20, 0.8, 0.1018222, Tariff(), at_hour(20))
        taxes = VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": 2.0, "iron": 1.0})
        out = virtual_profit(base, taxes, "dc1", self.RATES)
        expected_levy = 0.002 * 10.0 + 0.001 * 2.0
        assert out.virtual_tax_total == pytest.approx(expected_levy)
        assert out.virtual_profit == pytest.approx(base.real_profit - expected_levy)

    def test_never_alters_real_fields(self):
        base = real_profit(BLADE, F20, 0.8, 0.1018222, Tariff(), at_hour(20))
        taxes = VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": 1000.0})
        out = virtual_profit(base, taxes, "dc1", self.RATES)
        assert (out.revenue, out.energy_cost, out.opex, out.corporate_tax, out.real_profit) == (
            base.revenue,
            base.energy_cost,
            base.opex,
            base.corporate_tax,
            base.real_profit,
        )

    def test_zero_schedule_collapses_exactly(self):
        base = real_profit(BLADE, F20, 0.8, 0.1018222, Tariff(), at_hour(20))
        out = virtual_profit(base, ZERO_TAXES, "dc1", self.RATES)
        assert out.virtual_profit == base.real_profit  # bit-for-bit

    def test_rejects_negative_rates(self):
        with pytest.raises(InvalidParameterError):
            virtual_profit(CostBreakdown(), ZERO_TAXES, "dc1", self.RATES.scaled(-1.0))

    @given(
        u=st.floats(0.0, 1.0),
        co2_tax=st.floats(0.0, 100.0),
        hour=st.integers(0, 23),
    )
    def test_real_profit_invariant_under_any_schedule(self, u, co2_tax, hour):
        base = real_profit(BLADE, F20, u, 0.1, Tariff(), at_hour(hour))
        taxes = VirtualTaxSchedule.from_per_kg(defaults_per_kg={"co2": co2_tax})
        out = virtual_profit(base, taxes, "dc1", self.RATES)
        assert out.real_profit == base.real_profit
