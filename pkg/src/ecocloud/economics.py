"""Tariffs, revenue, operating cost, corporate tax, real profit, and the
virtual-tax-adjusted virtual profit that the optimizer maximizes.

All money is USD; all flows are hourly rates (USD/h).  Virtual taxes are
stored in USD per gram internally; the configuration surface accepts USD
per kg and divides by 1000 on load.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime

from .errors import InvalidParameterError, InvalidScheduleError
from .model import BladeSpec, FrequencyLevel
from .sustainability import INDICATORS, IndicatorVector

USD_PER_KG_TO_USD_PER_G = 1e-3

REVENUE_BASIS_GHZ_HOUR = "ghz_hour"  # USD per GHz-hour utilized
REVENUE_BASIS_CORE_HOUR = "core_hour"  # flat USD per provisioned core-hour


@dataclass(frozen=True)
class Tariff:
    energy_price_normal: float = 0.08
    energy_price_peak: float = 0.16
    peak_window: tuple[int, int] = (11, 19)  # [start, end) local hours
    revenue_rate: float = 0.08
    revenue_basis: str = REVENUE_BASIS_GHZ_HOUR
    opex_rate: float = 0.02  # USD per provisioned core-hour
    corporate_tax_rate: float = 0.10
    pue: float = 1.2

    def __post_init__(self):
        if min(self.energy_price_normal, self.energy_price_peak, self.revenue_rate, self.opex_rate) < 0:
            raise InvalidParameterError("tariff prices must be >= 0")
        if not 0 <= self.corporate_tax_rate < 1:
            raise InvalidParameterError("corporate tax rate must be in [0, 1)")
        if self.pue < 1:
            raise InvalidParameterError("PUE must be >= 1")
        if self.revenue_basis not in (REVENUE_BASIS_GHZ_HOUR, REVENUE_BASIS_CORE_HOUR):
            raise InvalidParameterError(f"unknown revenue basis {self.revenue_basis!r}")

    def energy_price_at(self, t: datetime) -> float:
        start, end = self.peak_window
        return self.energy_price_peak if start <= t.hour < end else self.energy_price_normal


# The flat per-core-hour billing preset (the alternative revenue model).
CORE_HOUR_TARIFF = Tariff(revenue_rate=0.10, revenue_basis=REVENUE_BASIS_CORE_HOUR)


@dataclass(frozen=True)
class VirtualTaxSchedule:
    """Per-(datacenter, indicator) virtual tax rates in USD per gram."""

    rates: dict[tuple[str, str], float] = field(default_factory=dict)
    defaults: dict[str, float] = field(default_factory=dict)
    # Original USD-per-kg document, kept verbatim so serialize/parse round
    # trips are bit-exact (kg<->g float conversion is not invertible).
    per_kg_doc: dict | None = None

    def __post_init__(self):
        for key, rate in list(self.rates.items()) + list(self.defaults.items()):
            if rate < 0:
                raise InvalidScheduleError(f"negative virtual tax rate for {key}: {rate}")
        for _, indicator in self.rates:
            if indicator not in INDICATORS:
                raise InvalidScheduleError(f"unknown indicator {indicator!r}")
        for indicator in self.defaults:
            if indicator not in INDICATORS:
                raise InvalidScheduleError(f"unknown indicator {indicator!r}")

    def rate(self, datacenter_id: str, indicator: str) -> float:
        if (datacenter_id, indicator) in self.rates:
            return self.rates[(datacenter_id, indicator)]
        return self.defaults.get(indicator, 0.0)

    @classmethod
    def from_per_kg(
        cls,
        defaults_per_kg: dict[str, float] | None = None,
        per_datacenter_per_kg: dict[str, dict[str, float]] | None = None,
    ) -> "VirtualTaxSchedule":
        """Build from the USD-per-kg convenience form used at the interface."""
        defaults = {
            ind: rate * USD_PER_KG_TO_USD_PER_G
            for ind, rate in (defaults_per_kg or {}).items()
        }
        rates = {
            (dc, ind): rate * USD_PER_KG_TO_USD_PER_G
            for dc, by_ind in (per_datacenter_per_kg or {}).items()
            for ind, rate in by_ind.items()
        }
        doc = {
            "default_per_kg": dict(defaults_per_kg or {}),
            "per_datacenter_per_kg": {
                dc: dict(by_ind) for dc, by_ind in (per_datacenter_per_kg or {}).items()
            },
        }
        return cls(rates=rates, defaults=defaults, per_kg_doc=doc)

    def to_per_kg(self) -> dict:
        if self.per_kg_doc is not None:
            return {
                "default_per_kg": dict(self.per_kg_doc["default_per_kg"]),
                "per_datacenter_per_kg": {
                    dc: dict(by_ind)
                    for dc, by_ind in self.per_kg_doc["per_datacenter_per_kg"].items()
                },
            }
        per_dc: dict[str, dict[str, float]] = {}
        for (dc, ind), rate in sorted(self.rates.items()):
            per_dc.setdefault(dc, {})[ind] = rate / USD_PER_KG_TO_USD_PER_G
        return {
            "default_per_kg": {
                ind: rate / USD_PER_KG_TO_USD_PER_G
                for ind, rate in sorted(self.defaults.items())
            },
            "per_datacenter_per_kg": per_dc,
        }


ZERO_TAXES = VirtualTaxSchedule()


@dataclass(frozen=True)
class CostBreakdown:
    revenue: float = 0.0
    energy_cost: float = 0.0
    opex: float = 0.0
    corporate_tax: float = 0.0
    real_profit: float = 0.0
    virtual_tax_total: float = 0.0
    virtual_profit: float = 0.0

    def plus(self, other: "CostBreakdown") -> "CostBreakdown":
        return CostBreakdown(
            revenue=self.revenue + other.revenue,
            energy_cost=self.energy_cost + other.energy_cost,
            opex=self.opex + other.opex,
            corporate_tax=self.corporate_tax + other.corporate_tax,
            real_profit=self.real_profit + other.real_profit,
            virtual_tax_total=self.virtual_tax_total + other.virtual_tax_total,
            virtual_profit=self.virtual_profit + other.virtual_profit,
        )


def revenue(blade: BladeSpec, f: FrequencyLevel, u: float, tariff: Tariff) -> float:
    """Hourly revenue of one blade; `u` must already be clamped to [0, 1]
    (infeasible placements earn no credit beyond capacity)."""
    if not 0 <= u <= 1:
        raise InvalidParameterError(f"utilization for billing must be in [0,1], got {u}")
    if tariff.revenue_basis == REVENUE_BASIS_CORE_HOUR:
        return tariff.revenue_rate * blade.n_cores
    return tariff.revenue_rate * blade.n_cores * f.ghz * u


def energy_cost(power_kw: float, tariff: Tariff, t: datetime) -> float:
    """Hourly cost of facility energy (IT power grossed up by PUE)."""
    if power_kw < 0:
        raise InvalidParameterError(f"negative power {power_kw}")
    return power_kw * tariff.pue * tariff.energy_price_at(t)


def real_profit(
    blade: BladeSpec,
    f: FrequencyLevel,
    u: float,
    power_kw: float,
    tariff: Tariff,
    t: datetime,
) -> CostBreakdown:
    """Hourly cost breakdown with real profit; virtual fields zeroed.

    Corporate tax applies to max(0, pre-tax margin): losses are not
    negatively taxed.
    """
    rev = revenue(blade, f, u, tariff)
    energy = energy_cost(power_kw, tariff, t)
    opex = tariff.opex_rate * blade.n_cores
    pre_tax = rev - energy - opex
    tax = tariff.corporate_tax_rate * max(0.0, pre_tax)
    profit = pre_tax - tax
    return CostBreakdown(
        revenue=rev,
        energy_cost=energy,
        opex=opex,
        corporate_tax=tax,
        real_profit=profit,
        virtual_tax_total=0.0,
        virtual_profit=profit,
    )


def virtual_profit(
    breakdown: CostBreakdown,
    taxes: VirtualTaxSchedule,
    datacenter_id: str,
    indicator_rates_g_per_h: IndicatorVector,
) -> CostBreakdown:
    """Apply virtual taxes to a breakdown.  Real profit is never altered:
    the virtual levy exists only inside the optimizer's objective."""
    if min(indicator_rates_g_per_h) < 0:
        raise InvalidParameterError("indicator rates must be >= 0")
    total = sum(
        taxes.rate(datacenter_id, ind) * rate
        for ind, rate in zip(INDICATORS, indicator_rates_g_per_h)
    )
    return replace(
        breakdown,
        virtual_tax_total=total,
        virtual_profit=breakdown.real_profit - total,
    )
