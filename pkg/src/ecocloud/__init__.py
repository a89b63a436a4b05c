"""Sustainability-aware cloud manager: inventory and power models, grid
energy-mix indicators, virtual-tax economics, an MLGGA placement/DVFS
optimizer, and the control-loop service around them."""

from .economics import CostBreakdown, Tariff, VirtualTaxSchedule
from .evaluation import (
    EvaluationReport,
    Instance,
    ParetoArchive,
    dominates,
    evaluate,
    fitness,
    tradeoff_sweep,
)
from .ga import Chromosome, GaParams, mlgga_run
from .model import (
    BladeLoad,
    BladeSpec,
    CloudTopology,
    Datacenter,
    FrequencyLevel,
    Placement,
    PowerModelCoefficients,
    VmSpec,
    blade_utilization,
    cubic_power,
    empirical_power,
    interval_energy,
    total_energy,
)
from .oracle import brute_force_optimum
from .sustainability import (
    INDICATORS,
    GridMixSample,
    IndicatorVector,
    MixSeries,
    SourceIndicatorRow,
    default_indicator_table,
    footprint_rates,
    mix_factors,
    normalize_row,
    sample_at,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
