"""Grid energy-mix handling and per-kWh sustainability indicator factors.

The canonical internal unit for all six indicators is g/kWh; resource
columns (iron, copper, bauxite) arrive in kg/GWh and are converted on
load (1 kg/GWh = 0.001 g/kWh).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from importlib import resources
from typing import NamedTuple

from .errors import InvalidDataError, InvalidMixError, MissingFactorError, NoDataError

INDICATORS = ("co2", "so2", "nox", "iron", "copper", "bauxite")

SHARE_SUM_TOLERANCE = 1e-6

KG_PER_GWH_TO_G_PER_KWH = 0.001


class IndicatorVector(NamedTuple):
    """Fixed-order indicator amounts; unit depends on context (g/kWh factors,
    g/h rates)."""

    co2: float
    so2: float
    nox: float
    iron: float
    copper: float
    bauxite: float

    @classmethod
    def zero(cls) -> "IndicatorVector":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def scaled(self, k: float) -> "IndicatorVector":
        return IndicatorVector(*(k * x for x in self))

    def plus(self, other: "IndicatorVector") -> "IndicatorVector":
        return IndicatorVector(*(a + b for a, b in zip(self, other)))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(INDICATORS, self))


@dataclass(frozen=True)
class SourceIndicatorRow:
    """Per-source indicator factors: resources in kg/GWh, emissions in g/kWh."""

    source: str
    iron: float
    copper: float
    bauxite: float
    co2: float
    so2: float
    nox: float

    def __post_init__(self):
        if min(self.iron, self.copper, self.bauxite, self.co2, self.so2, self.nox) < 0:
            raise InvalidDataError(f"source {self.source}: negative indicator factor")


def normalize_row(row: SourceIndicatorRow) -> IndicatorVector:
    """Factor vector in g/kWh: emissions pass through, resources convert
    from kg/GWh."""
    k = KG_PER_GWH_TO_G_PER_KWH
    return IndicatorVector(
        co2=row.co2,
        so2=row.so2,
        nox=row.nox,
        iron=row.iron * k,
        copper=row.copper * k,
        bauxite=row.bauxite * k,
    )


@dataclass(frozen=True)
class GridMixSample:
    timestamp: datetime
    region: str
    shares: dict[str, float]

    def __post_init__(self):
        for source, share in self.shares.items():
            if not 0.0 <= share <= 1.0:
                raise InvalidMixError(f"share for {source} out of [0,1]: {share}")
        total = sum(self.shares.values())
        if abs(total - 1.0) > SHARE_SUM_TOLERANCE:
            raise InvalidMixError(f"shares sum to {total}, expected 1 +/- {SHARE_SUM_TOLERANCE}")


@dataclass(frozen=True)
class MixSeries:
    region: str
    samples: tuple[GridMixSample, ...]

    def __post_init__(self):
        times = [s.timestamp for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidDataError("mix series timestamps must be strictly increasing")


class SampleLookup(NamedTuple):
    sample: GridMixSample
    extrapolated: bool


def sample_at(series: MixSeries, t: datetime) -> SampleLookup:
    """Step-hold replay: latest sample at or before `t`; the first sample
    (flagged) if `t` precedes the series."""
    if not series.samples:
        raise NoDataError(f"mix series for region {series.region} is empty")
    if t < series.samples[0].timestamp:
        return SampleLookup(series.samples[0], True)
    chosen = series.samples[0]
    for s in series.samples:
        if s.timestamp <= t:
            chosen = s
        else:
            break
    return SampleLookup(chosen, False)


def mix_factors(sample: GridMixSample, table: list[SourceIndicatorRow]) -> IndicatorVector:
    """Share-weighted factor vector (g/kWh) of a grid mix."""
    by_source = {row.source: row for row in table}
    total = IndicatorVector.zero()
    for source, share in sample.shares.items():
        if share == 0.0:
            continue
        if source not in by_source:
            raise MissingFactorError(f"no indicator row for energy source {source!r}")
        total = total.plus(normalize_row(by_source[source]).scaled(share))
    return total


def footprint_rates(power_kw: float, pue: float, factors: IndicatorVector) -> IndicatorVector:
    """Indicator emission/consumption rates in g/h (kW x g/kWh = g/h)."""
    if power_kw < 0:
        raise InvalidDataError(f"negative power {power_kw}")
    if pue < 1:
        raise InvalidDataError(f"PUE must be >= 1, got {pue}")
    return factors.scaled(power_kw * pue)


def load_indicator_table(path) -> list[SourceIndicatorRow]:
    """Load a per-source indicator table from CSV (columns: source, iron,
    copper, bauxite in kg/GWh; co2, so2, nox in g/kWh)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for rec in reader:
            rows.append(
                SourceIndicatorRow(
                    source=rec["source"].strip(),
                    iron=float(rec["iron_kg_per_gwh"]),
                    copper=float(rec["copper_kg_per_gwh"]),
                    bauxite=float(rec["bauxite_kg_per_gwh"]),
                    co2=float(rec["co2_g_per_kwh"]),
                    so2=float(rec["so2_g_per_kwh"]),
                    nox=float(rec["nox_g_per_kwh"]),
                )
            )
    return rows


def default_indicator_table() -> list[SourceIndicatorRow]:
    """The versioned default factor table shipped with the package."""
    ref = resources.files("ecocloud.data").joinpath("source_indicators.csv")
    with resources.as_file(ref) as path:
        return load_indicator_table(path)
