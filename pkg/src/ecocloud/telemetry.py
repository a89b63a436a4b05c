"""Simulated sensors, mix-feed loading/replay, and the append-only run log."""
from __future__ import annotations

import json
import logging
import os
import random
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import InvalidParameterError, MixParseError, NoDataError
from .evaluation import Instance, evaluate
from .model import CloudTopology, Placement
from .sustainability import GridMixSample, MixSeries

log = logging.getLogger(__name__)

LOG_HEADER = "ecocloud-log v1"

SENSOR_KINDS = ("power_kw", "utilization", "frequency_ghz")
ENTRY_KINDS = ("tick", "optimize", "apply", "tax_update", "mix_update")


@dataclass(frozen=True)
class SensorReading:
    timestamp: datetime
    blade_id: str
    kind: str  # one of SENSOR_KINDS
    value: float
    source: str = "simulated"


@dataclass(frozen=True)
class RunLogEntry:
    seq: int
    timestamp: datetime
    kind: str  # one of ENTRY_KINDS
    payload: dict


def parse_timestamp(text: str) -> datetime:
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_mix_line(line: str, lineno: int) -> GridMixSample:
    parts = line.split()
    if len(parts) < 3:
        raise MixParseError("expected: <timestamp> <region> source=share ...", lineno)
    try:
        ts = parse_timestamp(parts[0])
    except ValueError as exc:
        raise MixParseError(f"bad timestamp {parts[0]!r}: {exc}", lineno) from exc
    region = parts[1]
    shares: dict[str, float] = {}
    for token in parts[2:]:
        if "=" not in token:
            raise MixParseError(f"bad share token {token!r}", lineno)
        source, _, value = token.partition("=")
        try:
            shares[source] = float(value)
        except ValueError as exc:
            raise MixParseError(f"bad share value {token!r}", lineno) from exc
    try:
        return GridMixSample(timestamp=ts, region=region, shares=shares)
    except Exception as exc:
        raise MixParseError(str(exc), lineno) from exc


def load_mix_file(path) -> MixSeries:
    """Parse a mix feed file into a validated, time-sorted series.

    One record per line: ISO-8601 timestamp, region, then source=share
    pairs; '#' comments and blank lines are skipped.
    """
    samples: list[GridMixSample] = []
    region: str | None = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            sample = parse_mix_line(line, lineno)
            if region is None:
                region = sample.region
            elif sample.region != region:
                raise MixParseError(
                    f"region {sample.region!r} differs from file region {region!r}", lineno
                )
            if samples and sample.timestamp <= samples[-1].timestamp:
                raise MixParseError("timestamps must be strictly increasing", lineno)
            samples.append(sample)
    if not samples:
        raise NoDataError(f"mix file {path} holds no samples")
    return MixSeries(region=region, samples=tuple(samples))


def serialize_mix(series: MixSeries) -> str:
    lines = []
    for s in series.samples:
        shares = " ".join(f"{src}={s.shares[src]:g}" for src in sorted(s.shares))
        lines.append(f"{format_timestamp(s.timestamp)} {s.region} {shares}")
    return "\n".join(lines) + "\n"


def simulate_sensors(
    topology: CloudTopology,
    placement: Placement,
    inst: Instance,
    noise_stddev: float = 0.0,
    rng: random.Random | None = None,
) -> list[SensorReading]:
    """Three readings per blade (power, utilization, frequency).  Power is
    perturbed multiplicatively by gaussian noise and clamped >= 0;
    noise_stddev = 0 reproduces the model exactly."""
    if noise_stddev < 0:
        raise InvalidParameterError("noise_stddev must be >= 0")
    rng = rng or random.Random(0)
    report = evaluate(placement, inst)
    readings = []
    for blade in topology.blades:
        load = report.blade_loads[blade.id]
        power = load.power_kw
        if noise_stddev > 0:
            power = max(0.0, power * (1 + rng.gauss(0, noise_stddev)))
        ts = inst.timestamp
        readings.append(SensorReading(ts, blade.id, "power_kw", power))
        readings.append(SensorReading(ts, blade.id, "utilization", load.utilization))
        readings.append(
            SensorReading(ts, blade.id, "frequency_ghz", placement.blade_freq[blade.id].ghz)
        )
    return readings


class LogStore:
    """Append-only line-delimited run log with a format-version header.

    Single writer, atomic per-entry appends, readable concurrently; a
    corrupted trailing record is truncated with a warning on open.
    """

    def __init__(self, path):
        self.path = str(path)
        self._next_seq = 1
        if os.path.exists(self.path):
            self._recover()
        else:
            with open(self.path, "w") as fh:
                fh.write(LOG_HEADER + "\n")

    def _recover(self) -> None:
        good = []
        with open(self.path) as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != LOG_HEADER:
            raise MixParseError(f"{self.path}: missing log header", 1)
        for raw in lines[1:]:
            try:
                rec = json.loads(raw)
                seq = int(rec["seq"])
            except (ValueError, KeyError, TypeError):
                log.warning("%s: truncating corrupted trailing record", self.path)
                break
            good.append(raw)
            self._next_seq = seq + 1
        with open(self.path, "w") as fh:
            fh.write("\n".join([LOG_HEADER] + good) + "\n")

    def append(self, kind: str, timestamp: datetime, payload: dict) -> int:
        if kind not in ENTRY_KINDS:
            raise InvalidParameterError(f"unknown log entry kind {kind!r}")
        seq = self._next_seq
        rec = {
            "seq": seq,
            "ts": format_timestamp(timestamp),
            "kind": kind,
            "payload": payload,
        }
        with open(self.path, "a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._next_seq = seq + 1
        return seq

    def read(self, from_seq: int = 0) -> list[RunLogEntry]:
        entries = []
        with open(self.path) as fh:
            next(fh)  # header
            for raw in fh:
                rec = json.loads(raw)
                if rec["seq"] >= from_seq:
                    entries.append(
                        RunLogEntry(
                            seq=rec["seq"],
                            timestamp=parse_timestamp(rec["ts"]),
                            kind=rec["kind"],
                            payload=rec["payload"],
                        )
                    )
        return entries
