"""Override response-time extraction and reporting.

A response sample is the interval between a manual channel's activation
while the vehicle is in autonomous mode and the supervisor's next entry
into manual mode caused by that engagement.  Activations outside autonomous
mode are excluded (and counted).  Summaries use exact nearest-rank order
statistics so every implementation reproduces the same numbers.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scenario import EventLog
from .supervisor import CAUSE_MANUAL_ENGAGEMENT, Mode

# Sample channels use the actuator naming: the steering wheel's torque
# channel reports as "steering".
_CHANNEL_LABELS = {"throttle": "throttle", "brake": "brake",
                   "steering_torque": "steering"}


class LogStructureError(ValueError):
    """The event log is missing records a full run always contains."""


@dataclass(frozen=True)
class ResponseTimeSample:
    channel: str
    t_activation: int
    t_ms_entry: int
    session: str

    @property
    def response(self) -> int:
        return self.t_ms_entry - self.t_activation

    def __post_init__(self):
        if self.t_ms_entry < self.t_activation:
            raise ValueError("manual-mode entry precedes activation")


@dataclass
class ExtractionResult:
    samples: list[ResponseTimeSample]
    excluded_activations: int  # activations while not in autonomous mode


def scan_overrides(log: EventLog) -> ExtractionResult:
    """Pair qualifying activations with their manual-mode entries."""
    init = log.of_kind("init")
    session = init[0]["session"] if init else "unknown"
    ms_entries = [
        r["t"] for r in log.of_kind("transition")
        if r["to"] == Mode.MANUAL.value and r["cause"] == CAUSE_MANUAL_ENGAGEMENT
    ]
    samples: list[ResponseTimeSample] = []
    excluded = 0
    for rec in log.of_kind("activation"):
        if rec["mode"] != Mode.AUTONOMOUS.value:
            excluded += 1
            continue
        t_act = rec["t_activation"]
        entry = next((t for t in ms_entries if t >= t_act), None)
        if entry is None:
            raise LogStructureError(
                f"no manual-engagement transition after activation at {t_act}; "
                "log appears truncated or missing transition records"
            )
        samples.append(ResponseTimeSample(
            channel=_CHANNEL_LABELS[rec["channel"]],
            t_activation=t_act,
            t_ms_entry=entry,
            session=session,
        ))
    return ExtractionResult(samples=samples, excluded_activations=excluded)


def extract_samples(log: EventLog) -> list[ResponseTimeSample]:
    return scan_overrides(log).samples


@dataclass
class DistributionSummary:
    channel: str
    session: str
    n: int
    min: int
    p25: int
    p50: int
    p75: int
    p95: int
    max: int
    histogram: list[tuple[int, int]] = field(default_factory=list)  # (ms, count)

    def row(self) -> list:
        return [self.channel, self.session, self.n, self.min, self.p25,
                self.p50, self.p75, self.p95, self.max]


def nearest_rank(sorted_values, p: float):
    """Nearest-rank quantile (no interpolation); p in (0, 100]."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("empty sample set")
    rank = max(1, math.ceil(p / 100.0 * n))
    return sorted_values[rank - 1]


def summarize(samples: list[ResponseTimeSample]) -> list[DistributionSummary]:
    """Per channel x session summaries; empty groups cannot occur."""
    groups: dict[tuple[str, str], list[int]] = {}
    for s in samples:
        groups.setdefault((s.channel, s.session), []).append(s.response)
    out = []
    for (channel, session) in sorted(groups):
        values = np.sort(np.asarray(groups[(channel, session)], dtype=np.int64))
        counts: dict[int, int] = {}
        for v in values.tolist():
            counts[v] = counts.get(v, 0) + 1
        out.append(DistributionSummary(
            channel=channel,
            session=session,
            n=int(values.size),
            min=int(values[0]),
            p25=int(nearest_rank(values, 25)),
            p50=int(nearest_rank(values, 50)),
            p75=int(nearest_rank(values, 75)),
            p95=int(nearest_rank(values, 95)),
            max=int(values[-1]),
            histogram=sorted(counts.items()),
        ))
    return out


SUMMARY_HEADER = ["channel", "session", "n", "min", "p25", "p50", "p75", "p95", "max"]
SAMPLES_HEADER = ["channel", "session", "t_activation_ms", "t_ms_entry_ms",
                  "response_ms"]


def export(summaries: list[DistributionSummary],
           samples: list[ResponseTimeSample],
           out_dir, campaign: str = "campaign") -> dict[str, Path]:
    """Write summary CSV + JSON and per-session raw sample CSVs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    summary_csv = out_dir / f"{campaign}.summary.csv"
    with open(summary_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for s in summaries:
            writer.writerow(s.row())
    paths["summary_csv"] = summary_csv

    summary_json = out_dir / f"{campaign}.summary.json"
    with open(summary_json, "w", encoding="utf-8") as fh:
        json.dump(
            [
                {
                    **dict(zip(SUMMARY_HEADER, s.row())),
                    "histogram": [[ms, count] for ms, count in s.histogram],
                }
                for s in summaries
            ],
            fh, indent=2,
        )
        fh.write("\n")
    paths["summary_json"] = summary_json

    sessions = sorted({s.session for s in samples})
    for session in sessions:
        samples_csv = out_dir / f"{campaign}_{session}.samples.csv"
        with open(samples_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(SAMPLES_HEADER)
            for s in samples:
                if s.session == session:
                    writer.writerow([s.channel, s.session, s.t_activation,
                                     s.t_ms_entry, s.response])
        paths[f"samples_csv:{session}"] = samples_csv
    return paths


def import_samples(path) -> list[ResponseTimeSample]:
    """Read back a raw samples CSV written by :func:`export`."""
    out = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(ResponseTimeSample(
                channel=row["channel"],
                t_activation=int(row["t_activation_ms"]),
                t_ms_entry=int(row["t_ms_entry_ms"]),
                session=row["session"],
            ))
    return out
