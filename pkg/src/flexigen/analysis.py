"""Statistics over generated datasets, emitted as plain CSV tables."""

from __future__ import annotations

import csv
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from .dataset import read_csv
from .scenario import MANIFEST, read_manifest
from .timeline import EvHourRecord

WEEKDAY_TYPES = frozenset({1, 2, 3, 4, 5})
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
BIN_MINUTES = 10


def connection_run_lengths(records: Sequence[EvHourRecord]) -> Counter:
    """Histogram of maximal runs of connected (state 1) hours."""
    hist: Counter = Counter()
    run = 0
    for r in records:
        if r.ev_state == 1:
            run += 1
        elif run:
            hist[run] += 1
            run = 0
    if run:
        hist[run] += 1
    return hist


@dataclass
class HourlyProfile:
    """Share of days connected at each hour, per day class."""

    weekday: list[float] = field(default_factory=lambda: [0.0] * 24)
    weekend: list[float] = field(default_factory=lambda: [0.0] * 24)
    weekday_days: int = 0
    weekend_days: int = 0


def hourly_profile(records: Sequence[EvHourRecord]) -> HourlyProfile:
    counts = {"weekday": [0] * 24, "weekend": [0] * 24}
    days = {"weekday": 0, "weekend": 0}
    for r in records:
        key = "weekday" if r.day_type in WEEKDAY_TYPES else "weekend"
        if r.hour == 1:
            days[key] += 1
        if r.ev_state == 1:
            counts[key][r.hour - 1] += 1
    out = HourlyProfile(weekday_days=days["weekday"], weekend_days=days["weekend"])
    for key in ("weekday", "weekend"):
        n = days[key]
        setattr(out, key, [c / n if n else 0.0 for c in counts[key]])
    return out


@dataclass(frozen=True)
class DurationSummary:
    count: int
    quantiles: dict[float, float]
    histogram: dict[int, int]  # bin start (minutes) -> trips

    @property
    def median(self) -> float:
        return self.quantiles.get(0.5, float("nan"))


def share_between(durations: Sequence[float], lo: float, hi: float) -> float:
    return sum(lo <= d <= hi for d in durations) / len(durations) if durations else 0.0


def trip_duration_stats(durations: Sequence[float]) -> DurationSummary:
    if not durations:
        return DurationSummary(0, {}, {})
    ordered = sorted(durations)
    if len(ordered) == 1:
        qs = {q: float(ordered[0]) for q in QUANTILES}
    else:
        cuts = statistics.quantiles(ordered, n=100, method="inclusive")
        qs = {q: cuts[round(q * 100) - 1] for q in QUANTILES}
        qs[0.5] = float(statistics.median(ordered))
    hist = Counter(int(d // BIN_MINUTES) * BIN_MINUTES for d in ordered)
    return DurationSummary(len(ordered), qs, dict(sorted(hist.items())))


def load_trip_durations(directory: Union[str, Path]) -> list[int]:
    """Durations from every trip log listed in a run manifest."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    if manifest is None:
        return []
    out: list[int] = []
    for entry in manifest["files"]:
        with open(directory / entry["trips"], encoding="utf-8", newline="") as fh:
            out.extend(int(row["duration_min"]) for row in csv.DictReader(fh))
    return out


def discover_runs(root: Union[str, Path]) -> list[tuple[Path, dict]]:
    """Directories below ``root`` (inclusive) holding a manifest, in path order."""
    root = Path(root)
    found = sorted(p.parent for p in root.rglob(MANIFEST))
    return [(d, read_manifest(d)) for d in found]


def dataset_files(root: Union[str, Path]) -> list[tuple[str, Path]]:
    """(mode, file) for every hourly CSV under ``root``; files without a manifest get mode ``unknown``."""
    root = Path(root)
    if root.is_file():
        return [("unknown", root)]
    runs = discover_runs(root)
    if runs:
        return [(m["mode"], d / e["file"]) for d, m in runs for e in m["files"]]
    return [("unknown", p) for p in sorted(root.glob("*.csv"))]


def analyze(input_dir: Union[str, Path], out_dir: Union[str, Path]) -> dict[str, Path]:
    """Write run_lengths.csv, hourly_profile.csv and trip_durations.csv, one block per mode."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs: dict[str, Counter] = {}
    profiles: dict[str, list[EvHourRecord]] = {}
    for mode, path in dataset_files(input_dir):
        records = read_csv(path)
        runs.setdefault(mode, Counter()).update(connection_run_lengths(records))
        profiles.setdefault(mode, []).extend(records)

    durations: dict[str, list[int]] = {}
    root = Path(input_dir)
    if root.is_dir():
        for d, m in discover_runs(root):
            durations.setdefault(m["mode"], []).extend(load_trip_durations(d))

    paths = {name: out_dir / name for name in ("run_lengths.csv", "hourly_profile.csv", "trip_durations.csv")}
    with open(paths["run_lengths.csv"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("mode", "run_length_hours", "count"))
        for mode in sorted(runs):
            for length, count in sorted(runs[mode].items()):
                w.writerow((mode, length, count))
    with open(paths["hourly_profile.csv"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("mode", "day_class", "hour", "connected_fraction"))
        for mode in sorted(profiles):
            prof = hourly_profile(profiles[mode])
            for cls in ("weekday", "weekend"):
                for h, v in enumerate(getattr(prof, cls), start=1):
                    w.writerow((mode, cls, h, f"{v:.6f}"))
    with open(paths["trip_durations.csv"], "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("mode", "kind", "key", "value"))
        for mode in sorted(durations):
            summary = trip_duration_stats(durations[mode])
            w.writerow((mode, "count", "trips", summary.count))
            for q, v in summary.quantiles.items():
                w.writerow((mode, "quantile", f"{q:g}", f"{v:.2f}"))
            for start, n in summary.histogram.items():
                w.writerow((mode, "histogram", f"{start}-{start + BIN_MINUTES}", n))
    return paths
