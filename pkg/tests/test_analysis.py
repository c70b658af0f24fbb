from __future__ import annotations

import csv

import pytest
from builders import with_changes

from flexigen.analysis import (
    analyze,
    connection_run_lengths,
    hourly_profile,
    load_trip_durations,
    trip_duration_stats,
)
from flexigen.scenario import run_scenario
from flexigen.timeline import EvHourRecord


def day(state: int, dtype: int = 1) -> list[EvHourRecord]:
    if state == 1:
        return [EvHourRecord(1, h, dtype, 1, "EVC_1_1_1", 25 - h, 80.0) for h in range(1, 25)]
    return [EvHourRecord(1, h, dtype, 3) for h in range(1, 25)]


def test_run_lengths_trivial():
    assert connection_run_lengths(day(3)) == {}
    assert connection_run_lengths(day(1)) == {24: 1}


def test_run_length_mass_is_conserved(example_cfg, tmp_path):
    result = run_scenario(example_cfg, "home", 0, tmp_path)
    for p in result.profiles:
        hist = connection_run_lengths(p.records)
        assert sum(k * v for k, v in hist.items()) == sum(r.ev_state == 1 for r in p.records)


def test_hourly_profile_trivial():
    prof = hourly_profile(day(1) + day(1, dtype=6))
    assert prof.weekday == [1.0] * 24 and prof.weekend == [1.0] * 24
    assert prof.weekday_days == prof.weekend_days == 1


def test_empty_duration_summary():
    s = trip_duration_stats([])
    assert s.count == 0 and s.quantiles == {} and s.histogram == {}


def test_duration_summary_values():
    s = trip_duration_stats([10, 20, 30, 40, 50])
    assert s.median == 30
    assert s.histogram == {10: 1, 20: 1, 30: 1, 40: 1, 50: 1}


def test_heavy_traffic_lengthens_trips(example_cfg, tmp_path):
    heavy_rows = [{"probability": 1.0, "min_increase": 0.7, "max_increase": 2.0}]
    heavy = with_changes(example_cfg, traffic_week=heavy_rows, traffic_weekend=heavy_rows, scenario="heavy")
    base = run_scenario(example_cfg, "home", 0, tmp_path)
    slow = run_scenario(heavy, "home", 0, tmp_path)
    assert trip_duration_stats(load_trip_durations(slow.directory)).median > trip_duration_stats(
        load_trip_durations(base.directory)
    ).median


def test_analyze_writes_tables_deterministically(example_cfg, tmp_path):
    run_scenario(example_cfg, "office", 0, tmp_path / "gen")
    first = analyze(tmp_path / "gen", tmp_path / "a1")
    second = analyze(tmp_path / "gen", tmp_path / "a2")
    for name, path in first.items():
        assert path.read_bytes() == second[name].read_bytes()
    with open(first["hourly_profile.csv"]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 48
    assert all(0.0 <= float(r["connected_fraction"]) <= 1.0 for r in rows)
    with open(first["run_lengths.csv"]) as fh:
        assert {r["mode"] for r in csv.DictReader(fh)} == {"office"}


@pytest.mark.parametrize("mode", ["home", "office"])
def test_trip_log_matches_profiles(example_cfg, tmp_path, mode):
    result = run_scenario(example_cfg, mode, 0, tmp_path)
    logged = load_trip_durations(result.directory)
    assert logged == [leg.duration for p in result.profiles for _, leg in p.trips]
