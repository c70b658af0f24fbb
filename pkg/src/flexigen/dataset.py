"""Hourly CSV files: writing, reading and schema/state-machine validation.

The validator is written against the file contract only and shares no logic
with the expander in :mod:`flexigen.timeline`.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .report import ValidationReport
from .timeline import EvHourRecord

HEADER = (
    "month,hour,day_type,ev_state,charger,estimated_departure_time,"
    "required_soc_departure,estimated_arrival_time,estimated_soc_arrival"
)
NAN = "nan"
HOURS_PER_YEAR = 365 * 24

LEGAL_TRANSITIONS = frozenset({(1, 1), (1, 2), (1, 3), (3, 3), (3, 2), (2, 2), (2, 1)})
_CHARGER_RE = re.compile(r"^EVC_\d+_\d+_\d+$")
_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


class DatasetError(ValueError):
    pass


def _fmt_int(value: Optional[int]) -> str:
    return NAN if value is None else str(value)


def _fmt_soc(value: Optional[float]) -> str:
    return NAN if value is None else f"{value:.1f}"


def format_record(r: EvHourRecord) -> str:
    return ",".join(
        (
            str(r.month),
            str(r.hour),
            str(r.day_type),
            str(r.ev_state),
            r.charger if r.charger is not None else NAN,
            _fmt_int(r.est_departure),
            _fmt_soc(r.required_soc_departure),
            _fmt_int(r.est_arrival),
            _fmt_soc(r.est_soc_arrival),
        )
    )


def write_csv(
    records: Sequence[EvHourRecord],
    path: Union[str, Path],
    expected_rows: Optional[int] = None,
) -> Path:
    report = validate_dataset(records, expected_rows)
    if report.fatal:
        raise DatasetError(f"refusing to write invalid dataset: {report.fatal[0]}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER, *(format_record(r) for r in records)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _opt_int(text: str) -> Optional[int]:
    return None if text == NAN else int(text)


def _opt_float(text: str) -> Optional[float]:
    return None if text == NAN else float(text)


def parse_line(line: str) -> EvHourRecord:
    cells = line.split(",")
    if len(cells) != 9:
        raise ValueError(f"expected 9 fields, found {len(cells)}")
    return EvHourRecord(
        int(cells[0]),
        int(cells[1]),
        int(cells[2]),
        int(cells[3]),
        None if cells[4] == NAN else cells[4],
        _opt_int(cells[5]),
        _opt_float(cells[6]),
        _opt_int(cells[7]),
        _opt_float(cells[8]),
    )


def _read_lines(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    return text.split("\n")[:-1] if text.endswith("\n") else text.split("\n")


def read_csv(path: Union[str, Path]) -> list[EvHourRecord]:
    lines = _read_lines(Path(path))
    if not lines or lines[0] != HEADER:
        raise DatasetError(f"{path}: header does not match")
    try:
        return [parse_line(line) for line in lines[1:]]
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from exc


def _check_domains(report: ValidationReport, i: int, r: EvHourRecord) -> None:
    at = f"row {i + 1}"
    if not 1 <= r.month <= 12:
        report.add("fatal", "domain", f"month {r.month} outside 1..12", at)
    if not 1 <= r.hour <= 24:
        report.add("fatal", "domain", f"hour {r.hour} outside 1..24", at)
    if not 1 <= r.day_type <= 8:
        report.add("fatal", "domain", f"day type {r.day_type} outside 1..8", at)
    if r.ev_state not in (1, 2, 3):
        report.add("fatal", "domain", f"EV state {r.ev_state} not in {{1, 2, 3}}", at)
    if r.charger is not None and not _CHARGER_RE.match(r.charger):
        report.add("fatal", "domain", f"charger id {r.charger!r} is not EVC_b_n_p", at)
    if r.est_departure is not None and r.est_departure < 1:
        report.add("fatal", "domain", f"estimated departure {r.est_departure} below 1", at)
    if r.est_arrival is not None and not 1 <= r.est_arrival <= 24:
        report.add("fatal", "domain", f"estimated arrival {r.est_arrival} outside 1..24", at)
    for name in ("required_soc_departure", "est_soc_arrival"):
        v = getattr(r, name)
        if v is not None and (math.isnan(v) or not 0.0 <= v <= 100.0):
            report.add("fatal", "soc-range", f"{name} {v} outside [0, 100]", at)


def _check_presence(report: ValidationReport, i: int, r: EvHourRecord) -> None:
    at = f"row {i + 1}"
    s = r.ev_state
    rules = (
        ("charger", r.charger is not None, s in (1, 2)),
        ("estimated_departure_time", r.est_departure is not None, s == 1),
        ("required_soc_departure", r.required_soc_departure is not None, s == 1),
        ("estimated_arrival_time", r.est_arrival is not None, s == 2),
        ("estimated_soc_arrival", r.est_soc_arrival is not None, s == 2),
    )
    for name, present, wanted in rules:
        if present != wanted:
            state = "required" if wanted else "must be nan"
            report.add("fatal", "presence", f"{name} {state} in state {s}", at)


def _check_time_axis(report: ValidationReport, records: Sequence[EvHourRecord]) -> None:
    for i, r in enumerate(records):
        if r.hour != i % 24 + 1:
            report.add("fatal", "time-axis", f"hour {r.hour} where {i % 24 + 1} was expected", f"row {i + 1}")
            return
    for start in range(0, len(records) - 23, 24):
        day = records[start : start + 24]
        if len({(r.month, r.day_type) for r in day}) != 1:
            report.add("fatal", "time-axis", "month or day type changes within a day", f"row {start + 1}")
            return
    expected = [m for m, n in enumerate(_DAYS_IN_MONTH, start=1) for _ in range(n)]
    for day_index, start in enumerate(range(0, len(records) - 23, 24)):
        want = expected[day_index % 365]
        if records[start].month != want:
            report.add("fatal", "time-axis", f"month {records[start].month} on day {day_index + 1}, expected {want}", f"row {start + 1}")
            return


def _check_runs(report: ValidationReport, records: Sequence[EvHourRecord]) -> None:
    n = len(records)
    i = 0
    while i < n:
        state = records[i].ev_state
        j = i
        while j + 1 < n and records[j + 1].ev_state == state:
            j += 1
        run = records[i : j + 1]
        ends_in_file = j + 1 < n
        at = f"rows {i + 1}-{j + 1}"
        if state == 1:
            if len({(r.charger, r.required_soc_departure) for r in run}) > 1:
                report.add("fatal", "session-constant", "charger or required SoC changes within a connected run", at)
            if any(b.est_departure is None or a.est_departure is None or b.est_departure != a.est_departure - 1
                   for a, b in zip(run, run[1:])):
                report.add("fatal", "countdown", "estimated departure does not count down by 1", at)
            elif ends_in_file and run[-1].est_departure != 1:
                report.add("fatal", "countdown", "connected run ends before its departure countdown reaches 1", at)
        elif state == 2:
            if len({(r.charger, r.est_soc_arrival) for r in run}) > 1:
                report.add("fatal", "session-constant", "charger or arrival SoC changes within an incoming run", at)
            if any(b.est_arrival is None or a.est_arrival is None or b.est_arrival != a.est_arrival - 1
                   for a, b in zip(run, run[1:])):
                report.add("fatal", "countdown", "estimated arrival does not count down by 1", at)
            elif ends_in_file and run[-1].est_arrival != 1:
                report.add("fatal", "countdown", "incoming run ends before its arrival countdown reaches 1", at)
            if ends_in_file and records[j + 1].ev_state == 1 and records[j + 1].charger != run[-1].charger:
                report.add("fatal", "session-constant", "EV connects to a different charger than announced", at)
        i = j + 1


def validate_dataset(records: Sequence[EvHourRecord], expected_rows: Optional[int] = None) -> ValidationReport:
    """Field domains, presence rules, transitions, countdowns, time axis and row count."""
    report = ValidationReport()
    n = len(records)
    if expected_rows is not None:
        if n != expected_rows:
            report.add("fatal", "row-count", f"{n} rows, expected {expected_rows}")
    elif n == 0 or n % HOURS_PER_YEAR:
        report.add("fatal", "row-count", f"{n} rows is not a whole number of 365-day years ({HOURS_PER_YEAR} rows each)")
    for i, r in enumerate(records):
        _check_domains(report, i, r)
        _check_presence(report, i, r)
    for i in range(1, n):
        pair = (records[i - 1].ev_state, records[i].ev_state)
        if pair not in LEGAL_TRANSITIONS:
            report.add("fatal", "transition", f"illegal transition {pair[0]} -> {pair[1]}", f"row {i + 1}")
    _check_time_axis(report, records)
    _check_runs(report, records)
    return report


def validate_file(path: Union[str, Path], expected_rows: Optional[int] = None) -> ValidationReport:
    path = Path(path)
    report = ValidationReport()
    try:
        lines = _read_lines(path)
    except (OSError, UnicodeDecodeError) as exc:
        report.add("fatal", "unreadable", str(exc), str(path))
        return report
    if not lines or lines[0] != HEADER:
        report.add("fatal", "header", "header does not match the expected column list", str(path))
        return report
    records = []
    for k, line in enumerate(lines[1:], start=2):
        try:
            records.append(parse_line(line))
        except ValueError as exc:
            report.add("fatal", "parse", str(exc), f"{path} line {k}")
    if report.fatal:
        return report
    for f in validate_dataset(records, expected_rows):
        report.add(f.severity, f.code, f.message, f"{path} {f.location}".strip())
    return report


def iter_records(paths: Iterable[Union[str, Path]]) -> Iterable[tuple[Path, list[EvHourRecord]]]:
    for p in sorted(Path(p) for p in paths):
        yield p, read_csv(p)
