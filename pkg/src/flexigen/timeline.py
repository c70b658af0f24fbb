"""Calendar, connection sessions and their expansion into hourly records.

A profile is described by the sessions an EV spends at its tracked charger.
Each session covers three consecutive hour windows (hour ``k`` is the clock
interval ``[k, k+1)`` counted from the start of the horizon):

* incoming: from the hour the leg towards the charger starts up to the hour
  the EV arrives in (state 2);
* connected: every following hour before the departure hour (state 1);
* departure: the hour the EV leaves, recorded as transit (state 3).

Hours outside every session are state 3. An hour holding both the tail of a
parked-away stretch and the start of the incoming leg is labelled incoming;
an hour holding an arrival is still incoming; an hour holding a departure is
transit. Planners guarantee one full connected hour per session, so the
record stream always follows 1 -> 3 ... -> 2 ... -> 1.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Collection, Iterable, Optional, Sequence

MONTH_LENGTHS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
DAYS_PER_YEAR = 365
HOURS_PER_DAY = 24

CONNECTED, INCOMING, AWAY = 1, 2, 3


@dataclass(frozen=True)
class SimDate:
    """A day of the simulated 365-day calendar."""

    index: int
    year: int
    month: int
    day: int
    weekday: int  # ISO: 1 = Monday

    def isoweekday(self) -> int:
        return self.weekday

    @property
    def is_weekend(self) -> bool:
        return self.weekday >= 6


def _month_day(day_of_year: int) -> tuple[int, int]:
    for month, length in enumerate(MONTH_LENGTHS, start=1):
        if day_of_year < length:
            return month, day_of_year + 1
        day_of_year -= length
    raise AssertionError("day of year out of range")


def sim_date(index: int, start_weekday: int = 1) -> SimDate:
    year, day_of_year = divmod(index, DAYS_PER_YEAR)
    month, day = _month_day(day_of_year)
    weekday = (start_weekday - 1 + index) % 7 + 1
    return SimDate(index, year, month, day, weekday)


def build_calendar(n_days: int, start_weekday: int = 1) -> list[SimDate]:
    return [sim_date(i, start_weekday) for i in range(n_days)]


def day_type_of(date, holidays: Collection[tuple[int, int]] = ()) -> int:
    """1..7 for Monday..Sunday, 8 for holidays. Accepts SimDate or datetime.date."""
    if (date.month, date.day) in holidays:
        return 8
    return date.isoweekday()


def is_rest_day(date, holidays: Collection[tuple[int, int]] = ()) -> bool:
    return day_type_of(date, holidays) >= 6


@dataclass(frozen=True)
class EvHourRecord:
    month: int
    hour: int
    day_type: int
    ev_state: int
    charger: Optional[str] = None
    est_departure: Optional[int] = None
    required_soc_departure: Optional[float] = None
    est_arrival: Optional[int] = None
    est_soc_arrival: Optional[float] = None


@dataclass(frozen=True)
class Session:
    """A stay at the tracked charger, times in absolute minutes from the horizon start."""

    charger: str
    depart: float
    required_soc: float
    incoming_start: Optional[float] = None  # None: already connected at the horizon start
    arrive: Optional[float] = None
    arrival_soc: Optional[float] = None

    @property
    def first_hour(self) -> int:
        return 0 if self.incoming_start is None else math.floor(self.incoming_start / 60.0)

    @property
    def connect_hour(self) -> int:
        return 0 if self.arrive is None else math.ceil(self.arrive / 60.0)

    @property
    def depart_hour(self) -> int:
        return math.floor(self.depart / 60.0)


class InconsistentCarry(ValueError):
    """Sessions handed to the expander overlap or leave no connected hour."""


@dataclass(frozen=True)
class Carry:
    session: Optional[Session] = None  # open across the day boundary
    last_depart_hour: int = -1


def _check_session(s: Session, after_hour: int) -> None:
    if s.incoming_start is not None and (s.arrive is None or s.arrive <= s.incoming_start):
        raise InconsistentCarry("incoming leg must end after it starts")
    if s.first_hour <= after_hour:
        raise InconsistentCarry(f"session starting in hour {s.first_hour} overlaps departure hour {after_hour}")
    if s.depart_hour <= s.connect_hour:
        raise InconsistentCarry(f"session arriving in hour {s.connect_hour - 1} leaves no connected hour")


def expand_day(
    day: SimDate,
    sessions: Sequence[Session],
    carry: Carry,
    holidays: Collection[tuple[int, int]] = (),
) -> tuple[list[EvHourRecord], Carry]:
    """Emit the 24 records of ``day``.

    ``sessions`` are those whose first hour falls on this day, in time order;
    ``carry`` holds the session still open from the previous day.
    """
    h0 = day.index * HOURS_PER_DAY
    h1 = h0 + HOURS_PER_DAY
    active: list[Session] = []
    if carry.session is not None:
        if carry.session.depart_hour < h0:
            raise InconsistentCarry("carried session already departed")
        active.append(carry.session)
    last = carry.last_depart_hour if carry.session is None else carry.session.depart_hour
    for s in sessions:
        if not h0 <= s.first_hour < h1:
            raise InconsistentCarry(f"session starting in hour {s.first_hour} does not belong to day {day.index}")
        _check_session(s, last)
        active.append(s)
        last = s.depart_hour

    month, dtype = day.month, day_type_of(day, holidays)
    rows: list[Optional[EvHourRecord]] = [None] * HOURS_PER_DAY
    for s in active:
        for h in range(max(s.first_hour, h0), min(s.connect_hour, h1)):
            rows[h - h0] = EvHourRecord(
                month, h - h0 + 1, dtype, INCOMING, s.charger,
                est_arrival=s.connect_hour - h,
                est_soc_arrival=round(s.arrival_soc, 1),
            )
        for h in range(max(s.connect_hour, h0), min(s.depart_hour, h1)):
            rows[h - h0] = EvHourRecord(
                month, h - h0 + 1, dtype, CONNECTED, s.charger,
                est_departure=s.depart_hour - h,
                required_soc_departure=round(s.required_soc, 1),
            )
    records = [r if r is not None else EvHourRecord(month, i + 1, dtype, AWAY) for i, r in enumerate(rows)]

    open_session = active[-1] if active and active[-1].depart_hour >= h1 else None
    if open_session is None:
        next_carry = Carry(None, active[-1].depart_hour if active else carry.last_depart_hour)
    else:
        next_carry = Carry(open_session, carry.last_depart_hour)
    return records, next_carry


def emit_profile(
    sessions: Iterable[Session],
    calendar: Sequence[SimDate],
    holidays: Collection[tuple[int, int]] = (),
) -> list[EvHourRecord]:
    """Expand time-ordered sessions over the whole calendar; sessions starting after it are dropped."""
    by_day: dict[int, list[Session]] = defaultdict(list)
    for s in sessions:
        by_day[s.first_hour // HOURS_PER_DAY].append(s)
    carry = Carry()
    out: list[EvHourRecord] = []
    for day in calendar:
        records, carry = expand_day(day, by_day.get(day.index, ()), carry, holidays)
        out.extend(records)
    return out


@dataclass
class Profile:
    """Hourly records of one EV at its tracked charger plus its minute-level trip log."""

    car_id: str
    mode: str
    charger: Optional[str]
    records: list[EvHourRecord]
    trips: list  # (day index, TripLeg)
