from __future__ import annotations

import datetime

import pytest

from flexigen.timeline import (
    Carry,
    InconsistentCarry,
    Session,
    build_calendar,
    day_type_of,
    emit_profile,
    expand_day,
    sim_date,
)

CH = "EVC_1_1_1"


def states(records):
    return [r.ev_state for r in records]


def test_day_types():
    assert day_type_of(sim_date(0)) == 1
    assert day_type_of(sim_date(6)) == 7
    assert day_type_of(sim_date(0), {(1, 1)}) == 8
    assert day_type_of(datetime.date(2024, 1, 1)) == 1  # a Monday
    assert day_type_of(datetime.date(2024, 1, 7)) == 7


def test_calendar_months():
    cal = build_calendar(365)
    assert cal[30].month == 1 and cal[31].month == 2
    assert cal[58].month == 2 and cal[59].month == 3
    assert cal[-1].month == 12 and cal[-1].day == 31
    assert sim_date(365).year == 1 and sim_date(365).month == 1


def test_start_weekday():
    assert sim_date(0, start_weekday=6).weekday == 6
    assert sim_date(2, start_weekday=6).weekday == 1


def test_carried_stay_counts_down():
    day = sim_date(2)  # Wednesday
    h0 = day.index * 24
    open_session = Session(CH, (h0 + 30) * 60 + 10, 75.0)
    records, carry = expand_day(day, [], Carry(open_session))
    assert states(records) == [1] * 24
    assert [r.est_departure for r in records] == list(range(30, 6, -1))
    assert {r.required_soc_departure for r in records} == {75.0}
    assert carry.session is open_session


def test_commute_day_hand_trace():
    # Leave 08:10, drive back 18:10-18:40, leave again 08:10 tomorrow.
    day = sim_date(0)
    leaving = Session(CH, 8 * 60 + 10, 80.0)
    back = Session(CH, 1440 + 8 * 60 + 10, 85.0, incoming_start=18 * 60 + 10, arrive=18 * 60 + 40, arrival_soc=71.25)
    records, carry = expand_day(day, [back], Carry(leaving))
    expected = [1] * 8 + [3] * 10 + [2] + [1] * 5
    assert states(records) == expected
    assert [r.est_departure for r in records[:8]] == list(range(8, 0, -1))
    assert records[18].est_arrival == 1
    assert records[18].est_soc_arrival == 71.2  # rounded to one decimal
    assert [r.est_departure for r in records[19:]] == [13, 12, 11, 10, 9]
    assert all(r.charger is None for r in records[8:18])
    assert carry.session is back


def test_return_across_midnight():
    cal = build_calendar(2)
    back = Session(CH, 1440 + 600, 80.0, incoming_start=23 * 60 + 50, arrive=1440 + 20, arrival_soc=50.0)
    leaving = Session(CH, 300, 80.0)
    records = emit_profile([leaving, back], cal)
    assert records[23].ev_state == 2 and records[23].est_arrival == 2
    assert records[24].ev_state == 2 and records[24].est_arrival == 1
    assert records[24].day_type == 2 and records[24].hour == 1
    assert records[25].ev_state == 1 and records[25].est_departure == 9


def test_overlapping_sessions_rejected():
    day = sim_date(0)
    first = Session(CH, 600, 80.0)
    clash = Session(CH, 1200, 80.0, incoming_start=610, arrive=700, arrival_soc=60.0)
    with pytest.raises(InconsistentCarry):
        expand_day(day, [clash], Carry(first))


def test_session_without_connected_hour_rejected():
    day = sim_date(0)
    s = Session(CH, 11 * 60 + 30, 80.0, incoming_start=600, arrive=10 * 60 + 20, arrival_soc=60.0)
    with pytest.raises(InconsistentCarry):
        expand_day(day, [s], Carry())


def test_holiday_day_type_in_records():
    records, _ = expand_day(sim_date(0), [], Carry(), holidays={(1, 1)})
    assert {r.day_type for r in records} == {8}
    assert states(records) == [3] * 24
