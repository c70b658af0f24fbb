"""Commuter fleet tracked at the shared chargers of one office building."""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .config import Car, Charger, GenerationConfig, ScenarioBinding, table_weights
from .home import (
    FALLBACK_STAY,
    MAX_RESAMPLES,
    DayPlan,
    earliest_departure_after,
    next_hour,
)
from .mobility import (
    drive,
    energy_pct,
    jittered,
    sample_distance,
    sample_required_soc,
    sample_traffic_factor,
    trip_duration,
)
from .rng import RngStream, bernoulli, derive_stream, sample_bucket, sample_time_in
from .timeline import (
    DAYS_PER_YEAR,
    Profile,
    Session,
    SimDate,
    build_calendar,
    emit_profile,
    is_rest_day,
)


@dataclass
class EmployeeProfile:
    car: Car
    weekend_worker: bool
    commute_distance: float
    stream: RngStream


def make_employee(master_seed: int, cfg: GenerationConfig, car: Car) -> EmployeeProfile:
    stream = derive_stream(master_seed, f"{car.car_id}/office")
    weekend_worker = bernoulli(stream, cfg.work_weekend_constant)
    distance = sample_distance(stream, cfg.dist)
    return EmployeeProfile(car, weekend_worker, distance, stream)


def decide_weekend_work(rng: RngStream, cfg: GenerationConfig, employee: EmployeeProfile, date: SimDate) -> bool:
    """Saturday uses the random-Saturday probability; Sunday and holidays the Sunday one."""
    if employee.weekend_worker:
        return True
    p = cfg.work_weekend_rand_sat if date.weekday == 6 else cfg.work_weekend_rand_sun
    return bernoulli(rng, p)


def _pick_time(rng: RngStream, rows) -> float:
    return sample_time_in(rng, rows[sample_bucket(rng, table_weights(rows))])


def plan_office_day(
    rng: RngStream,
    cfg: GenerationConfig,
    employee: EmployeeProfile,
    date: SimDate,
    not_before: float = 0.0,
    rest_day: bool = False,
) -> DayPlan:
    """One working day: drive in, stay, drive home.

    ``departure`` is the home-to-office leg, ``return_leg`` the trip home.
    ``not_before`` bounds the start of the inbound leg (minutes of this day).
    """
    car = employee.car
    traffic = cfg.traffic_weekend if rest_day else cfg.traffic_week
    arrive = _pick_time(rng, cfg.day_week.office)
    in_factor = sample_traffic_factor(rng, traffic)
    out_factor = sample_traffic_factor(rng, traffic)
    distance = employee.commute_distance
    back_distance = jittered(rng, distance, cfg.distance_jitter)
    in_minutes = trip_duration(distance, cfg.average_speed, in_factor)
    arrive = max(arrive, not_before + in_minutes)

    bound = earliest_departure_after(arrive)
    for _ in range(MAX_RESAMPLES):
        leave = _pick_time(rng, cfg.night_week.office)
        if leave >= bound:
            break
    else:
        leave = max(arrive + FALLBACK_STAY, bound)

    home_soc = sample_required_soc(rng, cfg.charge_bat)
    inbound = drive(rng, cfg, car, "home", "work", arrive - in_minutes, distance, in_factor, home_soc)
    required = sample_required_soc(rng, cfg.charge_bat)
    outbound = drive(rng, cfg, car, "work", "home", leave, back_distance, out_factor, None)
    margin = cfg.reserve_soc or 0.0
    needs = inbound.soc_end < energy_pct(outbound.energy, car.battery_capacity) + margin
    wants = bernoulli(rng, cfg.charge_during_travel_prob)
    return DayPlan(date, "commute", inbound, outbound, required, needs or wants)


@dataclass(frozen=True)
class StayRequest:
    car_id: str
    day: int
    incoming_start: float  # absolute minutes
    arrive: float
    depart: float
    wants_charge: bool
    arrival_soc: float
    required_soc: float

    @property
    def hours(self) -> tuple[int, int]:
        """Hours the plug is held: the inbound leg up to, not including, the departure hour."""
        return math.floor(self.incoming_start / 60.0), math.floor(self.depart / 60.0)


@dataclass
class PlugAssignment:
    assigned: dict[tuple[str, int], Charger] = field(default_factory=dict)
    hourly: dict[int, dict[str, str]] = field(default_factory=lambda: defaultdict(dict))

    def plug_for(self, car_id: str, day: int) -> Optional[Charger]:
        return self.assigned.get((car_id, day))


def allocate_plugs(requests: Iterable[StayRequest], plugs: Sequence[Charger]) -> PlugAssignment:
    """First come, first served by (arrival, car_id); the lowest free plug is held for the whole stay."""
    plugs = sorted(plugs, key=lambda c: c.key)
    held: dict[str, list[tuple[int, int]]] = {p.id: [] for p in plugs}
    out = PlugAssignment()
    for req in sorted(requests, key=lambda r: (r.arrive, r.car_id)):
        if not req.wants_charge:
            continue
        start, end = req.hours
        for plug in plugs:
            spans = held[plug.id]
            i = bisect.bisect_left(spans, (start, end))
            if i > 0 and spans[i - 1][1] > start:
                continue
            if i < len(spans) and spans[i][0] < end:
                continue
            spans.insert(i, (start, end))
            out.assigned[(req.car_id, req.day)] = plug
            for h in range(start, end):
                out.hourly[h][plug.id] = req.car_id
            break
    return out


def generate_office_profiles(
    master_seed: int,
    cfg: GenerationConfig,
    bindings: Sequence[ScenarioBinding],
    horizon_days: Optional[int] = None,
) -> list[Profile]:
    """Profiles, sorted by car id, of every EV bound to one office building."""
    buildings = {b.office_building for b in bindings}
    if None in buildings or len(buildings) > 1:
        raise ValueError("office bindings must all reference one building")
    building = buildings.pop() if buildings else None
    horizon = cfg.years * DAYS_PER_YEAR if horizon_days is None else horizon_days
    holidays = cfg.holiday_set()
    calendar = build_calendar(horizon, cfg.start_weekday)

    requests: list[StayRequest] = []
    trips: dict[str, list] = {}
    for binding in sorted(bindings, key=lambda b: b.car_id):
        employee = make_employee(master_seed, cfg, cfg.car(binding.car_id))
        rng = employee.stream
        car_trips = trips.setdefault(binding.car_id, [])
        earliest = -math.inf
        for date in calendar:
            rest = is_rest_day(date, holidays)
            if rest and not decide_weekend_work(rng, cfg, employee, date):
                continue
            base = date.index * 1440.0
            plan = plan_office_day(rng, cfg, employee, date, earliest - base, rest)
            car_trips.append((date.index, plan.departure))
            car_trips.append((date.index, plan.return_leg))
            leave = base + plan.return_leg.depart_minute
            requests.append(
                StayRequest(
                    binding.car_id, date.index,
                    base + plan.departure.depart_minute, base + plan.departure.arrive_minute, leave,
                    bool(plan.wants_charge), plan.departure.soc_end, plan.required_soc,
                )
            )
            earliest = max(next_hour(leave), base + plan.return_leg.arrive_minute)

    plugs = cfg.office_plugs(building) if building is not None else []
    assignment = allocate_plugs(requests, plugs)
    by_car: dict[str, list[Session]] = defaultdict(list)
    for req in requests:
        plug = assignment.plug_for(req.car_id, req.day)
        if plug is not None:
            by_car[req.car_id].append(
                Session(plug.id, req.depart, req.required_soc, req.incoming_start, req.arrive, req.arrival_soc)
            )
    profiles = []
    for car_id in sorted(trips):
        records = emit_profile(by_car.get(car_id, []), calendar, holidays)
        profiles.append(Profile(car_id, "office", None, records, trips[car_id]))
    return profiles
