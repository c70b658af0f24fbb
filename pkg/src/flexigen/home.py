"""Household EV tracked at its home charger."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .config import Car, GenerationConfig, RoutineBucket, ScenarioBinding, table_weights
from .mobility import (
    TripLeg,
    decide_mid_trip_charge,
    drive,
    energy_pct,
    jittered,
    sample_distance,
    sample_required_soc,
    sample_traffic_factor,
    trip_duration,
    trip_energy,
)
from .rng import (
    RngStream,
    bernoulli,
    derive_stream,
    sample_bucket,
    sample_time_in,
    sample_uniform,
)
from .timeline import (
    DAYS_PER_YEAR,
    Profile,
    Session,
    SimDate,
    build_calendar,
    emit_profile,
    is_rest_day,
    sim_date,
)

MAX_RESAMPLES = 100
FALLBACK_STAY = 8 * 60
# Days planned past the horizon to find the departure that ends the last session.
LOOKAHEAD_DAYS = 31


@dataclass(frozen=True)
class DayPlan:
    date: SimDate
    kind: str  # commute | weekend_trip | stay_home | deviated
    departure: Optional[TripLeg] = None
    return_leg: Optional[TripLeg] = None
    required_soc: Optional[float] = None  # for the session ending at ``departure``
    wants_charge: Optional[bool] = None  # office plans only


def next_hour(minute: float) -> float:
    """Start of the clock hour after the one containing ``minute``."""
    return 60.0 * (math.floor(minute / 60.0) + 1)


def earliest_departure_after(arrival: float) -> float:
    # The arrival hour is incoming, so the stay needs the whole next hour connected.
    return 60.0 * (math.ceil(arrival / 60.0) + 1)


def _pick_time(rng: RngStream, rows) -> float:
    return sample_time_in(rng, rows[sample_bucket(rng, table_weights(rows))])


def _union_pool(cfg: GenerationConfig) -> tuple[tuple[RoutineBucket, ...], tuple[float, ...]]:
    day, night = cfg.day_week.home, cfg.night_week.home
    weights = tuple(w / 2 for w in table_weights(day)) + tuple(w / 2 for w in table_weights(night))
    return day + night, weights


def decide_away_charge(
    rng: RngStream, cfg: GenerationConfig, car: Car, soc_at_destination: float, return_energy: float
) -> Optional[float]:
    """SoC target of a charge taken away from home before driving back, if any."""
    projection = soc_at_destination - energy_pct(return_energy, car.battery_capacity)
    return decide_mid_trip_charge(rng, projection, cfg)


def _round_trip(
    rng: RngStream,
    cfg: GenerationConfig,
    car: Car,
    date: SimDate,
    kind: str,
    destination: str,
    depart: float,
    distance: float,
    out_factor: float,
    back_factor: float,
    back_distance: float,
    return_start: float,
    required_soc: float,
) -> DayPlan:
    out = drive(rng, cfg, car, "home", destination, depart, distance, out_factor, required_soc)
    back_energy = trip_energy(back_distance, car.consumption, back_factor, cfg.traffic_energy_coupling)
    target = decide_away_charge(rng, cfg, car, out.soc_end, back_energy)
    back = drive(rng, cfg, car, destination, "home", return_start, back_distance, back_factor, out.soc_end, target)
    return DayPlan(date, kind, out, back, required_soc)


def plan_weekday(
    rng: RngStream,
    cfg: GenerationConfig,
    car: Car,
    date: SimDate,
    required_soc: float,
    not_before: float = 0.0,
) -> DayPlan:
    """Commute, remote-work day or time-shifted commute.

    ``not_before`` is the earliest allowed departure in minutes of this day.
    Day-week buckets give the departure, night-week buckets the arrival home.
    """
    deviated = bernoulli(rng, cfg.routine_change_prob)
    if deviated and bernoulli(rng, 0.5):
        return DayPlan(date, "stay_home")

    if deviated:
        pool, weights = _union_pool(cfg)

        def draw_pair() -> tuple[float, float]:
            a = sample_time_in(rng, pool[sample_bucket(rng, weights)])
            b = sample_time_in(rng, pool[sample_bucket(rng, weights)])
            return min(a, b), max(a, b)

        depart, arrive = draw_pair()
    else:
        depart = _pick_time(rng, cfg.day_week.home)
    distance = sample_distance(rng, cfg.dist)
    out_factor = sample_traffic_factor(rng, cfg.traffic_week)
    back_factor = sample_traffic_factor(rng, cfg.traffic_week)
    back_distance = jittered(rng, distance, cfg.distance_jitter)
    out_minutes = trip_duration(distance, cfg.average_speed, out_factor)
    back_minutes = trip_duration(back_distance, cfg.average_speed, back_factor)

    def feasible(dep: float, arr: float) -> bool:
        return arr - back_minutes >= max(dep + out_minutes, next_hour(dep))

    if not deviated:
        arrive = _pick_time(rng, cfg.night_week.home)
    for _ in range(MAX_RESAMPLES):
        depart = max(depart, not_before)
        if feasible(depart, arrive):
            break
        if deviated:
            depart, arrive = draw_pair()
        else:
            arrive = _pick_time(rng, cfg.night_week.home)
    else:
        depart = max(depart, not_before)
        arrive = max(depart + FALLBACK_STAY, max(depart + out_minutes, next_hour(depart)) + back_minutes)
    if depart >= 1440:
        return DayPlan(date, "stay_home")
    kind = "deviated" if deviated else "commute"
    return _round_trip(
        rng, cfg, car, date, kind, "work", depart, distance, out_factor, back_factor,
        back_distance, arrive - back_minutes, required_soc,
    )


def plan_weekend_day(
    rng: RngStream,
    cfg: GenerationConfig,
    car: Car,
    date: SimDate,
    required_soc: float,
    not_before: float = 0.0,
) -> DayPlan:
    """Stay home, or one leisure round trip inside an activity window."""
    if bernoulli(rng, cfg.weekends.stay_home):
        return DayPlan(date, "stay_home")
    activities = cfg.weekends.activities
    window = activities[sample_bucket(rng, table_weights(activities))]
    depart = max(sample_time_in(rng, window), not_before)
    distance = sample_distance(rng, cfg.dist_weekend)
    out_factor = sample_traffic_factor(rng, cfg.traffic_weekend)
    back_factor = sample_traffic_factor(rng, cfg.traffic_weekend)
    back_distance = jittered(rng, distance, cfg.distance_jitter)
    if depart >= 1440:
        return DayPlan(date, "stay_home")
    reach = depart + trip_duration(distance, cfg.average_speed, out_factor)
    return_start = sample_uniform(rng, reach, max(reach, float(window.hour_max)))
    return_start = max(return_start, next_hour(depart))
    return _round_trip(
        rng, cfg, car, date, "weekend_trip", "leisure", depart, distance, out_factor, back_factor,
        back_distance, return_start, required_soc,
    )


def generate_home_profile(
    master_seed: int,
    cfg: GenerationConfig,
    binding: ScenarioBinding,
    horizon_days: Optional[int] = None,
) -> Profile:
    """Hourly profile of one household EV at its home charger.

    Days are planned in order on the stream ``"<car_id>/home"``. The required
    SoC of a stay is drawn when it begins (horizon start or arrival home), and
    the EV leaves every stay holding exactly that SoC.
    """
    if binding.home_charger is None:
        raise ValueError(f"binding for {binding.car_id} has no home charger")
    horizon = cfg.years * DAYS_PER_YEAR if horizon_days is None else horizon_days
    car = cfg.car(binding.car_id)
    charger = binding.home_charger
    holidays = cfg.holiday_set()
    rng = derive_stream(master_seed, f"{car.car_id}/home")

    sessions: list[Session] = []
    trips: list[tuple[int, TripLeg]] = []
    required = sample_required_soc(rng, cfg.charge_bat)
    incoming_start = arrive = arrival_soc = None
    earliest = 60.0  # first hour of the horizon stays connected
    closed = False
    for day in range(horizon + LOOKAHEAD_DAYS):
        date = sim_date(day, cfg.start_weekday)
        base = day * 1440.0
        planner = plan_weekend_day if is_rest_day(date, holidays) else plan_weekday
        plan = planner(rng, cfg, car, date, required, earliest - base)
        if plan.departure is None:
            continue
        sessions.append(Session(charger, base + plan.departure.depart_minute, required, incoming_start, arrive, arrival_soc))
        if day >= horizon:
            closed = True
            break
        trips.append((day, plan.departure))
        trips.append((day, plan.return_leg))
        incoming_start = base + plan.return_leg.depart_minute
        arrive = base + plan.return_leg.arrive_minute
        arrival_soc = plan.return_leg.soc_end
        required = sample_required_soc(rng, cfg.charge_bat)
        earliest = earliest_departure_after(arrive)
    if not closed:
        end = (horizon + LOOKAHEAD_DAYS) * 1440.0
        sessions.append(Session(charger, max(end, earliest), required, incoming_start, arrive, arrival_soc))

    records = emit_profile(sessions, build_calendar(horizon, cfg.start_weekday), holidays)
    return Profile(car.car_id, "home", charger, records, trips)
