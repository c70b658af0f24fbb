"""Trip physics: traffic, durations, energy and state-of-charge bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .config import Car, ChargeBand, GenerationConfig, TrafficBucket, table_weights
from .rng import RngStream, bernoulli, sample_bucket, sample_uniform

# Guards float noise in apply_trip; anything further below zero is a real depletion.
_SOC_EPS = 1e-9


class DepletionError(RuntimeError):
    """A trip would drain the battery below 0 %."""


@dataclass(frozen=True)
class TripLeg:
    origin: str
    destination: str
    depart_minute: float  # minutes from the start of the plan's day; may exceed 1440
    distance: float
    traffic_factor: float
    duration: int
    energy: float
    mid_trip_charge: Optional[float] = None
    soc_start: Optional[float] = None
    soc_end: Optional[float] = None

    @property
    def arrive_minute(self) -> float:
        return self.depart_minute + self.duration


def sample_traffic_factor(rng: RngStream, table: Sequence[TrafficBucket]) -> float:
    bucket = table[sample_bucket(rng, table_weights(table))]
    return 1.0 + sample_uniform(rng, bucket.min_increase, bucket.max_increase)


def trip_duration(distance: float, speed: float, factor: float) -> int:
    """Whole minutes, rounded half up, never below one."""
    if distance <= 0 or speed <= 0:
        raise ValueError("distance and speed must be positive")
    if factor < 1.0:
        raise ValueError("traffic factor must be >= 1")
    return max(1, math.floor(distance / speed * 60.0 * factor + 0.5))


def trip_energy(distance: float, consumption: float, factor: float, coupling: float) -> float:
    return distance * consumption * (1.0 + coupling * (factor - 1.0))


def energy_pct(energy: float, capacity: float) -> float:
    return energy / capacity * 100.0


def apply_trip(soc: float, energy: float, capacity: float) -> float:
    if capacity <= 0:
        raise ValueError("battery capacity must be positive")
    out = soc - energy_pct(energy, capacity)
    if out < -_SOC_EPS:
        raise DepletionError(f"trip needs {energy_pct(energy, capacity):.2f} % but only {soc:.2f} % is available")
    return max(out, 0.0)


def _charge_target(rng: RngStream, cfg: GenerationConfig) -> float:
    return sample_uniform(rng, cfg.charge_bat.min_pct, cfg.max_soc_cap)


def _below_reserve(projection: float, cfg: GenerationConfig) -> bool:
    return cfg.reserve_soc is not None and projection < cfg.reserve_soc


def decide_mid_trip_charge(rng: RngStream, projection: float, cfg: GenerationConfig) -> Optional[float]:
    """Charge target when the driver opts to charge en route or must (projection below reserve)."""
    wants = bernoulli(rng, cfg.charge_during_travel_prob)
    if wants or _below_reserve(projection, cfg):
        return _charge_target(rng, cfg)
    return None


def forced_charge_target(rng: RngStream, projection: float, cfg: GenerationConfig) -> Optional[float]:
    if _below_reserve(projection, cfg):
        return _charge_target(rng, cfg)
    return None


def sample_required_soc(rng: RngStream, band: ChargeBand) -> float:
    return sample_uniform(rng, band.min_pct, band.max_pct)


def drive(
    rng: RngStream,
    cfg: GenerationConfig,
    car: Car,
    origin: str,
    destination: str,
    depart_minute: float,
    distance: float,
    factor: float,
    soc_start: Optional[float],
    charge_target: Optional[float] = None,
) -> TripLeg:
    """Build one leg.

    With ``charge_target`` the battery is topped up to it before driving;
    otherwise a top-up is forced only when the arrival projection falls below
    the reserve. A top-up never lowers the SoC. ``soc_start=None`` produces a
    leg without SoC bookkeeping.
    """
    duration = trip_duration(distance, cfg.average_speed, factor)
    energy = trip_energy(distance, car.consumption, factor, cfg.traffic_energy_coupling)
    if soc_start is None:
        return TripLeg(origin, destination, depart_minute, distance, factor, duration, energy)
    target = charge_target
    if target is None:
        target = forced_charge_target(rng, soc_start - energy_pct(energy, car.battery_capacity), cfg)
    start = soc_start if target is None else max(target, soc_start)
    end = apply_trip(start, energy, car.battery_capacity)
    return TripLeg(origin, destination, depart_minute, distance, factor, duration, energy, target, soc_start, end)


def sample_distance(rng: RngStream, table: Sequence) -> float:
    bucket = table[sample_bucket(rng, table_weights(table))]
    return sample_uniform(rng, bucket.min_km, bucket.max_km)


def jittered(rng: RngStream, distance: float, jitter: float) -> float:
    """Return-leg distance: the outbound distance perturbed by up to ``jitter`` either way."""
    return distance * (1.0 + sample_uniform(rng, -jitter, jitter))
