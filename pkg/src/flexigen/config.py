"""Generation parameters: document model, parsing, serialization and validation.

The config document is YAML. Every published input variable keeps its
upper-case name as the document key (``DAY_WEEK``, ``TRAFFIC_WEEK``, ...);
the generator-level extensions (speed, traffic/energy coupling, reserve SoC,
holidays, seed, ...) use lower-case keys and are optional.
"""

from __future__ import annotations

import hashlib
import logging
import math
import re
from pathlib import Path
from typing import Annotated, Any, Optional, Sequence, Union

import yaml
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    ValidationError,
)

from .report import ValidationReport

logger = logging.getLogger(__name__)

MINUTES_PER_DAY = 1440
SUM_TOLERANCE = 1e-9
NORMALIZE_BAND = 0.15

# Published variable name -> GenerationConfig field.
TABLE1_FIELDS: dict[str, str] = {
    "ROTINA_CHANGE": "routine_change_prob",
    "MAX_BATTERY_CAPACITY": "max_soc_cap",
    "CHARGER_CHANGE": "charge_during_travel_prob",
    "YEARS": "years",
    "CHARGER_EX": "bindings",
    "DAY_WEEK": "day_week",
    "NIGHT_WEEK": "night_week",
    "WEEKENDS": "weekends",
    "DIST": "dist",
    "DIST_WEEKEND": "dist_weekend",
    "TRAFFIC_WEEK": "traffic_week",
    "TRAFFIC_WEEKEND": "traffic_weekend",
    "WORK_WEEKEND_CONSTANT": "work_weekend_constant",
    "WORK_WEEKEND_RAND_1": "work_weekend_rand_sat",
    "WORK_WEEKEND_RAND_2": "work_weekend_rand_sun",
    "CHARGE_BAT": "charge_bat",
    "CARS": "cars",
    "CHARGERS_ALL": "chargers",
}


class ConfigError(ValueError):
    """Raised when a config document cannot be loaded."""


_CLOCK_RE = re.compile(r"^(\d{1,2}):(\d{2})$")
_HOLIDAY_RE = re.compile(r"^(\d{2})-(\d{2})$")
_CHARGER_ID_RE = re.compile(r"^EVC_(\d+)_(\d+)_(\d+)$")
_MONTH_DAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _parse_clock(value: Any) -> Any:
    # Bare integers are minutes of day (YAML 1.1 also reads unquoted 17:00 as 1020).
    if isinstance(value, bool):
        raise ValueError("expected a clock time 'HH:MM'")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        m = _CLOCK_RE.match(value.strip())
        if not m or int(m.group(2)) >= 60:
            raise ValueError(f"expected a clock time 'HH:MM', got {value!r}")
        return int(m.group(1)) * 60 + int(m.group(2))
    raise ValueError(f"expected a clock time 'HH:MM', got {value!r}")


def format_clock(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


Clock = Annotated[int, BeforeValidator(_parse_clock), PlainSerializer(format_clock, return_type=str)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class RoutineBucket(_Model):
    """A probability mass spread uniformly over a clock window ``[from, to)``."""

    probability: float
    hour_min: Clock = Field(alias="from")
    hour_max: Clock = Field(alias="to")


class DistanceBucket(_Model):
    probability: float
    min_km: float
    max_km: float


class TrafficBucket(_Model):
    """Extra travel time as a fraction: 0.10 means +10 %."""

    probability: float
    min_increase: float
    max_increase: float


class RoutineTables(_Model):
    home: tuple[RoutineBucket, ...]
    office: tuple[RoutineBucket, ...]


class WeekendTable(_Model):
    """Weekend behaviour: stay at home, or one activity drawn from ``activities``.

    The activity probabilities are conditional on leaving home.
    """

    stay_home: float
    activities: tuple[RoutineBucket, ...] = ()


class ChargeBand(_Model):
    min_pct: float
    max_pct: float


class Car(_Model):
    car_id: str
    battery_capacity: float
    consumption: float


class Charger(_Model):
    building: int
    number: int
    plug: int
    power: float

    @property
    def id(self) -> str:
        return f"EVC_{self.building}_{self.number}_{self.plug}"

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.building, self.number, self.plug)


class ScenarioBinding(_Model):
    car_id: str
    home_charger: Optional[str] = None
    office_building: Optional[int] = None


class GenerationConfig(_Model):
    years: int = Field(alias="YEARS")
    routine_change_prob: float = Field(alias="ROTINA_CHANGE")
    charge_during_travel_prob: float = Field(alias="CHARGER_CHANGE")
    max_soc_cap: float = Field(alias="MAX_BATTERY_CAPACITY")
    day_week: RoutineTables = Field(alias="DAY_WEEK")
    night_week: RoutineTables = Field(alias="NIGHT_WEEK")
    weekends: WeekendTable = Field(alias="WEEKENDS")
    dist: tuple[DistanceBucket, ...] = Field(alias="DIST")
    dist_weekend: tuple[DistanceBucket, ...] = Field(alias="DIST_WEEKEND")
    traffic_week: tuple[TrafficBucket, ...] = Field(alias="TRAFFIC_WEEK")
    traffic_weekend: tuple[TrafficBucket, ...] = Field(alias="TRAFFIC_WEEKEND")
    work_weekend_constant: float = Field(alias="WORK_WEEKEND_CONSTANT")
    work_weekend_rand_sat: float = Field(alias="WORK_WEEKEND_RAND_1")
    work_weekend_rand_sun: float = Field(alias="WORK_WEEKEND_RAND_2")
    charge_bat: ChargeBand = Field(alias="CHARGE_BAT")
    cars: tuple[Car, ...] = Field(alias="CARS")
    chargers: tuple[Charger, ...] = Field(alias="CHARGERS_ALL")
    bindings: tuple[ScenarioBinding, ...] = Field(alias="CHARGER_EX")

    scenario: str = "scenario"
    average_speed: float = 50.0
    traffic_energy_coupling: float = 0.5
    # None disables forced charging below the reserve.
    reserve_soc: Optional[float] = 10.0
    distance_jitter: float = 0.05
    holidays: tuple[str, ...] = ()
    start_weekday: int = 1
    seed: int = 0

    def car(self, car_id: str) -> Car:
        for car in self.cars:
            if car.car_id == car_id:
                return car
        raise KeyError(car_id)

    def charger(self, charger_id: str) -> Charger:
        for charger in self.chargers:
            if charger.id == charger_id:
                return charger
        raise KeyError(charger_id)

    def home_bindings(self) -> list[ScenarioBinding]:
        return sorted((b for b in self.bindings if b.home_charger is not None), key=lambda b: b.car_id)

    def office_bindings(self) -> list[ScenarioBinding]:
        return sorted((b for b in self.bindings if b.office_building is not None), key=lambda b: b.car_id)

    def office_plugs(self, building: int) -> list[Charger]:
        return sorted((c for c in self.chargers if c.building == building), key=lambda c: c.key)

    def holiday_set(self) -> frozenset[tuple[int, int]]:
        out = set()
        for text in self.holidays:
            m = _HOLIDAY_RE.match(text)
            if m:
                out.add((int(m.group(1)), int(m.group(2))))
        return frozenset(out)


Bucket = Union[RoutineBucket, DistanceBucket, TrafficBucket]


def table_weights(rows: Sequence[Bucket]) -> tuple[float, ...]:
    """Row probabilities divided by their sum."""
    total = math.fsum(r.probability for r in rows)
    if total <= 0:
        raise ValueError("probability table has no mass")
    return tuple(r.probability / total for r in rows)


def probability_tables(cfg: GenerationConfig) -> dict[str, tuple[Bucket, ...]]:
    return {
        "DAY_WEEK.home": cfg.day_week.home,
        "DAY_WEEK.office": cfg.day_week.office,
        "NIGHT_WEEK.home": cfg.night_week.home,
        "NIGHT_WEEK.office": cfg.night_week.office,
        "WEEKENDS.activities": cfg.weekends.activities,
        "DIST": cfg.dist,
        "DIST_WEEKEND": cfg.dist_weekend,
        "TRAFFIC_WEEK": cfg.traffic_week,
        "TRAFFIC_WEEKEND": cfg.traffic_weekend,
    }


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<document>"
        kind = err["type"]
        if kind == "extra_forbidden":
            lines.append(f"unknown key '{path}'")
        elif kind == "missing":
            lines.append(f"missing mandatory key '{path}'")
        else:
            lines.append(f"type mismatch at '{path}': {err['msg']}")
    return "; ".join(lines)


def parse_config(document: str) -> GenerationConfig:
    """Parse a YAML config document.

    Tables whose probabilities sum to within 0.15 of one are accepted as is and
    normalized at sampling time; a warning is logged for each. Invariant
    checks live in :func:`validate_config`.
    """
    try:
        data = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"syntax error{where}: {problem}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping at top level")
    allowed = {f.alias or name for name, f in GenerationConfig.model_fields.items()}
    unknown = sorted(str(k) for k in data if k not in allowed)
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}'")
    try:
        cfg = GenerationConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation_error(exc)) from exc
    for name, rows in probability_tables(cfg).items():
        total = math.fsum(r.probability for r in rows)
        if rows and SUM_TOLERANCE < abs(total - 1.0) <= NORMALIZE_BAND:
            logger.warning("%s probabilities sum to %.6g; normalizing", name, total)
    return cfg


def load_config(path: Union[str, Path]) -> GenerationConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def example_config_path() -> Path:
    """Path of the bundled example scenario (three households, one office building)."""
    return Path(__file__).with_name("data") / "portugal_example.yaml"


def load_example_config() -> GenerationConfig:
    return load_config(example_config_path())


def serialize_config(cfg: GenerationConfig) -> str:
    data = cfg.model_dump(mode="json", by_alias=True)
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, allow_unicode=True)


def config_hash(cfg: GenerationConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()


def _check_fraction(report: ValidationReport, value: float, where: str) -> None:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        report.add("fatal", "probability-range", f"{value} is not in [0, 1]", where)


def _check_table(report: ValidationReport, rows: Sequence[Bucket], where: str) -> None:
    if not rows:
        report.add("fatal", "empty-table", "probability table has no rows", where)
        return
    for i, row in enumerate(rows):
        _check_fraction(report, row.probability, f"{where}[{i}].probability")
    total = math.fsum(r.probability for r in rows)
    gap = abs(total - 1.0)
    if gap <= SUM_TOLERANCE:
        return
    if gap <= NORMALIZE_BAND:
        report.add("warning", "probability-sum", f"probabilities sum to {total:.6g}; normalized to 1", where)
    else:
        report.add("fatal", "probability-sum", f"probabilities sum to {total:.6g}", where)


def _check_routine(report: ValidationReport, rows: Sequence[RoutineBucket], where: str) -> None:
    _check_table(report, rows, where)
    for i, row in enumerate(rows):
        at = f"{where}[{i}]"
        if not 0 <= row.hour_min < MINUTES_PER_DAY:
            report.add("fatal", "time-range", f"window start {row.hour_min} min outside [0, 1440)", at)
        if not 0 < row.hour_max <= MINUTES_PER_DAY:
            report.add("fatal", "time-range", f"window end {row.hour_max} min outside (0, 1440]", at)
        if row.hour_min >= row.hour_max:
            report.add("fatal", "empty-window", "window start is not before window end", at)
    ordered = sorted(rows, key=lambda r: (r.hour_min, r.hour_max))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.hour_min < prev.hour_max:
            report.add(
                "fatal",
                "overlap",
                f"windows {format_clock(prev.hour_min)}-{format_clock(prev.hour_max)} and "
                f"{format_clock(cur.hour_min)}-{format_clock(cur.hour_max)} overlap",
                where,
            )


def _max_leg_pct(cfg: GenerationConfig, car: Car) -> float:
    max_km = max((d.max_km for d in (*cfg.dist, *cfg.dist_weekend)), default=0.0)
    max_extra = max((t.max_increase for t in (*cfg.traffic_week, *cfg.traffic_weekend)), default=0.0)
    km = max_km * (1.0 + cfg.distance_jitter)
    kwh = km * car.consumption * (1.0 + cfg.traffic_energy_coupling * max_extra)
    return kwh / car.battery_capacity * 100.0


def validate_config(cfg: GenerationConfig) -> ValidationReport:
    """Check every config invariant; findings are returned, never raised."""
    report = ValidationReport()
    if cfg.years < 1:
        report.add("fatal", "years", "YEARS must be at least 1", "YEARS")
    _check_fraction(report, cfg.routine_change_prob, "ROTINA_CHANGE")
    _check_fraction(report, cfg.charge_during_travel_prob, "CHARGER_CHANGE")
    _check_fraction(report, cfg.work_weekend_constant, "WORK_WEEKEND_CONSTANT")
    _check_fraction(report, cfg.work_weekend_rand_sat, "WORK_WEEKEND_RAND_1")
    _check_fraction(report, cfg.work_weekend_rand_sun, "WORK_WEEKEND_RAND_2")
    _check_fraction(report, cfg.weekends.stay_home, "WEEKENDS.stay_home")
    if not 0.0 < cfg.max_soc_cap <= 100.0:
        report.add("fatal", "soc-cap", "MAX_BATTERY_CAPACITY must be in (0, 100]", "MAX_BATTERY_CAPACITY")

    for key in ("home", "office"):
        _check_routine(report, getattr(cfg.day_week, key), f"DAY_WEEK.{key}")
        _check_routine(report, getattr(cfg.night_week, key), f"NIGHT_WEEK.{key}")
    if cfg.weekends.activities:
        _check_routine(report, cfg.weekends.activities, "WEEKENDS.activities")
    elif cfg.weekends.stay_home < 1.0:
        report.add("fatal", "empty-table", "no weekend activities but stay_home < 1", "WEEKENDS.activities")

    for name in ("DIST", "DIST_WEEKEND"):
        rows = cfg.dist if name == "DIST" else cfg.dist_weekend
        _check_table(report, rows, name)
        for i, row in enumerate(rows):
            if row.min_km <= 0:
                report.add("fatal", "distance-range", "min_km must be positive", f"{name}[{i}]")
            if row.max_km < row.min_km:
                report.add("fatal", "distance-range", "max_km is below min_km", f"{name}[{i}]")
    for name in ("TRAFFIC_WEEK", "TRAFFIC_WEEKEND"):
        rows = cfg.traffic_week if name == "TRAFFIC_WEEK" else cfg.traffic_weekend
        _check_table(report, rows, name)
        for i, row in enumerate(rows):
            if row.min_increase < 0:
                report.add("fatal", "traffic-range", "min_increase must be non-negative", f"{name}[{i}]")
            if row.max_increase < row.min_increase:
                report.add("fatal", "traffic-range", "max_increase is below min_increase", f"{name}[{i}]")

    band = cfg.charge_bat
    if band.min_pct > band.max_pct:
        report.add("fatal", "charge-band", "min exceeds max", "CHARGE_BAT")
    if band.min_pct < 0:
        report.add("fatal", "charge-band", "min_pct must be non-negative", "CHARGE_BAT")
    if band.max_pct > cfg.max_soc_cap:
        report.add("fatal", "charge-band", "max_pct exceeds MAX_BATTERY_CAPACITY", "CHARGE_BAT")

    car_ids = [c.car_id for c in cfg.cars]
    if not car_ids:
        report.add("fatal", "cars", "no cars defined", "CARS")
    for i, car in enumerate(cfg.cars):
        if car_ids.count(car.car_id) > 1:
            report.add("fatal", "duplicate-car", f"car id {car.car_id!r} is defined twice", f"CARS[{i}]")
        if car.battery_capacity <= 0 or car.consumption <= 0:
            report.add("fatal", "car-values", "capacity and consumption must be positive", f"CARS[{i}]")
        elif _max_leg_pct(cfg, car) > band.min_pct:
            report.add(
                "fatal",
                "leg-exceeds-battery",
                f"longest possible leg needs {_max_leg_pct(cfg, car):.1f} % of the battery, "
                f"more than the CHARGE_BAT minimum {band.min_pct:g} %",
                f"CARS[{i}]",
            )

    seen: set[tuple[int, int, int]] = set()
    for i, ch in enumerate(cfg.chargers):
        if min(ch.building, ch.number, ch.plug) < 0:
            report.add("fatal", "charger-index", "charger indices must be non-negative", f"CHARGERS_ALL[{i}]")
        if ch.power <= 0:
            report.add("fatal", "charger-power", "charger power must be positive", f"CHARGERS_ALL[{i}]")
        if ch.key in seen:
            report.add("fatal", "duplicate-charger", f"{ch.id} is defined twice", f"CHARGERS_ALL[{i}]")
        seen.add(ch.key)

    charger_ids = {c.id for c in cfg.chargers}
    home_seen: dict[str, str] = {}
    bound: set[tuple[str, str]] = set()
    for i, b in enumerate(cfg.bindings):
        at = f"CHARGER_EX[{i}]"
        if b.car_id not in car_ids:
            report.add("fatal", "unknown-car", f"car {b.car_id!r} is not in CARS", at)
        if (b.home_charger is None) == (b.office_building is None):
            report.add("fatal", "binding-kind", "set exactly one of home_charger / office_building", at)
            continue
        mode = "home" if b.home_charger is not None else "office"
        if (b.car_id, mode) in bound:
            report.add("fatal", "duplicate-binding", f"car {b.car_id!r} bound twice for {mode}", at)
        bound.add((b.car_id, mode))
        if b.home_charger is not None:
            if b.home_charger not in charger_ids:
                report.add("fatal", "unknown-charger", f"{b.home_charger} is not in CHARGERS_ALL", at)
            elif b.home_charger in home_seen:
                report.add("fatal", "shared-home-charger", f"{b.home_charger} already serves {home_seen[b.home_charger]}", at)
            home_seen[b.home_charger] = b.car_id
        elif not any(c.building == b.office_building for c in cfg.chargers):
            report.add("warning", "office-without-plugs", f"building {b.office_building} has no chargers", at)

    if cfg.average_speed <= 0:
        report.add("fatal", "speed", "average_speed must be positive", "average_speed")
    _check_fraction(report, cfg.traffic_energy_coupling, "traffic_energy_coupling")
    if cfg.reserve_soc is not None and not 0.0 <= cfg.reserve_soc < cfg.max_soc_cap:
        report.add("fatal", "reserve", "reserve_soc must lie in [0, MAX_BATTERY_CAPACITY)", "reserve_soc")
    if not 0.0 <= cfg.distance_jitter < 1.0:
        report.add("fatal", "jitter", "distance_jitter must lie in [0, 1)", "distance_jitter")
    if not 1 <= cfg.start_weekday <= 7:
        report.add("fatal", "start-weekday", "start_weekday must be 1 (Monday) .. 7 (Sunday)", "start_weekday")
    if not 0 <= cfg.seed < 2**64:
        report.add("fatal", "seed", "seed must be an unsigned 64-bit integer", "seed")
    for i, text in enumerate(cfg.holidays):
        m = _HOLIDAY_RE.match(text)
        if not m or not 1 <= int(m.group(1)) <= 12 or not 1 <= int(m.group(2)) <= _MONTH_DAYS[int(m.group(1)) - 1]:
            report.add("fatal", "holiday", f"{text!r} is not a valid MM-DD date in a 365-day year", f"holidays[{i}]")
    return report


def parse_charger_id(text: str) -> Optional[tuple[int, int, int]]:
    m = _CHARGER_ID_RE.match(text)
    if not m:
        return None
    return int(m.group(1)), int(m.group(2)), int(m.group(3))
