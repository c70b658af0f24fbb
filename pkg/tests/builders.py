"""Config builders shared by the test modules."""

from __future__ import annotations

import random
from typing import Any

from flexigen.config import GenerationConfig, parse_config, validate_config


def bucket(p: float, start: str, end: str) -> dict:
    return {"probability": p, "from": start, "to": end}


def degenerate_doc(mode: str) -> dict[str, Any]:
    """Single-bucket, zero-spread config matching the hand-traced golden files.

    Home: leave in [07:00, 08:00), reach home in [18:30, 19:00).
    Office: reach work in [08:30, 09:00), leave in [17:00, 17:30).
    Legs are 10 km with no traffic; 10 km x 0.2 kWh/km on 50 kWh is 4 %.
    """
    one_dist = [{"probability": 1.0, "min_km": 10, "max_km": 10}]
    no_traffic = [{"probability": 1.0, "min_increase": 0.0, "max_increase": 0.0}]
    doc = {
        "scenario": f"golden_{mode}",
        "YEARS": 1,
        "ROTINA_CHANGE": 0.0,
        "CHARGER_CHANGE": 1.0 if mode == "office" else 0.0,
        "MAX_BATTERY_CAPACITY": 100,
        "DAY_WEEK": {"home": [bucket(1.0, "07:00", "08:00")], "office": [bucket(1.0, "08:30", "09:00")]},
        "NIGHT_WEEK": {"home": [bucket(1.0, "18:30", "19:00")], "office": [bucket(1.0, "17:00", "17:30")]},
        "WEEKENDS": {"stay_home": 1.0, "activities": [bucket(1.0, "10:00", "12:00")]},
        "DIST": one_dist,
        "DIST_WEEKEND": one_dist,
        "TRAFFIC_WEEK": no_traffic,
        "TRAFFIC_WEEKEND": no_traffic,
        "WORK_WEEKEND_CONSTANT": 0.0,
        "WORK_WEEKEND_RAND_1": 0.0,
        "WORK_WEEKEND_RAND_2": 0.0,
        "CHARGE_BAT": {"min_pct": 80, "max_pct": 80},
        "CARS": [{"car_id": "car_1", "battery_capacity": 50, "consumption": 0.2}],
        "CHARGERS_ALL": [],
        "CHARGER_EX": [],
        "distance_jitter": 0.0,
    }
    if mode == "home":
        doc["CHARGERS_ALL"] = [{"building": 1, "number": 1, "plug": 1, "power": 7.4}]
        doc["CHARGER_EX"] = [{"car_id": "car_1", "home_charger": "EVC_1_1_1"}]
    else:
        doc["CHARGERS_ALL"] = [{"building": 2, "number": 1, "plug": 1, "power": 22}]
        doc["CHARGER_EX"] = [{"car_id": "car_1", "office_building": 2}]
    return doc


def make_config(doc: dict[str, Any]) -> GenerationConfig:
    return GenerationConfig.model_validate(doc)


def with_changes(cfg: GenerationConfig, **changes: Any) -> GenerationConfig:
    """Copy of ``cfg`` with fields replaced and the result re-validated."""
    data = cfg.model_dump(by_alias=True)
    for name, value in changes.items():
        alias = GenerationConfig.model_fields[name].alias or name
        data[alias] = value
    return GenerationConfig.model_validate(data)


def _clock(minute: int) -> str:
    return f"{minute // 60:02d}:{minute % 60:02d}"


def _windows(rng: random.Random, lo: int, hi: int, n: int) -> list[dict]:
    """``n`` disjoint windows inside [lo, hi) with random weights summing to 1."""
    cuts = sorted(rng.sample(range(lo // 15 + 1, hi // 15), 2 * n))
    weights = [rng.random() + 0.05 for _ in range(n)]
    total = sum(weights)
    return [bucket(w / total, _clock(cuts[2 * i] * 15), _clock(cuts[2 * i + 1] * 15)) for i, w in enumerate(weights)]


def _numeric_rows(rng: random.Random, n: int, lo: float, hi: float, keys: tuple[str, str]) -> list[dict]:
    edges = sorted(rng.uniform(lo, hi) for _ in range(2 * n))
    weights = [rng.random() + 0.05 for _ in range(n)]
    total = sum(weights)
    return [{"probability": w / total, keys[0]: edges[2 * i], keys[1]: edges[2 * i + 1]} for i, w in enumerate(weights)]


def random_config(rng: random.Random, n_home: int = 1, n_office: int = 2, n_plugs: int = 2) -> GenerationConfig:
    """A random config that passes validation, with the given fleet."""
    while True:
        cap = rng.choice([80.0, 90.0, 100.0])
        lo = rng.uniform(30, 70)
        cars, chargers, bindings = [], [], []
        for i in range(n_home + n_office):
            cars.append({"car_id": f"ev_{i:02d}", "battery_capacity": rng.uniform(20, 100), "consumption": rng.uniform(0.1, 0.3)})
        for i in range(n_home):
            chargers.append({"building": i + 1, "number": 1, "plug": 1, "power": 7.4})
            bindings.append({"car_id": f"ev_{i:02d}", "home_charger": f"EVC_{i + 1}_1_1"})
        office = n_home + 1
        for j in range(n_plugs):
            chargers.append({"building": office, "number": j // 2 + 1, "plug": j % 2 + 1, "power": 22})
        for i in range(n_home, n_home + n_office):
            bindings.append({"car_id": f"ev_{i:02d}", "office_building": office})
        doc = {
            "scenario": "random",
            "YEARS": 1,
            "ROTINA_CHANGE": rng.random(),
            "CHARGER_CHANGE": rng.random(),
            "MAX_BATTERY_CAPACITY": cap,
            "DAY_WEEK": {"home": _windows(rng, 300, 720, rng.randint(1, 3)), "office": _windows(rng, 300, 720, rng.randint(1, 3))},
            "NIGHT_WEEK": {"home": _windows(rng, 840, 1440, rng.randint(1, 3)), "office": _windows(rng, 840, 1440, rng.randint(1, 3))},
            "WEEKENDS": {"stay_home": rng.random(), "activities": _windows(rng, 420, 1440, rng.randint(1, 3))},
            "DIST": _numeric_rows(rng, rng.randint(1, 3), 1, 80, ("min_km", "max_km")),
            "DIST_WEEKEND": _numeric_rows(rng, rng.randint(1, 3), 1, 80, ("min_km", "max_km")),
            "TRAFFIC_WEEK": _numeric_rows(rng, rng.randint(1, 4), 0, 2, ("min_increase", "max_increase")),
            "TRAFFIC_WEEKEND": _numeric_rows(rng, rng.randint(1, 4), 0, 2, ("min_increase", "max_increase")),
            "WORK_WEEKEND_CONSTANT": rng.random() * 0.3,
            "WORK_WEEKEND_RAND_1": rng.random() * 0.5,
            "WORK_WEEKEND_RAND_2": rng.random() * 0.5,
            "CHARGE_BAT": {"min_pct": lo, "max_pct": rng.uniform(lo, cap)},
            "CARS": cars,
            "CHARGERS_ALL": chargers,
            "CHARGER_EX": bindings,
            "reserve_soc": rng.uniform(0, 20),
            "average_speed": rng.uniform(30, 80),
            "start_weekday": rng.randint(1, 7),
            "holidays": rng.sample(["01-01", "02-14", "04-25", "07-04", "12-25"], rng.randint(0, 3)),
        }
        cfg = make_config(doc)
        if validate_config(cfg).ok:
            return cfg


def example_text() -> str:
    from flexigen.config import example_config_path

    return example_config_path().read_text(encoding="utf-8")


def parse_example() -> GenerationConfig:
    return parse_config(example_text())
