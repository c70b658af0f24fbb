"""Run a whole scenario and write its files.

Layout under ``<out>/<scenario>/``:

* ``<car_id>.csv``: the hourly dataset of one EV;
* ``trips/<car_id>.csv``: auxiliary minute-level trip log (not part of the
  hourly dataset contract);
* ``manifest.json``: run summary. It holds no timestamps, so reruns are
  byte-identical.
"""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .config import GenerationConfig, config_hash
from .dataset import write_csv
from .home import generate_home_profile
from .office import generate_office_profiles
from .timeline import DAYS_PER_YEAR, HOURS_PER_DAY, Profile

MODES = ("home", "office")
MANIFEST = "manifest.json"
TRIP_COLUMNS = (
    "day", "origin", "destination", "depart_minute", "distance_km",
    "traffic_factor", "duration_min", "energy_kwh",
)


def generate_profiles(
    cfg: GenerationConfig, mode: str, seed: int, horizon_days: Optional[int] = None
) -> list[Profile]:
    """All profiles of one mode, sorted by car id."""
    if mode == "home":
        return [generate_home_profile(seed, cfg, b, horizon_days) for b in cfg.home_bindings()]
    if mode == "office":
        by_building = defaultdict(list)
        for b in cfg.office_bindings():
            by_building[b.office_building].append(b)
        profiles = []
        for building in sorted(by_building):
            profiles.extend(generate_office_profiles(seed, cfg, by_building[building], horizon_days))
        return sorted(profiles, key=lambda p: p.car_id)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def write_trip_log(profile: Profile, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIP_COLUMNS)
        for day, leg in profile.trips:
            w.writerow((
                day, leg.origin, leg.destination, f"{leg.depart_minute:.2f}", f"{leg.distance:.3f}",
                f"{leg.traffic_factor:.4f}", leg.duration, f"{leg.energy:.4f}",
            ))
    return path


@dataclass(frozen=True)
class RunResult:
    directory: Path
    manifest: dict
    profiles: list[Profile]


def run_scenario(
    cfg: GenerationConfig,
    mode: str,
    seed: int,
    out_dir: Union[str, Path],
    horizon_days: Optional[int] = None,
) -> RunResult:
    horizon = cfg.years * DAYS_PER_YEAR if horizon_days is None else horizon_days
    profiles = generate_profiles(cfg, mode, seed, horizon)
    target = Path(out_dir) / cfg.scenario
    target.mkdir(parents=True, exist_ok=True)
    files = []
    for p in profiles:
        write_csv(p.records, target / f"{p.car_id}.csv", horizon * HOURS_PER_DAY)
        write_trip_log(p, target / "trips" / f"{p.car_id}.csv")
        files.append({
            "car_id": p.car_id,
            "charger": p.charger,
            "file": f"{p.car_id}.csv",
            "trips": f"trips/{p.car_id}.csv",
            "rows": len(p.records),
        })
    manifest = {
        "scenario": cfg.scenario,
        "mode": mode,
        "seed": seed,
        "years": cfg.years,
        "horizon_days": horizon,
        "config_hash": config_hash(cfg),
        "files": files,
    }
    (target / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return RunResult(target, manifest, profiles)


def read_manifest(directory: Union[str, Path]) -> Optional[dict]:
    path = Path(directory) / MANIFEST
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))
