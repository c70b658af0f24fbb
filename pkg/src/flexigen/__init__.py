"""Seed-reproducible generator of hourly EV charging-flexibility datasets."""

from __future__ import annotations

from .analysis import connection_run_lengths, hourly_profile, trip_duration_stats
from .config import (
    ConfigError,
    GenerationConfig,
    load_config,
    parse_config,
    serialize_config,
    validate_config,
)
from .dataset import HEADER, DatasetError, read_csv, validate_dataset, write_csv
from .home import generate_home_profile
from .mobility import DepletionError
from .office import generate_office_profiles
from .rng import RngStream, derive_stream
from .scenario import generate_profiles, run_scenario
from .timeline import EvHourRecord, Profile, Session, expand_day

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DatasetError",
    "DepletionError",
    "EvHourRecord",
    "GenerationConfig",
    "HEADER",
    "Profile",
    "RngStream",
    "Session",
    "connection_run_lengths",
    "derive_stream",
    "expand_day",
    "generate_home_profile",
    "generate_office_profiles",
    "generate_profiles",
    "hourly_profile",
    "load_config",
    "parse_config",
    "read_csv",
    "run_scenario",
    "serialize_config",
    "trip_duration_stats",
    "validate_config",
    "validate_dataset",
    "write_csv",
]
