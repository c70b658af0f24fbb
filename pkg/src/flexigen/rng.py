"""Named, seed-derived random streams and the sampling primitives built on them.

Each stream wraps :class:`random.Random` (Mersenne Twister) seeded with the
first 8 bytes of ``sha256(f"{master_seed}/{label}")``. Only ``random()`` is
used: CPython guarantees that method's sequence for a given integer seed
across releases. Every derived quantity (uniforms, bucket picks) is computed
here from those raw draws, never through other ``random`` helpers.
"""

from __future__ import annotations

import bisect
import hashlib
import math
import random
from itertools import accumulate
from typing import Sequence

from .config import RoutineBucket

_WEIGHT_TOLERANCE = 1e-9


def _stream_seed(master_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{master_seed}/{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


class RngStream:
    """A single-owner deterministic sequence of uniform draws in [0, 1)."""

    __slots__ = ("label", "_random", "draws")

    def __init__(self, master_seed: int, label: str):
        if not 0 <= master_seed < 2**64:
            raise ValueError("master seed must be an unsigned 64-bit integer")
        self.label = label
        self._random = random.Random(_stream_seed(master_seed, label))
        self.draws = 0

    def draw(self) -> float:
        self.draws += 1
        return self._random.random()

    def __repr__(self) -> str:
        return f"RngStream(label={self.label!r}, draws={self.draws})"


def derive_stream(master_seed: int, label: str) -> RngStream:
    return RngStream(master_seed, label)


def sample_bucket(rng: RngStream, weights: Sequence[float]) -> int:
    """Index ``i`` with probability ``weights[i]``; consumes one draw."""
    if not weights:
        raise ValueError("weights must be non-empty")
    if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1.0) > _WEIGHT_TOLERANCE:
        raise ValueError("weights must be non-negative and sum to 1")
    cumulative = list(accumulate(weights))
    i = bisect.bisect_right(cumulative, rng.draw())
    # Rounding in the running sum can leave u above the last edge.
    if i >= len(weights):
        i = max(j for j, w in enumerate(weights) if w > 0)
    return i


def sample_uniform(rng: RngStream, lo: float, hi: float) -> float:
    """Uniform value in ``[lo, hi)``; ``lo == hi`` returns ``lo``. Consumes one draw."""
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi})")
    u = rng.draw()
    if lo == hi:
        return lo
    value = lo + (hi - lo) * u
    if value >= hi:
        value = math.nextafter(hi, lo)
    return value


def sample_time_in(rng: RngStream, bucket: RoutineBucket) -> float:
    """Minute of day drawn uniformly from the bucket's window."""
    return sample_uniform(rng, bucket.hour_min, bucket.hour_max)


def bernoulli(rng: RngStream, p: float) -> bool:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return rng.draw() < p
