"""District layout: regions, distribution centers, the central port.

Coordinates are planar meters. Travel times are whole one-minute slots
(distance / speed, rounded up), which is the only place the clock and the
map meet.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

Point = tuple[float, float]


@dataclass(frozen=True)
class SubRegion:
    """Axis-aligned rectangle with a population weight."""

    min_corner: Point
    max_corner: Point
    weight: float


@dataclass(frozen=True)
class Region:
    pdc_location: Point
    subregions: tuple[SubRegion, ...]

    @property
    def weight(self) -> float:
        return sum(s.weight for s in self.subregions)


@dataclass(frozen=True)
class District:
    regions: tuple[Region, ...]
    port_location: Point
    total_uavs: int
    speed_kph: float

    @property
    def num_pdcs(self) -> int:
        return len(self.regions)

    def location_of(self, home: int) -> Point:
        """Position of home index 0 (the port) or 1..D (a PDC)."""
        if home == 0:
            return self.port_location
        return self.regions[home - 1].pdc_location

    @property
    def meters_per_slot(self) -> float:
        return self.speed_kph * 1000.0 / 60.0


def distance(a: Point, b: Point) -> float:
    """Straight-line distance in meters."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def travel_time_slots(dist_m: float, speed_kph: float) -> int:
    """Whole slots needed to cover dist_m; zero only for a zero-length trip."""
    if dist_m < 0:
        raise ValueError("negative distance")
    if speed_kph <= 0:
        raise ValueError("speed must be positive")
    return math.ceil(dist_m / (speed_kph * 1000.0 / 60.0))


def sample_destinations(region: Region, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw `count` delivery points, shape (count, 2): sub-region by weight,
    then uniform inside the chosen rectangle."""
    weights = np.array([s.weight for s in region.subregions], dtype=np.float64)
    total = weights.sum()
    if total <= 0:
        raise ValueError("region has no population weight")
    cum = np.cumsum(weights)
    idx = np.searchsorted(cum, rng.random(count) * total, side="right")
    idx = np.minimum(idx, len(weights) - 1)
    lo = np.array([s.min_corner for s in region.subregions], dtype=np.float64)
    hi = np.array([s.max_corner for s in region.subregions], dtype=np.float64)
    return rng.uniform(lo[idx], hi[idx])


def sample_destination(region: Region, rng: np.random.Generator) -> Point:
    """Draw one delivery point: sub-region by weight, then uniform inside it."""
    pt = sample_destinations(region, rng, 1)[0]
    return (float(pt[0]), float(pt[1]))


def district_from_dict(doc: dict) -> District:
    try:
        regions = []
        for reg in doc["regions"]:
            subs = tuple(
                SubRegion(
                    min_corner=tuple(s["min"]),
                    max_corner=tuple(s["max"]),
                    weight=float(s["weight"]),
                )
                for s in reg["subregions"]
            )
            if not subs:
                raise ValueError("region without subregions")
            regions.append(Region(pdc_location=tuple(reg["pdc"]), subregions=subs))
        return District(
            regions=tuple(regions),
            port_location=tuple(doc["port"]),
            total_uavs=int(doc["total_uavs"]),
            speed_kph=float(doc["speed_kph"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed district document: {exc}") from exc


def load_district(path: str) -> District:
    with open(path) as fh:
        return district_from_dict(json.load(fh))


def builtin_district() -> District:
    """The bundled synthetic four-region district."""
    text = resources.files("dronefleet").joinpath("data/district.json").read_text()
    return district_from_dict(json.loads(text))
