"""LGI test-cell fixture and deterministic synthetic weather days.

The bundled scene reproduces the published sensor layout; everything the
source does not state is marked ASSUMED inside the scene file.
"""
from __future__ import annotations

import math
from datetime import date, datetime, timedelta
from importlib import resources

from .photometry import EfficacySet
from .scene import Scene, WeatherSample, parse_scene
from .solar import Site, solar_position

OVERCAST_DAY = date(2008, 2, 10)
# austral winter: low noon sun from the north, so the door's sunspot reaches the sensors
BEAM_DAY = date(2008, 6, 21)


def scene_text() -> str:
    return resources.files("daylight").joinpath("data/lgi.scene").read_text(encoding="utf-8")


def scene_path():
    return resources.files("daylight").joinpath("data/lgi.scene")


def load_lgi_scene() -> Scene:
    return parse_scene(scene_text())


def clear_sky_ghi(altitude: float) -> float:
    """Haurwitz clear-sky global horizontal irradiance (W/m^2)."""
    if altitude <= 0.0:
        return 0.0
    s = math.sin(math.radians(altitude))
    return 1098.0 * s * math.exp(-0.057 / s)


def synthetic_day(site: Site, day: date, sky: str = "overcast", step_minutes: int = 1,
                  efficacy: EfficacySet | None = None) -> list[WeatherSample]:
    """Smooth, deterministic weather for one civil day.

    ``overcast``: GHI = DHI = 35 % of clear sky. ``mixed``: diffuse at 25 %
    of clear sky plus a beam part that comes and goes on a two-hour cycle,
    fully present at 12:00 local time.
    """
    if sky not in ("overcast", "mixed"):
        raise ValueError(f"unknown synthetic sky {sky!r}")
    k = efficacy or EfficacySet()
    start = datetime(day.year, day.month, day.day)
    out = []
    for m in range(0, 24 * 60, step_minutes):
        t = start + timedelta(minutes=m)
        alt, _ = solar_position(site, t)
        clear = clear_sky_ghi(alt)
        if sky == "overcast":
            ghi = dhi = 0.35 * clear
        else:
            dhi = 0.25 * clear
            cloud = min(1.0, max(0.0, 0.5 + 0.7 * math.cos(2.0 * math.pi * (m - 720) / 120.0)))
            ghi = dhi + 0.65 * clear * cloud
        ghi, dhi = round(ghi, 4), round(dhi, 4)
        out.append(WeatherSample(t, ghi, dhi, round(k.k_global * ghi, 4)))
    return out
