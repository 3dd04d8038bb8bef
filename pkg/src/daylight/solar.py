"""Sun position for a site and civil timestamp.

Uses the low-precision solar coordinates of the Astronomical Almanac
(about 0.01 degree between 1950 and 2050, still far below daylighting
tolerances up to 2100). Altitudes are geometric: no refraction correction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

# apparent horizon dip used only to decide sunrise/sunset
HORIZON_DIP_DEG = -0.833
MIN_YEAR, MAX_YEAR = 1950, 2100


class SolarError(ValueError):
    pass


@dataclass(frozen=True)
class Site:
    """Geographic site. Latitude positive north, longitude positive east."""

    latitude: float
    longitude: float
    tz_offset: float = 0.0
    albedo: float = 0.2

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise SolarError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise SolarError(f"longitude {self.longitude} outside [-180, 180]")
        if not 0.0 <= self.albedo <= 1.0:
            raise SolarError(f"albedo {self.albedo} outside [0, 1]")


@dataclass(frozen=True)
class SunState:
    """Solar altitude/azimuth (degrees, azimuth clockwise from north) and
    direct normal illuminance in lux."""

    altitude: float
    azimuth: float
    direct_normal_illuminance: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.altitude <= 90.0:
            raise SolarError(f"altitude {self.altitude} outside [-90, 90]")
        if not 0.0 <= self.azimuth < 360.0:
            raise SolarError(f"azimuth {self.azimuth} outside [0, 360)")
        if self.direct_normal_illuminance < 0:
            raise SolarError("direct normal illuminance must be >= 0")

    @property
    def direction(self) -> np.ndarray:
        return sun_direction(self.altitude, self.azimuth)


def _to_utc(t: datetime, tz_offset: float) -> datetime:
    if t.tzinfo is not None:
        return t.astimezone(timezone.utc).replace(tzinfo=None)
    return t - timedelta(hours=tz_offset)


def julian_day(utc: datetime) -> float:
    return (utc - datetime(2000, 1, 1, 12)).total_seconds() / 86400.0 + 2451545.0


def _sun_equatorial(jd: float) -> tuple[float, float, float]:
    """Declination (rad), right ascension (rad) and Greenwich mean sidereal time (h)."""
    n = jd - 2451545.0
    mean_long = (280.460 + 0.9856474 * n) % 360.0
    anomaly = math.radians((357.528 + 0.9856003 * n) % 360.0)
    ecl_long = math.radians(mean_long + 1.915 * math.sin(anomaly) + 0.020 * math.sin(2 * anomaly))
    obliq = math.radians(23.439 - 0.0000004 * n)
    ra = math.atan2(math.cos(obliq) * math.sin(ecl_long), math.cos(ecl_long))
    dec = math.asin(math.sin(obliq) * math.sin(ecl_long))
    ut_hours = ((jd + 0.5) % 1.0) * 24.0
    gmst = (6.697375 + 0.0657098242 * (jd - 2451545.0 - ut_hours / 24.0) + 1.0027379 * ut_hours) % 24.0
    return dec, ra, gmst


def hour_angle(site: Site, utc: datetime) -> tuple[float, float]:
    """Local hour angle and declination of the sun, both in radians."""
    dec, ra, gmst = _sun_equatorial(julian_day(utc))
    ha = math.radians(15.0 * gmst + site.longitude) - ra
    ha = (ha + math.pi) % (2.0 * math.pi) - math.pi
    return ha, dec


def solar_position(site: Site, t: datetime) -> tuple[float, float]:
    """Return ``(altitude, azimuth)`` in degrees for civil time ``t``.

    Naive timestamps are local civil time at ``site.tz_offset`` hours from
    UTC (no daylight saving); aware timestamps are converted directly.
    """
    if not MIN_YEAR <= t.year <= MAX_YEAR:
        raise SolarError(f"timestamp {t.isoformat()} outside supported years {MIN_YEAR}-{MAX_YEAR}")
    ha, decl = hour_angle(site, _to_utc(t, site.tz_offset))
    lat = math.radians(site.latitude)

    sin_alt = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(ha)
    alt = math.degrees(math.asin(max(-1.0, min(1.0, sin_alt))))
    east = -math.cos(decl) * math.sin(ha)
    north = math.sin(decl) * math.cos(lat) - math.cos(decl) * math.sin(lat) * math.cos(ha)
    az = math.degrees(math.atan2(east, north)) % 360.0
    if az >= 360.0:
        az = 0.0
    return alt, az


def solar_noon(site: Site, day) -> datetime:
    """Local civil time (naive) at which the hour angle is zero on ``day``."""
    t = datetime(day.year, day.month, day.day, 12)
    for _ in range(3):
        ha, _ = hour_angle(site, _to_utc(t, site.tz_offset))
        # the sun's hour angle advances about 15 degrees per hour
        t -= timedelta(hours=math.degrees(ha) / 15.0)
    return t


def is_daytime(altitude: float) -> bool:
    return altitude > HORIZON_DIP_DEG


def sun_direction(altitude: float, azimuth: float) -> np.ndarray:
    """Beam propagation direction (from the sun toward the scene), unit length."""
    if not -90.0 <= altitude <= 90.0:
        raise SolarError(f"altitude {altitude} outside [-90, 90]")
    a, z = math.radians(altitude), math.radians(azimuth)
    return -np.array([math.sin(z) * math.cos(a), math.cos(z) * math.cos(a), math.sin(a)])


def direction_angles(d) -> tuple[float, float]:
    """Inverse of :func:`sun_direction`: ``(altitude, azimuth)`` in degrees."""
    v = -np.asarray(d, dtype=float)
    v = v / np.linalg.norm(v)
    alt = math.degrees(math.asin(max(-1.0, min(1.0, v[2]))))
    az = math.degrees(math.atan2(v[0], v[1])) % 360.0
    return alt, (0.0 if az >= 360.0 else az)
