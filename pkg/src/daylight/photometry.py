"""Irradiance-to-illuminance conversion and isotropic point sources."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .geometry import as_point, unit

if TYPE_CHECKING:
    from .scene import WeatherSample
    from .solar import SunState

MAX_EFFICACY = 250.0
# beam is ignored below this solar altitude to avoid the 1/sin blow-up
BEAM_CUTOFF_ALTITUDE_DEG = 3.0


class PhotometryError(ValueError):
    pass


@dataclass(frozen=True)
class EfficacySet:
    """Luminous efficacies in lm/W. Defaults are generic literature values;
    override them with locally calibrated ones."""

    k_diffuse: float = 120.0
    k_beam: float = 105.0
    k_global: float = 110.0

    def __post_init__(self):
        for name in ("k_diffuse", "k_beam", "k_global"):
            k = getattr(self, name)
            if not 0.0 <= k <= MAX_EFFICACY:
                raise PhotometryError(f"{name}={k} outside [0, {MAX_EFFICACY:g}] lm/W")


@dataclass(frozen=True)
class PointSource:
    position: np.ndarray
    intensity: float

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))
        if self.intensity < 0:
            raise PhotometryError("intensity must be >= 0 cd")


def to_illuminance(irradiance: float, k: float) -> float:
    """Irradiance (W/m^2) times efficacy (lm/W) gives lux."""
    if irradiance < 0:
        raise PhotometryError(f"negative irradiance {irradiance}")
    return k * irradiance


def split_weather(sample: "WeatherSample", sun: "SunState", k: EfficacySet) -> tuple[float, float]:
    """Exterior diffuse horizontal and direct normal illuminance (lux).

    The beam part is derived from ``GHI - DHI`` and projected to the normal
    with ``1/sin(altitude)``; it is zero at or below the cutoff altitude.
    """
    ghi, dhi = sample.ghi, sample.dhi
    if dhi > ghi:
        raise PhotometryError(f"DHI {dhi} exceeds GHI {ghi} at {sample.timestamp}")
    e_dh = to_illuminance(dhi, k.k_diffuse)
    beam_h = ghi - dhi
    if sun.altitude <= BEAM_CUTOFF_ALTITUDE_DEG or beam_h == 0.0:
        return e_dh, 0.0
    return e_dh, k.k_beam * beam_h / math.sin(math.radians(sun.altitude))


def point_source_illuminance(src: PointSource, q, surface_normal) -> float:
    """Inverse-square cosine law, clamped to zero for back-facing sources."""
    q = as_point(q)
    r = src.position - q
    d2 = float(r @ r)
    if d2 == 0.0:
        raise PhotometryError("point coincides with the source")
    cos_t = float(unit(surface_normal) @ r) / math.sqrt(d2)
    if cos_t <= 0.0:
        return 0.0
    return src.intensity * cos_t / d2
