"""Indoor daylighting: daylight factors on a work-plane mesh, direct sun
through sunspot projection, and comparison with measured illuminance."""

from .engine import (
    ErrorMetrics,
    IlluminanceResult,
    PreparedScene,
    ValidationReport,
    daylight_factor_at,
    illuminance_at,
    simulate,
    sunspot,
    validate,
)
from .geometry import Plane, Polygon
from .photometry import EfficacySet, PointSource, point_source_illuminance, split_weather, to_illuminance
from .scene import Scene, WeatherSample, load_scene, parse_scene, parse_weather
from .sky import DaylightComponents, SkyCondition, SkyModel
from .solar import Site, SunState, solar_position, sun_direction

__version__ = "0.1.0"

__all__ = [
    "DaylightComponents", "EfficacySet", "ErrorMetrics", "IlluminanceResult", "Plane", "PointSource",
    "Polygon", "PreparedScene", "Scene", "Site", "SkyCondition", "SkyModel", "SunState",
    "ValidationReport", "WeatherSample", "daylight_factor_at", "illuminance_at", "load_scene",
    "parse_scene", "parse_weather", "point_source_illuminance", "simulate", "solar_position",
    "split_weather", "sun_direction", "sunspot", "to_illuminance", "validate",
]
