"""Scene data model, scene-file (YAML) parsing, and CSV time-series ingestion."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from datetime import datetime
from functools import cached_property
from typing import Any, NamedTuple

import numpy as np
import yaml

from .geometry import (
    Containment,
    GeometryError,
    PLANARITY_TOL,
    Polygon,
    point_in_polygon,
    point_segment_distance,
    points_in_polygon,
    polygon_area,
)
from .photometry import EfficacySet, PhotometryError
from .sky import DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR, DEFAULT_PATCH_N
from .solar import Site

log = logging.getLogger(__name__)

SURFACE_KINDS = ("floor", "ceiling", "wall")
CLOSURE_TOL = 1e-3
CLOSURE_WARN_LIMIT = 1e-2
WEATHER_HEADER = ["timestamp", "ghi_wm2", "dhi_wm2", "eg_lux"]
MEASUREMENT_HEADER = ["timestamp", "point_id", "e_lux"]


class SceneError(ValueError):
    """Scene problem located by a dotted ``path`` such as ``zone.surfaces[2]``."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SceneSyntaxError(SceneError):
    """The text is not parseable as a scene document at all."""


class SceneValidationError(SceneError):
    """The document parses but breaks the schema or a model invariant."""


class SeriesError(ValueError):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


@dataclass(frozen=True)
class Surface:
    id: str
    polygon: Polygon
    reflectance: float
    kind: str

    def __post_init__(self):
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError(f"reflectance {self.reflectance} outside [0, 1]")
        if self.kind not in SURFACE_KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}")


@dataclass(frozen=True)
class Glazing:
    id: str
    polygon: Polygon
    transmittance: float
    host_surface: str

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError(f"transmittance {self.transmittance} outside [0, 1]")

    @property
    def area(self) -> float:
        return polygon_area(self.polygon)


@dataclass(frozen=True)
class Obstruction:
    id: str
    polygon: Polygon
    reflectance: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError(f"reflectance {self.reflectance} outside [0, 1]")


@dataclass(frozen=True)
class Zone:
    surfaces: tuple[Surface, ...]
    glazings: tuple[Glazing, ...] = ()

    @cached_property
    def total_area(self) -> float:
        return float(sum(polygon_area(s.polygon) for s in self.surfaces))

    @cached_property
    def mean_reflectance(self) -> float:
        a = np.array([polygon_area(s.polygon) for s in self.surfaces])
        r = np.array([s.reflectance for s in self.surfaces])
        return float(a @ r / a.sum())

    @property
    def floors(self) -> list[Surface]:
        return [s for s in self.surfaces if s.kind == "floor"]

    def surface(self, sid: str) -> Surface:
        for s in self.surfaces:
            if s.id == sid:
                return s
        raise KeyError(sid)

    @cached_property
    def z_range(self) -> tuple[float, float]:
        z = np.concatenate([s.polygon.vertices[:, 2] for s in self.surfaces])
        return float(z.min()), float(z.max())

    def contains(self, q, tol: float = 1e-9) -> bool:
        """Whether ``q`` lies above some floor footprint and below the zone top."""
        q = np.asarray(q, dtype=float)
        if not self.z_range[0] - tol <= q[2] <= self.z_range[1] + tol:
            return False
        for f in self.floors:
            fp = f.polygon
            if abs(fp.normal[2]) < 1e-9:
                continue
            # height of the floor plane at (x, y)
            zf = (fp.offset - fp.normal[0] * q[0] - fp.normal[1] * q[1]) / fp.normal[2]
            if q[2] >= zf - tol and points_in_polygon(np.array([q[0], q[1], zf]), fp)[0] >= 0:
                return True
        return False


@dataclass(frozen=True)
class GridSpec:
    height: float
    spacing: float
    margin: float = 0.5

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("grid height must be >= 0")
        if self.spacing <= 0:
            raise ValueError("grid spacing must be > 0")
        if self.margin < 0:
            raise ValueError("grid margin must be >= 0")


class SensorPoint(NamedTuple):
    id: str
    x: float
    y: float
    z: float

    @property
    def point(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class SensorGrid:
    """Either explicit sensor points or a regular grid specification."""

    points: tuple[SensorPoint, ...] | None = None
    grid: GridSpec | None = None

    def __post_init__(self):
        if self.points is not None and self.grid is not None:
            raise ValueError("sensors take either points or a grid, not both")


@dataclass(frozen=True)
class Options:
    patch_n: int = DEFAULT_PATCH_N
    obstruction_luminance_factor: float = DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR
    enable_overhang_shading: bool = False

    def __post_init__(self):
        if self.patch_n < 1:
            raise ValueError("patch_n must be >= 1")
        if self.obstruction_luminance_factor < 0:
            raise ValueError("obstruction_luminance_factor must be >= 0")


@dataclass(frozen=True)
class Scene:
    site: Site
    zone: Zone
    obstructions: tuple[Obstruction, ...] = ()
    sensors: SensorGrid = field(default_factory=SensorGrid)
    efficacy: EfficacySet = field(default_factory=EfficacySet)
    options: Options = field(default_factory=Options)

    def sensor_points(self) -> list[SensorPoint]:
        if self.sensors.grid is not None:
            return expand_grid(self.zone, self.sensors.grid)
        return list(self.sensors.points or ())

    def with_options(self, **kw) -> "Scene":
        return replace(self, options=replace(self.options, **kw))


@dataclass(frozen=True)
class WeatherSample:
    timestamp: datetime
    ghi: float
    dhi: float
    eg_lux: float | None = None

    def __post_init__(self):
        if self.ghi < 0 or self.dhi < 0:
            raise ValueError("irradiance must be >= 0")
        if self.dhi > self.ghi:
            raise ValueError(f"DHI {self.dhi} exceeds GHI {self.ghi}")


class Measurement(NamedTuple):
    timestamp: datetime
    point_id: str
    e_lux: float


# --- grid -------------------------------------------------------------------

def expand_grid(zone: Zone, spec: GridSpec) -> list[SensorPoint]:
    """Regular grid over the floor footprint, ids ``P_<row>_<col>``.

    Rows run along +y and columns along +x, starting ``margin`` inside the
    floor bounding box. Points outside non-rectangular floors are dropped.
    """
    floors = zone.floors
    if not floors:
        raise SceneValidationError("zone", "no floor surface")
    allv = np.concatenate([f.polygon.vertices for f in floors])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    eps = 1e-9
    xs = np.arange(lo[0] + spec.margin, hi[0] - spec.margin + eps, spec.spacing)
    ys = np.arange(lo[1] + spec.margin, hi[1] - spec.margin + eps, spec.spacing)
    out = []
    for r, y in enumerate(ys):
        for c, x in enumerate(xs):
            for f in floors:
                fp = f.polygon
                zf = (fp.offset - fp.normal[0] * x - fp.normal[1] * y) / fp.normal[2]
                if points_in_polygon(np.array([x, y, zf]), fp)[0] >= 0:
                    out.append(SensorPoint(f"P_{r}_{c}", float(x), float(y), float(zf + spec.height)))
                    break
    if not out:
        raise SceneValidationError("sensors.grid", f"spacing {spec.spacing} m leaves no point on the floor")
    return out


# --- scene parsing ------------------------------------------------------------

def _get(d: dict, key: str, path: str, default: Any = ...):
    if not isinstance(d, dict):
        raise SceneValidationError(path, "expected a mapping")
    if key not in d:
        if default is ...:
            raise SceneValidationError(f"{path}.{key}" if path else key, "missing required key")
        return default
    return d[key]


def _num(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SceneValidationError(path, f"expected a finite number, got {v!r}")
    return float(v)


def _vertices(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or len(v) < 3:
        raise SceneValidationError(path, "expected a list of at least 3 [x, y, z] vertices")
    out = []
    for i, p in enumerate(v):
        if not isinstance(p, list) or len(p) != 3:
            raise SceneValidationError(f"{path}[{i}]", "expected [x, y, z]")
        out.append([_num(c, f"{path}[{i}]") for c in p])
    return np.array(out)


def _polygon(verts: np.ndarray, path: str, hint=None) -> Polygon:
    try:
        return Polygon(verts, hint)
    except GeometryError as e:
        raise SceneValidationError(path, str(e)) from None


def _build(path: str, ctor, **kw):
    try:
        return ctor(**kw)
    except (ValueError, TypeError) as e:
        raise SceneValidationError(path, str(e)) from None


def _label(path: str, ident) -> str:
    return f"{path} (id={ident!r})" if ident is not None else path


def _closure_gap(surfaces: list[Surface]) -> float:
    """Largest distance from a sampled surface edge point to the edges of the other surfaces."""
    edges = []
    for k, s in enumerate(surfaces):
        v = s.polygon.vertices
        for i in range(len(v)):
            edges.append((k, v[i], v[(i + 1) % len(v)]))
    worst = 0.0
    for k, a, b in edges:
        for t in (0.0, 0.25, 0.5, 0.75):
            q = a + t * (b - a)
            best = min((point_segment_distance(q, c, d) for j, c, d in edges if j != k), default=math.inf)
            worst = max(worst, best)
    return worst


def _validate_zone(zone: Zone):
    ids = set()
    for i, s in enumerate(zone.surfaces):
        if s.id in ids:
            raise SceneValidationError(_label(f"zone.surfaces[{i}]", s.id), "duplicate surface id")
        ids.add(s.id)
    if not zone.floors:
        raise SceneValidationError("zone.surfaces", "at least one surface of kind 'floor' is required")
    gap = _closure_gap(list(zone.surfaces))
    if gap > CLOSURE_WARN_LIMIT:
        raise SceneValidationError("zone.surfaces", f"surfaces do not close a volume (gap {gap:.3g} m)")
    if gap > CLOSURE_TOL:
        log.warning("zone surfaces leave a %.3g m gap (tolerance %g m)", gap, CLOSURE_TOL)
    gids = set()
    for i, g in enumerate(zone.glazings):
        path = _label(f"zone.glazings[{i}]", g.id)
        if g.id in gids:
            raise SceneValidationError(path, "duplicate glazing id")
        gids.add(g.id)
        if g.host_surface not in ids:
            raise SceneValidationError(path, f"host surface {g.host_surface!r} does not exist")
        host = zone.surface(g.host_surface).polygon
        dev = np.abs(g.polygon.vertices @ host.normal - host.offset).max()
        if dev > PLANARITY_TOL:
            raise SceneValidationError(path, f"not coplanar with host {g.host_surface!r} ({dev:.3g} m)")
        for v in g.polygon.vertices:
            if point_in_polygon(v, host) is Containment.OUTSIDE:
                raise SceneValidationError(path, f"vertex {v.tolist()} lies outside host {g.host_surface!r}")
    if zone.total_area <= 0:
        raise SceneValidationError("zone", "total surface area must be > 0")


def scene_from_dict(doc: dict) -> Scene:
    if not isinstance(doc, dict):
        raise SceneValidationError("", "scene document must be a mapping")

    sd = _get(doc, "site", "")
    site = _build("site", Site,
                  latitude=_num(_get(sd, "latitude_deg", "site"), "site.latitude_deg"),
                  longitude=_num(_get(sd, "longitude_deg", "site"), "site.longitude_deg"),
                  tz_offset=_num(_get(sd, "tz_offset_h", "site", 0.0), "site.tz_offset_h"),
                  albedo=_num(_get(sd, "albedo", "site", 0.2), "site.albedo"))

    zd = _get(doc, "zone", "")
    raw_surfaces = _get(zd, "surfaces", "zone")
    if not isinstance(raw_surfaces, list) or not raw_surfaces:
        raise SceneValidationError("zone.surfaces", "expected a non-empty list")
    loose = []
    for i, s in enumerate(raw_surfaces):
        path = _label(f"zone.surfaces[{i}]", s.get("id") if isinstance(s, dict) else None)
        verts = _vertices(_get(s, "vertices", path), f"{path}.vertices")
        loose.append((path, s, verts, _polygon(verts, f"{path}.vertices")))
    # interior reference: area-weighted mean of surface centroids
    areas = np.array([polygon_area(p) for *_, p in loose])
    ref = np.sum([a * p.centroid for a, (*_, p) in zip(areas, loose)], axis=0) / areas.sum()

    surfaces = []
    for path, s, verts, p in loose:
        kind = _get(s, "kind", path)
        if kind == "floor":
            hint = np.array([0.0, 0.0, 1.0])
        elif kind == "ceiling":
            hint = np.array([0.0, 0.0, -1.0])
        else:
            hint = ref - p.centroid
        surfaces.append(_build(path, Surface, id=str(_get(s, "id", path)),
                               polygon=_polygon(verts, f"{path}.vertices", hint),
                               reflectance=_num(_get(s, "reflectance", path), f"{path}.reflectance"),
                               kind=kind))
    by_id = {s.id: s for s in surfaces}

    glazings = []
    raw_glazings = _get(zd, "glazings", "zone", []) or []
    for i, g in enumerate(raw_glazings):
        path = _label(f"zone.glazings[{i}]", g.get("id") if isinstance(g, dict) else None)
        host = str(_get(g, "host_surface", path))
        outward = -by_id[host].polygon.normal if host in by_id else None
        glazings.append(_build(path, Glazing, id=str(_get(g, "id", path)),
                               polygon=_polygon(_vertices(_get(g, "vertices", path), f"{path}.vertices"),
                                                f"{path}.vertices", outward),
                               transmittance=_num(_get(g, "transmittance", path), f"{path}.transmittance"),
                               host_surface=host))
    zone = Zone(tuple(surfaces), tuple(glazings))
    _validate_zone(zone)

    obstructions = []
    for i, o in enumerate(_get(doc, "obstructions", "", []) or []):
        path = _label(f"obstructions[{i}]", o.get("id") if isinstance(o, dict) else None)
        obstructions.append(_build(path, Obstruction, id=str(_get(o, "id", path)),
                                   polygon=_polygon(_vertices(_get(o, "vertices", path), f"{path}.vertices"),
                                                    f"{path}.vertices"),
                                   reflectance=_num(_get(o, "reflectance", path, 0.0), f"{path}.reflectance")))

    sensors = SensorGrid()
    sens = _get(doc, "sensors", "", None)
    if sens is not None:
        if "points" in sens and "grid" in sens:
            raise SceneValidationError("sensors", "give either points or grid, not both")
        if "grid" in sens:
            gd = sens["grid"]
            gs = _build("sensors.grid", GridSpec,
                        height=_num(_get(gd, "height_m", "sensors.grid"), "sensors.grid.height_m"),
                        spacing=_num(_get(gd, "spacing_m", "sensors.grid"), "sensors.grid.spacing_m"),
                        margin=_num(_get(gd, "margin_m", "sensors.grid", 0.5), "sensors.grid.margin_m"))
            sensors = SensorGrid(grid=gs)
        else:
            pts, seen = [], set()
            for i, sp in enumerate(_get(sens, "points", "sensors")):
                path = _label(f"sensors.points[{i}]", sp.get("id") if isinstance(sp, dict) else None)
                pt = SensorPoint(str(_get(sp, "id", path)), *(_num(_get(sp, k, path), f"{path}.{k}")
                                                              for k in ("x", "y", "z")))
                if pt.id in seen:
                    raise SceneValidationError(path, "duplicate sensor id")
                seen.add(pt.id)
                if not zone.contains(pt.point):
                    raise SceneValidationError(path, "sensor lies outside the zone floor footprint")
                pts.append(pt)
            sensors = SensorGrid(points=tuple(pts))

    ed = _get(doc, "efficacy", "", {}) or {}
    defaults = EfficacySet()
    try:
        efficacy = EfficacySet(**{k: _num(_get(ed, k, "efficacy", getattr(defaults, k)), f"efficacy.{k}")
                                  for k in ("k_diffuse", "k_beam", "k_global")})
    except PhotometryError as e:
        raise SceneValidationError("efficacy", str(e)) from None

    od = _get(doc, "options", "", {}) or {}
    flag = _get(od, "enable_overhang_shading", "options", False)
    if not isinstance(flag, bool):
        raise SceneValidationError("options.enable_overhang_shading", "expected true or false")
    pn = _get(od, "patch_n", "options", DEFAULT_PATCH_N)
    if isinstance(pn, bool) or not isinstance(pn, int):
        raise SceneValidationError("options.patch_n", "expected an integer")
    options = _build("options", Options, patch_n=pn,
                     obstruction_luminance_factor=_num(
                         _get(od, "obstruction_luminance_factor", "options", DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR),
                         "options.obstruction_luminance_factor"),
                     enable_overhang_shading=flag)

    scene = Scene(site, zone, tuple(obstructions), sensors, efficacy, options)
    if sensors.grid is not None:
        scene.sensor_points()
    return scene


def parse_scene(text: str) -> Scene:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise SceneSyntaxError(where, f"malformed scene text: {getattr(e, 'problem', e)}") from None
    if doc is None:
        raise SceneSyntaxError("", "empty scene document")
    return scene_from_dict(doc)


def load_scene(path) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())


def scene_to_dict(scene: Scene) -> dict:
    def verts(p: Polygon):
        return [[float(c) for c in v] for v in p.vertices]

    doc: dict[str, Any] = {
        "site": {"latitude_deg": scene.site.latitude, "longitude_deg": scene.site.longitude,
                 "tz_offset_h": scene.site.tz_offset, "albedo": scene.site.albedo},
        "zone": {
            "surfaces": [{"id": s.id, "kind": s.kind, "reflectance": s.reflectance, "vertices": verts(s.polygon)}
                         for s in scene.zone.surfaces],
            "glazings": [{"id": g.id, "host_surface": g.host_surface, "transmittance": g.transmittance,
                          "vertices": verts(g.polygon)} for g in scene.zone.glazings],
        },
        "obstructions": [{"id": o.id, "reflectance": o.reflectance, "vertices": verts(o.polygon)}
                         for o in scene.obstructions],
        "efficacy": {"k_diffuse": scene.efficacy.k_diffuse, "k_beam": scene.efficacy.k_beam,
                     "k_global": scene.efficacy.k_global},
        "options": {"patch_n": scene.options.patch_n,
                    "obstruction_luminance_factor": scene.options.obstruction_luminance_factor,
                    "enable_overhang_shading": scene.options.enable_overhang_shading},
    }
    if scene.sensors.grid is not None:
        g = scene.sensors.grid
        doc["sensors"] = {"grid": {"height_m": g.height, "spacing_m": g.spacing, "margin_m": g.margin}}
    elif scene.sensors.points is not None:
        doc["sensors"] = {"points": [{"id": p.id, "x": p.x, "y": p.y, "z": p.z} for p in scene.sensors.points]}
    return doc


def serialize_scene(scene: Scene) -> str:
    return yaml.safe_dump(scene_to_dict(scene), sort_keys=False, default_flow_style=None)


# --- time series ---------------------------------------------------------------

def _rows(text: str, header: list[str]):
    reader = csv.reader(io.StringIO(text))
    first = next(reader, None)
    if first is None or (len(first) == 1 and not first[0].strip()):
        return
    got = [h.strip() for h in first]
    if got != header:
        raise SeriesError(1, f"expected header {','.join(header)!r}, got {','.join(got)!r}")
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        yield lineno, [c.strip() for c in row]


def _timestamp(s: str, row: int) -> datetime:
    try:
        return datetime.fromisoformat(s)
    except ValueError:
        raise SeriesError(row, f"bad ISO-8601 timestamp {s!r}") from None


def _float(s: str, row: int, name: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise SeriesError(row, f"{name}: not a number {s!r}") from None
    if not math.isfinite(v):
        raise SeriesError(row, f"{name}: non-finite value")
    return v


def parse_weather(text: str) -> list[WeatherSample]:
    """Parse ``timestamp,ghi_wm2,dhi_wm2,eg_lux`` rows; ``eg_lux`` may be empty."""
    out: list[WeatherSample] = []
    for row, cells in _rows(text, WEATHER_HEADER):
        if len(cells) not in (3, 4):
            raise SeriesError(row, f"expected 4 fields, got {len(cells)}")
        t = _timestamp(cells[0], row)
        ghi = _float(cells[1], row, "ghi_wm2")
        dhi = _float(cells[2], row, "dhi_wm2")
        eg = _float(cells[3], row, "eg_lux") if len(cells) == 4 and cells[3] else None
        if ghi < 0 or dhi < 0:
            raise SeriesError(row, "negative irradiance")
        if dhi > ghi:
            raise SeriesError(row, f"DHI {dhi} exceeds GHI {ghi}")
        if out and t <= out[-1].timestamp:
            raise SeriesError(row, f"timestamp {cells[0]} is not after the previous row")
        out.append(WeatherSample(t, ghi, dhi, eg))
    return out


def format_weather(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(WEATHER_HEADER)
    for s in samples:
        w.writerow([s.timestamp.isoformat(timespec="seconds"), f"{s.ghi:.4f}", f"{s.dhi:.4f}",
                    "" if s.eg_lux is None else f"{s.eg_lux:.4f}"])
    return buf.getvalue()


def parse_measurements(text: str) -> list[Measurement]:
    out = []
    for row, cells in _rows(text, MEASUREMENT_HEADER):
        if len(cells) != 3:
            raise SeriesError(row, f"expected 3 fields, got {len(cells)}")
        e = _float(cells[2], row, "e_lux")
        if e < 0:
            raise SeriesError(row, "negative illuminance")
        out.append(Measurement(_timestamp(cells[0], row), cells[1], e))
    return out


def format_measurements(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MEASUREMENT_HEADER)
    for m in rows:
        w.writerow([m.timestamp.isoformat(timespec="seconds"), m.point_id, f"{m.e_lux:.4f}"])
    return buf.getvalue()


__all__ = [
    "Glazing", "GridSpec", "Measurement", "Obstruction", "Options", "Scene", "SceneError",
    "SceneSyntaxError", "SceneValidationError", "SensorGrid", "SensorPoint", "SeriesError",
    "Surface", "WeatherSample", "Zone", "expand_grid", "format_measurements", "format_weather",
    "load_scene", "parse_measurements", "parse_scene", "parse_weather", "scene_from_dict",
    "scene_to_dict", "serialize_scene",
]
