"""Per-point indoor illuminance: daylight factor, sunspot, time series, validation."""
from __future__ import annotations

import bisect
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

from .geometry import (
    Polygon,
    clip_polygon,
    points_in_polygon,
    project_polygon,
    subtract_all,
)
from .photometry import split_weather
from .scene import Measurement, Scene, WeatherSample
from .sky import (
    DaylightComponents,
    PatchGrid,
    SkyCondition,
    SkyModel,
    internally_reflected_component,
    obstruction_angle,
    window_components,
)
from .solar import SunState, solar_position, sun_direction

RESULTS_HEADER = ["timestamp", "point_id", "sc_pct", "erc_pct", "irc_pct", "df_pct",
                  "e_diffuse_lux", "e_direct_lux", "e_total_lux"]
METRICS_HEADER = ["point_id", "n", "mbe_lux", "rmse_lux", "rmse_rel"]
MATCH_TOLERANCE_S = 30.0


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class IlluminanceResult:
    timestamp: datetime
    point_id: str
    components: DaylightComponents
    e_diffuse: float
    e_direct: float
    e_total: float = field(init=False)

    def __post_init__(self):
        if self.e_diffuse < 0 or self.e_direct < 0:
            raise EngineError("illuminance must be >= 0")
        object.__setattr__(self, "e_total", self.e_diffuse + self.e_direct)


@dataclass(frozen=True)
class ErrorMetrics:
    mbe: float
    rmse: float
    rmse_rel: float
    n: int


@dataclass(frozen=True)
class ValidationReport:
    metrics: dict[str, ErrorMetrics]
    matched: int
    unmatched: int


class PreparedScene:
    """Point-independent work for a scene: patch grids, IRC and obstruction angles.

    Evaluating many points through one instance is what makes the daylight
    factor cheap: only the per-point patch quadrature remains.
    """

    def __init__(self, scene: Scene):
        self.scene = scene
        n = scene.options.patch_n
        self.patches = {g.id: PatchGrid(g.polygon, n) for g in scene.zone.glazings}
        self.irc = {}
        for g in scene.zone.glazings:
            angle = obstruction_angle(g, scene.obstructions)
            self.irc[g.id] = internally_reflected_component(scene.zone, g, angle, scene.site.albedo)

    def components(self, q) -> DaylightComponents:
        scene = self.scene
        if not scene.zone.contains(q):
            raise EngineError(f"point {np.asarray(q).tolist()} lies outside the zone")
        sc = erc = irc = 0.0
        sky = SkyCondition(SkyModel.CIE_OVERCAST, 1.0)
        for g in scene.zone.glazings:
            s, e = window_components(q, g, scene.obstructions, sky,
                                     obstruction_luminance_factor=scene.options.obstruction_luminance_factor,
                                     albedo=scene.site.albedo, patches=self.patches[g.id])
            sc += s
            erc += e
            irc += self.irc[g.id]
        return DaylightComponents(sc, erc, irc)


def daylight_factor_at(scene: Scene, q, prepared: PreparedScene | None = None) -> DaylightComponents:
    """SC, ERC and IRC summed over all glazings at ``q``; weather-independent."""
    return (prepared or PreparedScene(scene)).components(np.asarray(q, dtype=float))


def sunspot(scene: Scene, sun: SunState) -> list[tuple[str, Polygon]]:
    """Floor patches lit by beam sunlight through each glazing.

    With ``enable_overhang_shading`` the shadow of every obstruction, cast
    along the beam onto the floor plane, is cut out of the spot.
    """
    if sun.altitude <= 0.0:
        return []
    d = sun_direction(sun.altitude, sun.azimuth)
    out = []
    for g in scene.zone.glazings:
        # glazing normals point outward; the beam must enter from outside
        if float(d @ g.polygon.normal) >= 0.0:
            continue
        for f in scene.zone.floors:
            plane = f.polygon.plane
            img = project_polygon(g.polygon, d, plane)
            if img is None:
                continue
            pieces = clip_polygon(img, f.polygon)
            if pieces and scene.options.enable_overhang_shading:
                masks = [m for m in (project_polygon(o.polygon, d, plane) for o in scene.obstructions)
                         if m is not None]
                pieces = subtract_all(pieces, masks)
            out.extend((g.id, p) for p in pieces)
    return out


def _in_spot(q, d, spots: Sequence[tuple[str, Polygon]]) -> set[str]:
    lit = set()
    for gid, poly in spots:
        if gid in lit:
            continue
        denom = float(poly.normal @ d)
        if abs(denom) < 1e-12:
            continue
        t = (poly.offset - float(poly.normal @ q)) / denom
        foot = q + t * d
        if points_in_polygon(foot, poly)[0] >= 0:
            lit.add(gid)
    return lit


def illuminance_at(scene: Scene, q, sample: WeatherSample, sun: SunState, *,
                   components: DaylightComponents | None = None,
                   spots: Sequence[tuple[str, Polygon]] | None = None,
                   point_id: str = "") -> IlluminanceResult:
    q = np.asarray(q, dtype=float)
    comps = components if components is not None else daylight_factor_at(scene, q)
    e_dh, e_bn = split_weather(sample, sun, scene.efficacy)
    e_diffuse = comps.df / 100.0 * e_dh
    e_direct = 0.0
    if e_bn > 0.0 and sun.altitude > 0.0:
        if spots is None:
            spots = sunspot(scene, sun)
        d = sun_direction(sun.altitude, sun.azimuth)
        tau = {g.id: g.transmittance for g in scene.zone.glazings}
        sin_alt = math.sin(math.radians(sun.altitude))
        for gid in sorted(_in_spot(q, d, spots)):
            e_direct += tau[gid] * e_bn * sin_alt
    return IlluminanceResult(sample.timestamp, point_id, comps, e_diffuse, e_direct)


def simulate(scene: Scene, weather: Sequence[WeatherSample], workers: int | None = None) -> list[IlluminanceResult]:
    """One result per (timestamp, sensor), timestamps in input order.

    Daylight factors are computed once per sensor and reused; ``workers``
    spreads that step over threads without changing the output.
    """
    if not weather:
        raise EngineError("weather series is empty")
    prepared = PreparedScene(scene)
    points = scene.sensor_points()
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            comps = list(pool.map(lambda p: prepared.components(p.point), points))
    else:
        comps = [prepared.components(p.point) for p in points]
    out = []
    for s in weather:
        alt, az = solar_position(scene.site, s.timestamp)
        _, e_bn = split_weather(s, SunState(alt, az), scene.efficacy)
        sun = SunState(alt, az, e_bn)
        spots = sunspot(scene, sun) if e_bn > 0.0 else []
        for p, c in zip(points, comps):
            out.append(illuminance_at(scene, p.point, s, sun, components=c, spots=spots, point_id=p.id))
    return out


def _metrics(sim: np.ndarray, meas: np.ndarray) -> ErrorMetrics:
    r = sim - meas
    mbe = float(np.mean(r))
    rmse = float(np.sqrt(np.mean(r * r)))
    mean_meas = float(np.mean(meas))
    rel = rmse / mean_meas if mean_meas > 0 else (0.0 if rmse == 0 else math.inf)
    return ErrorMetrics(mbe, rmse, rel, len(r))


def validate(simulated: Iterable[IlluminanceResult], measured: Iterable[Measurement],
             tolerance_s: float = MATCH_TOLERANCE_S, decimals: int | None = None) -> ValidationReport:
    """Pair each measurement with the nearest simulated row of the same point
    (within ``tolerance_s``) and compute bias and RMSE per point.

    ``decimals`` rounds simulated totals the way the results CSV prints
    them, so a replayed results file compares exactly.
    """
    by_point: dict[str, tuple[list[float], list[float]]] = {}
    for r in simulated:
        ts, vals = by_point.setdefault(r.point_id, ([], []))
        ts.append(r.timestamp.timestamp() if r.timestamp.tzinfo else _naive_seconds(r.timestamp))
        vals.append(float(f"{r.e_total:.{decimals}f}") if decimals is not None else r.e_total)
    index = {}
    for pid, (ts, vals) in by_point.items():
        order = np.argsort(ts, kind="stable")
        index[pid] = (list(np.asarray(ts)[order]), list(np.asarray(vals)[order]))

    pairs: dict[str, tuple[list[float], list[float]]] = {}
    unmatched = 0
    for m in measured:
        hit = None
        if m.point_id in index:
            ts, vals = index[m.point_id]
            t = m.timestamp.timestamp() if m.timestamp.tzinfo else _naive_seconds(m.timestamp)
            k = bisect.bisect_left(ts, t)
            best = None
            for j in (k - 1, k):
                if 0 <= j < len(ts) and abs(ts[j] - t) <= tolerance_s:
                    if best is None or abs(ts[j] - t) < abs(ts[best] - t):
                        best = j
            if best is not None:
                hit = vals[best]
        if hit is None:
            unmatched += 1
            continue
        s, e = pairs.setdefault(m.point_id, ([], []))
        s.append(hit)
        e.append(m.e_lux)
    if not pairs:
        raise EngineError("no measurement matched a simulated (timestamp, point) pair")
    metrics = {pid: _metrics(np.array(s), np.array(e)) for pid, (s, e) in sorted(pairs.items())}
    return ValidationReport(metrics, sum(v.n for v in metrics.values()), unmatched)


def _naive_seconds(t: datetime) -> float:
    return (t - datetime(1970, 1, 1)).total_seconds()


# --- CSV surfaces -----------------------------------------------------------------

def format_results(results: Iterable[IlluminanceResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for r in results:
        c = r.components
        w.writerow([r.timestamp.isoformat(timespec="seconds"), r.point_id]
                   + [f"{v:.4f}" for v in (c.sc, c.erc, c.irc, c.df, r.e_diffuse, r.e_direct, r.e_total)])
    return buf.getvalue()


def replay_measurements(results_text: str) -> list[Measurement]:
    """Read a results CSV back as measurements (``e_total_lux`` column)."""
    reader = csv.reader(io.StringIO(results_text))
    header = next(reader, None)
    if header != RESULTS_HEADER:
        raise EngineError(f"unexpected results header {header!r}")
    return [Measurement(datetime.fromisoformat(row[0]), row[1], float(row[8])) for row in reader if row]


def format_metrics(report: ValidationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for pid, m in report.metrics.items():
        w.writerow([pid, m.n, f"{m.mbe:.4f}", f"{m.rmse:.4f}", f"{m.rmse_rel:.6f}"])
    return buf.getvalue()
