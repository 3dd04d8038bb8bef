"""Sky luminance laws and the three daylight-factor components.

All components are percentages of the exterior diffuse horizontal
illuminance, so they never depend on its absolute value. Sky luminance is
handled per lux of ``E_dh`` throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import (
    MIN_PIECE_AREA,
    PLANARITY_TOL,
    DegeneratePolygonError,
    Plane,
    Polygon,
    _clean,
    _clip_convex,
    _convex_parts,
    _signed_area_2d,
    _subtract_convex_2d,
    as_point,
    polygon_area,
    ray_polygon_hits,
    split_by_plane,
    triangle_solid_angles,
)

DEFAULT_PATCH_N = 16
DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR = 0.2

# BRE split-flux obstruction coefficient C against obstruction angle above
# the horizon, measured from the window centre (degrees).
C_TABLE = np.array([
    [0.0, 39.0], [10.0, 35.0], [20.0, 31.0], [30.0, 25.0], [40.0, 20.0],
    [50.0, 14.0], [60.0, 10.0], [70.0, 7.0], [80.0, 5.0],
])


class SkyModel(str, enum.Enum):
    CIE_OVERCAST = "cie_overcast"
    UNIFORM = "uniform"


class ReflectanceError(ValueError):
    pass


@dataclass(frozen=True)
class SkyCondition:
    model: SkyModel = SkyModel.CIE_OVERCAST
    e_dh: float = 10000.0

    def __post_init__(self):
        object.__setattr__(self, "model", SkyModel(self.model))
        if self.e_dh < 0:
            raise ValueError("exterior diffuse horizontal illuminance must be >= 0")


@dataclass(frozen=True)
class DaylightComponents:
    """SC, ERC and IRC in percent; ``df`` is always their sum."""

    sc: float
    erc: float
    irc: float
    df: float = field(init=False)

    def __post_init__(self):
        for name in ("sc", "erc", "irc"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        object.__setattr__(self, "df", self.sc + self.erc + self.irc)

    @classmethod
    def zero(cls) -> "DaylightComponents":
        return cls(0.0, 0.0, 0.0)


def sky_luminance(model, gamma, l_z):
    """Luminance (cd/m^2) at elevation ``gamma`` (degrees) for zenith luminance ``l_z``."""
    g = np.asarray(gamma, dtype=float)
    if SkyModel(model) is SkyModel.UNIFORM:
        out = np.full_like(g, l_z)
    else:
        out = l_z * (1.0 + 2.0 * np.sin(np.radians(g))) / 3.0
    return float(out) if out.ndim == 0 else out


def zenith_luminance(model, e_dh: float) -> float:
    """Zenith luminance giving horizontal illuminance ``e_dh`` from the full sky."""
    if e_dh < 0:
        raise ValueError("e_dh must be >= 0")
    if SkyModel(model) is SkyModel.UNIFORM:
        return e_dh / math.pi
    return 9.0 * e_dh / (7.0 * math.pi)


def _relative_luminance(model, gamma):
    return sky_luminance(model, gamma, zenith_luminance(model, 1.0))


def _piece_centroid(piece: np.ndarray) -> tuple[float, np.ndarray]:
    x, y = piece[:, 0], piece[:, 1]
    cr = x * np.roll(y, -1) - np.roll(x, -1) * y
    a = 0.5 * float(cr.sum())
    c = np.array([np.sum((x + np.roll(x, -1)) * cr), np.sum((y + np.roll(y, -1)) * cr)]) / (6.0 * a)
    return a, c


def _fan(piece: np.ndarray) -> list[np.ndarray]:
    return [piece[[0, k, k + 1]] for k in range(1, len(piece) - 1)]


class PatchGrid:
    """A glazing polygon cut into an ``n x n`` grid over its in-plane bounding box.

    Cells are clipped to the polygon, so non-rectangular glazings are
    covered exactly. The grid depends only on the glazing, so one grid is
    reused for every evaluation point.
    """

    def __init__(self, polygon: Polygon, n: int = DEFAULT_PATCH_N):
        if n < 1:
            raise ValueError("patch grid size must be >= 1")
        self.polygon = polygon
        self.n = n
        p2 = polygon.vertices_2d
        lo, hi = p2.min(axis=0), p2.max(axis=0)
        xs = np.linspace(lo[0], hi[0], n + 1)
        ys = np.linspace(lo[1], hi[1], n + 1)
        parts = _convex_parts(p2)
        self.cells: list[list[np.ndarray]] = []
        centers, areas, tris, owner = [], [], [], []
        for i in range(n):
            for j in range(n):
                cell = np.array([[xs[i], ys[j]], [xs[i + 1], ys[j]],
                                 [xs[i + 1], ys[j + 1]], [xs[i], ys[j + 1]]])
                acc_a, acc_c, pieces = 0.0, np.zeros(2), []
                for part in parts:
                    piece = _clip_convex(cell, part)
                    if len(piece) < 3 or _signed_area_2d(piece) <= MIN_PIECE_AREA:
                        continue
                    a, c = _piece_centroid(piece)
                    acc_a += a
                    acc_c += a * c
                    pieces.append(piece)
                if pieces:
                    cell_tris = [t for pc in pieces for t in _fan(pc)]
                    owner.extend([len(centers)] * len(cell_tris))
                    tris.extend(cell_tris)
                    centers.append(acc_c / acc_a)
                    areas.append(acc_a)
                    self.cells.append(pieces)
        self.centers_2d = np.array(centers).reshape(-1, 2)
        self.centers = polygon.lift(self.centers_2d)
        self.areas = np.array(areas)
        self.triangles_2d = np.array(tris).reshape(-1, 3, 2)
        self.triangles = polygon.lift(self.triangles_2d) if tris else np.empty((0, 3, 3))
        self.owner = np.array(owner, dtype=int)
        self.bounds = np.array([[np.min([pc.min(axis=0) for pc in c], axis=0),
                                 np.max([pc.max(axis=0) for pc in c], axis=0)] for c in self.cells]).reshape(-1, 2, 2)

    def __len__(self):
        return len(self.centers)

    def solid_angles(self, q) -> np.ndarray:
        if len(self.owner) == 0:
            return np.zeros(0)
        signed = triangle_solid_angles(q, self.triangles)
        return np.abs(np.bincount(self.owner, weights=signed, minlength=len(self.centers)))


def _obstruction_polygon(o):
    return getattr(o, "polygon", o)


def _shadows(q, glazing: Polygon, obstructions) -> list[tuple[float, list[np.ndarray]]]:
    """Obstructions as seen from ``q`` through the glazing plane.

    The part of each obstruction beyond the glazing plane is projected
    centrally from ``q`` onto that plane. Returns ``(reflectance, convex
    2D parts)`` pairs, nearest obstruction first.
    """
    h = float(glazing.normal @ q) - glazing.offset
    found = []
    for o in obstructions:
        neg, pos = split_by_plane(_obstruction_polygon(o), glazing.plane)
        far = neg if h > 0 else pos
        if far is None:
            continue
        v = far.vertices
        # v lies on the far side, so (v - q) . n never vanishes
        t = -h / ((v - q) @ glazing.normal)
        img = _clean(glazing.project(q + t[:, None] * (v - q)))
        if len(img) < 3:
            continue
        a = _signed_area_2d(img)
        if abs(a) < MIN_PIECE_AREA:
            continue
        if a < 0:
            img = img[::-1]
        dist = float(np.linalg.norm(v.mean(axis=0) - q))
        found.append((dist, float(getattr(o, "reflectance", 0.0)), _convex_parts(img)))
    found.sort(key=lambda f: f[0])
    return [(r, parts) for _, r, parts in found]


def _cut_cell(pieces, shadows):
    """Split a cell's pieces into unblocked ones and ``(piece, reflectance)`` blocked ones."""
    sky, blocked = list(pieces), []
    for refl, parts in shadows:
        for c in parts:
            lo, hi = c.min(axis=0), c.max(axis=0)
            nxt = []
            for p in sky:
                if np.any(p.max(axis=0) <= lo) or np.any(p.min(axis=0) >= hi):
                    nxt.append(p)
                    continue
                inter = _clip_convex(p, c)
                if len(inter) >= 3 and _signed_area_2d(inter) > MIN_PIECE_AREA:
                    blocked.append((inter, refl))
                    nxt.extend(_subtract_convex_2d(p, c))
                else:
                    nxt.append(p)
            sky = nxt
    return sky, blocked


def _patch_terms(q, patches: PatchGrid, obstructions):
    """Direction, solid angle, blocked flag and obstruction reflectance per piece.

    Cells crossed by an obstruction outline are split along it, so each
    piece is either fully open or fully blocked.
    """
    q = as_point(q)
    pl = patches.polygon
    if abs(float(pl.normal @ q) - pl.offset) <= PLANARITY_TOL:
        raise DegeneratePolygonError("evaluation point lies in the glazing plane")
    shadows = _shadows(q, pl, obstructions)
    if shadows:
        lo = np.min([np.min([c.min(axis=0) for c in parts], axis=0) for _, parts in shadows], axis=0)
        hi = np.max([np.max([c.max(axis=0) for c in parts], axis=0) for _, parts in shadows], axis=0)
        touched = np.all(patches.bounds[:, 1] > lo, axis=1) & np.all(patches.bounds[:, 0] < hi, axis=1)
    else:
        touched = np.zeros(len(patches), dtype=bool)

    if not touched.any():
        centers = patches.centers
        omega = patches.solid_angles(q)
        blocked = np.zeros(len(centers), dtype=bool)
        refl = np.zeros(len(centers))
    else:
        centers2d, tris2d, owner, blocked_l, refl_l = [], [], [], [], []
        keep = ~touched
        kept_ids = np.flatnonzero(keep)
        remap = -np.ones(len(patches), dtype=int)
        remap[kept_ids] = np.arange(len(kept_ids))
        tri_keep = keep[patches.owner]
        tris2d.append(patches.triangles_2d[tri_keep])
        owner.append(remap[patches.owner[tri_keep]])
        centers2d.extend(patches.centers_2d[kept_ids])
        blocked_l.extend([False] * len(kept_ids))
        refl_l.extend([0.0] * len(kept_ids))
        for k in np.flatnonzero(touched):
            sky, blk = _cut_cell(patches.cells[k], shadows)
            for piece, flag, r in [(p, False, 0.0) for p in sky] + [(p, True, r) for p, r in blk]:
                _, c = _piece_centroid(piece)
                fan = _fan(piece)
                tris2d.append(np.array(fan))
                owner.append(np.full(len(fan), len(centers2d)))
                centers2d.append(c)
                blocked_l.append(flag)
                refl_l.append(r)
        centers = pl.lift(np.array(centers2d).reshape(-1, 2))
        tris = pl.lift(np.concatenate(tris2d).reshape(-1, 3, 2))
        signed = triangle_solid_angles(q, tris)
        omega = np.abs(np.bincount(np.concatenate(owner), weights=signed, minlength=len(centers)))
        blocked = np.array(blocked_l, dtype=bool)
        refl = np.array(refl_l)
    d = centers - q
    u = d / np.linalg.norm(d, axis=1)[:, None]
    return u, omega, blocked, refl


def window_components(q, glazing, obstructions: Sequence = (), sky: SkyCondition | None = None,
                      n: int = DEFAULT_PATCH_N,
                      obstruction_luminance_factor: float = DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR,
                      albedo: float = 0.0, patches: PatchGrid | None = None) -> tuple[float, float]:
    """Sky and externally reflected components (percent) of one glazing at ``q``.

    Each patch is weighted by its exact solid angle and the cosine of its
    centre ray on the horizontal work plane. Patches straddling an
    obstruction outline are first split along it. Unblocked patches above the
    horizon see the sky; blocked ones see an obstruction radiating at
    ``factor * reflectance`` times the mean sky luminance ``E_dh/pi``.
    Patches below the horizon see ground at ``albedo`` times that mean;
    with an upward-facing work plane their cosine weight is zero.
    """
    sky = sky or SkyCondition()
    patches = patches or PatchGrid(glazing.polygon, n)
    if len(patches) == 0:
        return 0.0, 0.0
    tau = float(glazing.transmittance)
    u, omega, blocked, refl = _patch_terms(q, patches, obstructions)
    cos = u[:, 2]
    above = cos > 0.0
    gamma = np.degrees(np.arcsin(np.clip(cos, 0.0, 1.0)))
    weight = np.clip(cos, 0.0, None) * omega
    mean_lum = 1.0 / math.pi
    sc = 100.0 * tau * float(np.sum((_relative_luminance(sky.model, gamma) * weight)[above & ~blocked]))
    erc_obst = obstruction_luminance_factor * refl * mean_lum
    erc_ground = albedo * mean_lum
    erc = 100.0 * tau * float(np.sum((erc_obst * weight)[above & blocked])
                              + np.sum((erc_ground * weight)[~above]))
    return sc, erc


def sky_component(q, glazing, obstructions: Sequence = (), sky: SkyCondition | None = None,
                  n: int = DEFAULT_PATCH_N, patches: PatchGrid | None = None) -> float:
    return window_components(q, glazing, obstructions, sky, n, patches=patches)[0]


def externally_reflected_component(q, glazing, obstructions: Sequence = (), sky: SkyCondition | None = None,
                                   n: int = DEFAULT_PATCH_N,
                                   obstruction_luminance_factor: float = DEFAULT_OBSTRUCTION_LUMINANCE_FACTOR,
                                   albedo: float = 0.0, patches: PatchGrid | None = None) -> float:
    return window_components(q, glazing, obstructions, sky, n, obstruction_luminance_factor,
                             albedo, patches)[1]


def obstruction_coefficient(angle_deg: float) -> float:
    """Split-flux C coefficient, interpolated linearly and clamped to the table."""
    return float(np.interp(angle_deg, C_TABLE[:, 0], C_TABLE[:, 1]))


def obstruction_angle(glazing, obstructions: Sequence = (), step_deg: float = 0.5) -> float:
    """Elevation (degrees) below which the outward view from the glazing centre is blocked.

    Rays are cast in the vertical plane of the outward horizontal normal,
    scanning upward from the horizon; the first clear elevation is returned.
    Overhangs above the window leave the horizon clear and give 0.
    """
    pl = glazing.polygon
    n = pl.normal
    h = np.array([n[0], n[1], 0.0])
    if np.linalg.norm(h) < 1e-9 or not obstructions:
        return 0.0
    h /= np.linalg.norm(h)
    origin = pl.centroid + 1e-6 * n
    elevations = np.arange(0.0, 90.0 + step_deg / 2, step_deg)
    e = np.radians(elevations)
    dirs = np.cos(e)[:, None] * h + np.sin(e)[:, None] * np.array([0.0, 0.0, 1.0])
    hit = np.zeros(len(dirs), dtype=bool)
    for o in obstructions:
        hit |= ray_polygon_hits(origin, dirs, _obstruction_polygon(o))[0]
    clear = np.flatnonzero(~hit)
    return float(elevations[clear[0]]) if len(clear) else 90.0


def split_flux_irc(transmittance: float, glazing_area: float, total_area: float,
                   mean_reflectance: float, r_fw: float, r_cw: float, c: float = 39.0,
                   ground_reflectance: float = 0.1) -> float:
    """BRE split-flux internally reflected component, in percent.

    ``IRC = tau*W / (A*(1-R)) * (C*R_fw + 50*rho_g*R_cw)``; the usual
    constant 5 corresponds to a ground reflectance of 0.1.
    """
    if mean_reflectance >= 1.0:
        raise ReflectanceError(f"mean reflectance {mean_reflectance} >= 1 is non-physical")
    if total_area <= 0:
        raise ValueError("total surface area must be > 0")
    if glazing_area == 0.0:
        return 0.0
    ground = 50.0 * ground_reflectance
    return transmittance * glazing_area / (total_area * (1.0 - mean_reflectance)) * (c * r_fw + ground * r_cw)


def reflectance_split(zone, glazing) -> tuple[float, float]:
    """Area-weighted reflectances below (floor side) and above (ceiling side)
    the glazing's mid-height, leaving out the wall that hosts the glazing."""
    z = glazing.polygon.vertices[:, 2]
    cut = Plane(np.array([0.0, 0.0, 1.0]), 0.5 * (z.min() + z.max()))
    fw_a = fw_ra = cw_a = cw_ra = 0.0
    for s in zone.surfaces:
        if s.id == glazing.host_surface:
            continue
        if s.kind == "floor":
            a = polygon_area(s.polygon)
            fw_a += a
            fw_ra += a * s.reflectance
        elif s.kind == "ceiling":
            a = polygon_area(s.polygon)
            cw_a += a
            cw_ra += a * s.reflectance
        else:
            below, above = split_by_plane(s.polygon, cut)
            if below is not None:
                a = polygon_area(below)
                fw_a += a
                fw_ra += a * s.reflectance
            if above is not None:
                a = polygon_area(above)
                cw_a += a
                cw_ra += a * s.reflectance
    r_fw = fw_ra / fw_a if fw_a > 0 else 0.0
    r_cw = cw_ra / cw_a if cw_a > 0 else 0.0
    return r_fw, r_cw


def internally_reflected_component(zone, glazing, obstruction_angle_deg: float = 0.0,
                                   ground_reflectance: float = 0.1) -> float:
    r_fw, r_cw = reflectance_split(zone, glazing)
    return split_flux_irc(glazing.transmittance, polygon_area(glazing.polygon), zone.total_area,
                          zone.mean_reflectance, r_fw, r_cw,
                          obstruction_coefficient(obstruction_angle_deg), ground_reflectance)
