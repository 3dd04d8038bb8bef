"""Planar-polygon kernel: areas, perimeters, plane distances, containment,
projections, clipping and solid angles.

Points and directions are plain ``numpy`` arrays of shape ``(3,)`` in a
right-handed world frame (z up, north = +y, east = +x), lengths in meters.
Polygons are immutable and carry their best-fit plane and an in-plane 2D frame.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PLANARITY_TOL = 1e-6
EDGE_TOL = 1e-9
PARALLEL_TOL = 1e-9
COINCIDENT_TOL = 1e-9
# pieces smaller than this (m^2) are dropped from clip/subtract output
MIN_PIECE_AREA = 1e-12


class GeometryError(ValueError):
    pass


class DegeneratePolygonError(GeometryError):
    """Polygon has collinear vertices, repeated vertices, or zero area."""


class OffPlaneError(GeometryError):
    pass


class CoplanarityError(GeometryError):
    pass


class Containment(enum.Enum):
    INSIDE = "inside"
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"non-finite coordinates {a!r}")
    return a


def unit(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(a)
    if not np.isfinite(n) or n == 0.0:
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return a / n


@dataclass(frozen=True, eq=False)
class Plane:
    """Oriented plane ``dot(normal, x) = offset`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(3)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise GeometryError("plane normal must be unit length")
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_point_normal(cls, point, normal) -> "Plane":
        n = unit(normal)
        return cls(n, float(n @ as_point(point)))

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return NotImplemented
        return np.array_equal(self.normal, other.normal) and self.offset == other.offset

    def __repr__(self):
        return f"Plane(normal={self.normal.tolist()}, offset={self.offset:g})"


def newell_normal(vertices: np.ndarray) -> np.ndarray:
    """Unnormalized Newell normal; its length is twice the polygon area."""
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    return np.array([
        np.sum((v[:, 1] - w[:, 1]) * (v[:, 2] + w[:, 2])),
        np.sum((v[:, 2] - w[:, 2]) * (v[:, 0] + w[:, 0])),
        np.sum((v[:, 0] - w[:, 0]) * (v[:, 1] + w[:, 1])),
    ])


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _signed_area_2d(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_intersect(p1, p2, q1, q2, eps) -> bool:
    d1 = _cross2(q2 - q1, p1 - q1)
    d2 = _cross2(q2 - q1, p2 - q1)
    d3 = _cross2(p2 - p1, q1 - p1)
    d4 = _cross2(p2 - p1, q2 - p1)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
            ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True

    def on_seg(a, b, c, d):
        return abs(d) <= eps and min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps \
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps

    return (on_seg(q1, q2, p1, d1) or on_seg(q1, q2, p2, d2)
            or on_seg(p1, p2, q1, d3) or on_seg(p1, p2, q2, d4))


def _is_simple_2d(pts: np.ndarray) -> bool:
    n = len(pts)
    scale = max(float(np.ptp(pts, axis=0).max()), 1e-12)
    eps = 1e-12 * scale * scale
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                # adjacent edges: reject only a fold-back onto each other
                if j == (i + 1) % n:
                    c = pts[(j + 1) % n]
                    if abs(_cross2(b - a, c - b)) <= eps and np.dot(b - a, c - b) < 0:
                        return False
                elif (j + 1) % n == i:
                    p = pts[j]
                    if abs(_cross2(a - p, b - a)) <= eps and np.dot(a - p, b - a) < 0:
                        return False
                continue
            if _segments_intersect(a, b, pts[j], pts[(j + 1) % n], eps):
                return False
    return True


def _is_convex_2d(pts: np.ndarray) -> bool:
    """True for a CCW loop with no reflex vertex (collinear vertices allowed)."""
    e = np.roll(pts, -1, axis=0) - pts
    cr = _cross2(e, np.roll(e, -1, axis=0))
    scale = max(float(np.ptp(pts, axis=0).max()), 1e-12)
    return bool(np.all(cr >= -1e-12 * scale * scale))


def _ear_clip(pts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW 2D loop; returns vertex index triples."""
    idx = list(range(len(pts)))
    scale = max(float(np.ptp(pts, axis=0).max()), 1e-12)
    eps = 1e-14 * scale * scale
    tris = []
    while len(idx) > 3:
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = pts[i0], pts[i1], pts[i2]
            cr = _cross2(b - a, c - b)
            if abs(cr) <= eps:
                idx.pop(k)
                break
            if cr < 0:
                continue
            blocked = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = pts[j]
                if (_cross2(b - a, p - a) >= -eps and _cross2(c - b, p - b) >= -eps
                        and _cross2(a - c, p - c) >= -eps):
                    blocked = True
                    break
            if blocked:
                continue
            tris.append((i0, i1, i2))
            idx.pop(k)
            break
        else:
            raise GeometryError("ear clipping failed; polygon is not simple")
    if len(idx) == 3:
        a, b, c = (pts[i] for i in idx)
        if abs(_cross2(b - a, c - b)) > eps:
            tris.append(tuple(idx))
    return tris


class Polygon:
    """Immutable planar polygon given by an ordered 3D vertex loop.

    The plane is fitted with Newell's method. Vertices are stored so the
    loop is counter-clockwise seen from the normal side; when ``normal_hint``
    is given and the loop runs the other way, it is reversed.
    """

    __slots__ = ("_v", "_normal", "_offset", "_origin", "_u", "_w", "_tris", "_v2")

    def __init__(self, vertices, normal_hint=None, *, validate: bool = True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) < 3:
            raise DegeneratePolygonError("a polygon needs at least 3 vertices of 3 coordinates")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite vertex coordinates")
        gaps = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(gaps <= COINCIDENT_TOL):
            raise DegeneratePolygonError("consecutive vertices coincide")
        nn = newell_normal(v)
        mag = np.linalg.norm(nn)
        if mag <= 1e-14 * float(np.sum(gaps)) ** 2:
            raise DegeneratePolygonError("polygon has zero area (collinear vertices)")
        n = nn / mag
        if normal_hint is not None and n @ np.asarray(normal_hint, dtype=float) < 0:
            v = v[::-1].copy()
            n = -n
        origin = v.mean(axis=0)
        offset = float(n @ origin)
        if validate:
            dev = np.abs(v @ n - offset)
            if dev.max() > PLANARITY_TOL:
                raise GeometryError(
                    f"vertices deviate {dev.max():.3g} m from their plane (tolerance {PLANARITY_TOL:g})")
        u = v[1] - v[0]
        u = u - (u @ n) * n
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        self._v, self._normal, self._offset = v, n, offset
        self._origin, self._u, self._w = origin, u, w
        self._tris = None
        self._v2 = (v - origin) @ np.column_stack([u, w])
        if validate and not _is_simple_2d(self._v2):
            raise GeometryError("polygon is self-intersecting")
        for a in (self._v, self._normal, self._origin, self._u, self._w, self._v2):
            a.setflags(write=False)

    @classmethod
    def from_2d(cls, pts2d, frame: "Polygon", *, validate: bool = False) -> "Polygon":
        """Lift 2D coordinates expressed in ``frame``'s in-plane basis."""
        return cls(frame.lift(pts2d), frame.normal, validate=validate)

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def normal(self) -> np.ndarray:
        return self._normal

    @property
    def offset(self) -> float:
        return self._offset

    @property
    def plane(self) -> Plane:
        return Plane(self._normal, self._offset)

    @property
    def vertices_2d(self) -> np.ndarray:
        return self._v2

    @property
    def centroid(self) -> np.ndarray:
        """Area centroid."""
        p = self._v2
        q = np.roll(p, -1, axis=0)
        cr = _cross2(p, q)
        a = cr.sum() / 2.0
        c2 = ((p + q) * cr[:, None]).sum(axis=0) / (6.0 * a)
        return self.lift(c2)

    @property
    def triangles(self) -> np.ndarray:
        """Ear-clipped triangulation as an ``(m, 3, 3)`` array, all CCW."""
        if self._tris is None:
            idx = _ear_clip(self._v2)
            t = self._v[np.array(idx, dtype=int).reshape(-1, 3)]
            t.setflags(write=False)
            self._tris = t
        return self._tris

    def project(self, pts) -> np.ndarray:
        """World points to in-plane 2D coordinates (orthogonal projection)."""
        p = np.asarray(pts, dtype=float)
        return (p - self._origin) @ np.column_stack([self._u, self._w])

    def lift(self, pts2d) -> np.ndarray:
        p = np.asarray(pts2d, dtype=float)
        return self._origin + p[..., :1] * self._u + p[..., 1:2] * self._w

    def is_convex(self) -> bool:
        return _is_convex_2d(self._v2)

    def translated(self, offset) -> "Polygon":
        return Polygon(self._v + as_point(offset), self._normal, validate=False)

    def __len__(self):
        return len(self._v)

    def __eq__(self, other):
        if not isinstance(other, Polygon):
            return NotImplemented
        return self._v.shape == other._v.shape and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash(self._v.tobytes())

    def __repr__(self):
        return f"Polygon({np.round(self._v, 6).tolist()})"


def polygon_area(p: Polygon) -> float:
    a = 0.5 * float(np.linalg.norm(newell_normal(p.vertices)))
    if a <= 0.0:
        raise DegeneratePolygonError("polygon has zero area")
    return a


def polygon_perimeter(p: Polygon) -> float:
    v = p.vertices
    return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))


def point_plane_distance(q, plane: Plane) -> float:
    """Signed distance, positive on the normal side."""
    return float(plane.normal @ as_point(q) - plane.offset)


def _classify_2d(pts: np.ndarray, poly: np.ndarray, edge_tol: float = EDGE_TOL) -> np.ndarray:
    """Vectorized containment: 1 inside, 0 on boundary, -1 outside."""
    pts = np.atleast_2d(pts)
    a = poly[None, :, :]
    b = np.roll(poly, -1, axis=0)[None, :, :]
    p = pts[:, None, :]
    ab = b - a
    ap = p - a
    t = np.clip(np.sum(ap * ab, axis=2) / np.sum(ab * ab, axis=2), 0.0, 1.0)
    d2 = np.sum((ap - t[..., None] * ab) ** 2, axis=2)
    on_edge = np.any(d2 <= edge_tol * edge_tol, axis=1)
    # even-odd crossing test on a horizontal ray toward +x
    ay, by = a[..., 1], b[..., 1]
    py = p[..., 1]
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[..., 0] + (py - ay) * (b[..., 0] - a[..., 0]) / (by - ay)
    crossings = np.sum(straddle & (p[..., 0] < xint), axis=1)
    out = np.where(crossings % 2 == 1, 1, -1)
    out[on_edge] = 0
    return out


def point_in_polygon(q, p: Polygon) -> Containment:
    q = as_point(q)
    d = abs(float(p.normal @ q) - p.offset)
    if d > PLANARITY_TOL:
        raise OffPlaneError(f"point is {d:.3g} m off the polygon plane")
    code = int(_classify_2d(p.project(q)[None, :], p.vertices_2d)[0])
    return {1: Containment.INSIDE, 0: Containment.ON_BOUNDARY, -1: Containment.OUTSIDE}[code]


def points_in_polygon(pts, p: Polygon) -> np.ndarray:
    """Batch containment after orthogonal projection onto ``p``'s plane.

    Returns the integer codes 1 (inside), 0 (boundary), -1 (outside); no
    off-plane check is made.
    """
    return _classify_2d(p.project(np.atleast_2d(pts)), p.vertices_2d)


def project_polygon(p: Polygon, d, target: Plane) -> Polygon | None:
    """Translate each vertex of ``p`` along ``d`` onto ``target``.

    Returns ``None`` when ``d`` is parallel to the target plane, when any
    vertex would travel backwards (target behind the polygon), or when the
    image collapses to a segment (``d`` lying in ``p``'s own plane).
    """
    d = unit(d)
    denom = float(target.normal @ d)
    if abs(denom) < PARALLEL_TOL:
        return None
    t = (target.offset - p.vertices @ target.normal) / denom
    if np.any(t < 0):
        return None
    img = p.vertices + t[:, None] * d
    try:
        return Polygon(img, target.normal if abs(p.normal @ d) > PARALLEL_TOL else None,
                       validate=False)
    except DegeneratePolygonError:
        return None


def ray_polygon_hits(origin, dirs, p: Polygon, t_min: float = 0.0):
    """Intersect rays ``origin + t*dirs`` with ``p``.

    Returns ``(hit, t)``: a boolean mask (boundary counts as a hit) and the
    ray parameters, ``inf`` where there is no hit.
    """
    o = as_point(origin)
    d = np.atleast_2d(np.asarray(dirs, dtype=float))
    denom = d @ p.normal
    ok = np.abs(denom) >= PARALLEL_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ok, (p.offset - p.normal @ o) / denom, np.inf)
    ok &= t > t_min
    hit = np.zeros(len(d), dtype=bool)
    if np.any(ok):
        pts = o + t[ok, None] * d[ok]
        hit[ok] = _classify_2d(p.project(pts), p.vertices_2d) >= 0
    return hit, np.where(hit, t, np.inf)


# --- clipping ---------------------------------------------------------------

def _clip_halfplane(poly: np.ndarray, a: np.ndarray, b: np.ndarray, keep_left: bool = True) -> np.ndarray:
    """Keep the part of ``poly`` to the left of a->b (right if not keep_left)."""
    if len(poly) == 0:
        return poly
    e = b - a
    s = _cross2(e, poly - a)
    if not keep_left:
        s = -s
    out = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        sc, sn = s[i], s[(i + 1) % n]
        if sc >= 0:
            out.append(cur)
        if (sc >= 0) != (sn >= 0) and sc != sn:
            t = sc / (sc - sn)
            out.append(cur + t * (nxt - cur))
    return np.array(out) if out else np.empty((0, 2))


def _clean(poly: np.ndarray) -> np.ndarray:
    if len(poly) == 0:
        return poly
    keep = [poly[0]]
    for p in poly[1:]:
        if np.linalg.norm(p - keep[-1]) > COINCIDENT_TOL:
            keep.append(p)
    if len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= COINCIDENT_TOL:
        keep.pop()
    return np.array(keep)


def _clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: subject against a convex CCW clip loop."""
    out = subject
    m = len(clip)
    for i in range(m):
        out = _clip_halfplane(out, clip[i], clip[(i + 1) % m])
        if len(out) == 0:
            break
    return _clean(out)


def _subtract_convex_2d(piece: np.ndarray, c: np.ndarray) -> list[np.ndarray]:
    """Convex ``piece`` minus convex CCW ``c``, as disjoint convex pieces."""
    out = []
    rest = piece
    m = len(c)
    for i in range(m):
        a, b = c[i], c[(i + 1) % m]
        outside = _clean(_clip_halfplane(rest, a, b, keep_left=False))
        if len(outside) >= 3 and abs(_signed_area_2d(outside)) >= MIN_PIECE_AREA:
            out.append(outside)
        rest = _clip_halfplane(rest, a, b, keep_left=True)
        if len(rest) < 3:
            break
    return out


def _convex_parts(pts: np.ndarray) -> list[np.ndarray]:
    if _is_convex_2d(pts):
        return [pts]
    return [pts[list(t)] for t in _ear_clip(pts)]


def _require_coplanar(a: Polygon, b: Polygon) -> np.ndarray:
    """Return ``b``'s vertices in ``a``'s 2D frame, CCW."""
    dev = np.abs(b.vertices @ a.normal - a.offset).max()
    if dev > PLANARITY_TOL or abs(abs(a.normal @ b.normal) - 1.0) > 1e-6:
        raise CoplanarityError(f"polygons are not coplanar (deviation {dev:.3g} m)")
    pts = a.project(b.vertices)
    if _signed_area_2d(pts) < 0:
        pts = pts[::-1]
    return pts


def _pieces_to_polygons(pieces, frame: Polygon) -> list[Polygon]:
    out = []
    for pc in pieces:
        pc = _clean(pc)
        if len(pc) < 3 or abs(_signed_area_2d(pc)) < MIN_PIECE_AREA:
            continue
        try:
            out.append(Polygon.from_2d(pc, frame))
        except DegeneratePolygonError:
            continue
    return out


def clip_polygon(subject: Polygon, clip: Polygon) -> list[Polygon]:
    """Intersection of two coplanar polygons as a list of disjoint pieces.

    Convex pairs go through a single Sutherland-Hodgman pass. A non-convex
    operand is first split into ear-clipped triangles and the per-part
    intersections are returned side by side (they never overlap).
    """
    c2 = _require_coplanar(subject, clip)
    pieces = []
    for s in _convex_parts(subject.vertices_2d):
        for c in _convex_parts(c2):
            pieces.append(_clip_convex(s, c))
    return _pieces_to_polygons(pieces, subject)


def subtract_polygon(subject: Polygon, hole: Polygon) -> list[Polygon]:
    """``subject`` minus ``hole`` (coplanar) as disjoint convex pieces."""
    h2 = _require_coplanar(subject, hole)
    pieces = _convex_parts(subject.vertices_2d)
    for c in _convex_parts(h2):
        pieces = [r for piece in pieces for r in _subtract_convex_2d(piece, c)]
    return _pieces_to_polygons(pieces, subject)


def subtract_all(pieces: Iterable[Polygon], holes: Sequence[Polygon]) -> list[Polygon]:
    out = list(pieces)
    for h in holes:
        out = [r for p in out for r in subtract_polygon(p, h)]
    return out


def split_by_plane(p: Polygon, plane: Plane) -> tuple[Polygon | None, Polygon | None]:
    """Cut ``p`` with ``plane``; returns (negative side, positive side)."""
    s = p.vertices @ plane.normal - plane.offset
    if np.all(s <= PLANARITY_TOL):
        return p, None
    if np.all(s >= -PLANARITY_TOL):
        return None, p
    below, above = [], []
    v = p.vertices
    n = len(v)
    for i in range(n):
        cur, nxt = v[i], v[(i + 1) % n]
        sc, sn = s[i], s[(i + 1) % n]
        if sc <= 0:
            below.append(cur)
        if sc >= 0:
            above.append(cur)
        if (sc < 0 < sn) or (sn < 0 < sc):
            x = cur + (sc / (sc - sn)) * (nxt - cur)
            below.append(x)
            above.append(x)
    res = []
    for loop in (below, above):
        loop = np.array(loop)
        try:
            res.append(Polygon(_clean(loop), p.normal, validate=False) if len(loop) >= 3 else None)
        except DegeneratePolygonError:
            res.append(None)
    return res[0], res[1]


# --- solid angle -------------------------------------------------------------

def triangle_solid_angles(q, tris: np.ndarray) -> np.ndarray:
    """Signed Van Oosterom-Strackee solid angles of triangles ``(m, 3, 3)`` at ``q``."""
    r = np.asarray(tris, dtype=float) - as_point(q)
    r1, r2, r3 = r[:, 0], r[:, 1], r[:, 2]
    l1, l2, l3 = (np.linalg.norm(x, axis=1) for x in (r1, r2, r3))
    num = np.einsum("ij,ij->i", r1, np.cross(r2, r3))
    den = (l1 * l2 * l3 + np.einsum("ij,ij->i", r1, r2) * l3
           + np.einsum("ij,ij->i", r1, r3) * l2 + np.einsum("ij,ij->i", r2, r3) * l1)
    return 2.0 * np.arctan2(num, den)


def solid_angle(q, p: Polygon) -> float:
    """Solid angle (sr) subtended by ``p`` at ``q``."""
    q = as_point(q)
    if abs(float(p.normal @ q) - p.offset) <= PLANARITY_TOL:
        raise DegeneratePolygonError("point lies in the polygon plane; solid angle undefined")
    return abs(float(np.sum(triangle_solid_angles(q, p.triangles))))


def point_segment_distance(q, a, b) -> float:
    q, a, b = (np.asarray(x, dtype=float) for x in (q, a, b))
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, float((q - a) @ ab) / denom))
    return float(np.linalg.norm(q - (a + t * ab)))


def rectangle(origin, edge_u, edge_v) -> Polygon:
    """Parallelogram ``origin, origin+u, origin+u+v, origin+v``."""
    o, u, v = as_point(origin), as_point(edge_u), as_point(edge_v)
    return Polygon([o, o + u, o + u + v, o + v])
