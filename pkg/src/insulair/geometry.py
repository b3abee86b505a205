"""Convex planar polygons, exact Minkowski offsets and quermassintegrals.

Polygons are stored as CCW vertex arrays. The offset ``D + delta*B`` of a
convex polygon is kept exactly as alternating straight pieces (translated
edges) and circular arcs centred at the vertices, so Steiner identities hold
to rounding error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Union

import numpy as np


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _normalize_vertices(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("vertices must be an (m, 2) array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertices must be finite")
    if len(pts) < 3:
        raise ValueError("a polygon needs at least 3 vertices")

    diam = float(np.max(np.ptp(pts, axis=0)))
    if diam == 0.0:
        raise ValueError("degenerate polygon (all vertices coincide)")

    signed = 0.5 * np.sum(_cross(pts, np.roll(pts, -1, axis=0)))
    if signed < 0:
        pts = pts[::-1]

    # drop near-duplicate vertices
    keep = [pts[0]]
    for p in pts[1:]:
        if np.hypot(*(p - keep[-1])) > 1e-12 * diam:
            keep.append(p)
    if len(keep) > 1 and np.hypot(*(keep[0] - keep[-1])) <= 1e-12 * diam:
        keep.pop()
    pts = np.array(keep)

    # drop collinear vertices, reject reflex ones
    tol = 1e-12 * diam * diam
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        turn = _cross(pts - prev, nxt - pts)
        if np.any(turn < -tol):
            raise ValueError("polygon is not convex")
        flat = np.flatnonzero(turn <= tol)
        if len(flat):
            pts = np.delete(pts, flat[0], axis=0)
            changed = True
    if len(pts) < 3:
        raise ValueError("degenerate polygon (zero area)")
    area = 0.5 * np.sum(_cross(pts, np.roll(pts, -1, axis=0)))
    if area <= 0:
        raise ValueError("degenerate polygon (zero area)")
    return pts


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon with CCW vertices, normalized on construction."""

    vertices: np.ndarray

    def __post_init__(self):
        pts = _normalize_vertices(self.vertices)
        pts.setflags(write=False)
        object.__setattr__(self, "vertices", pts)

    def __len__(self):
        return len(self.vertices)

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def outward_normals(self) -> np.ndarray:
        e = self.edges
        n = np.column_stack([e[:, 1], -e[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    @property
    def centroid(self) -> np.ndarray:
        p = self.vertices
        q = np.roll(p, -1, axis=0)
        c = _cross(p, q)
        a = 0.5 * c.sum()
        return np.array([np.sum((p[:, 0] + q[:, 0]) * c), np.sum((p[:, 1] + q[:, 1]) * c)]) / (6 * a)

    @property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    def scaled(self, factor: float, about=(0.0, 0.0)) -> "ConvexPolygon":
        about = np.asarray(about, dtype=float)
        return ConvexPolygon(about + factor * (self.vertices - about))

    def translated(self, offset) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(offset, dtype=float))

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        n = self.outward_normals
        s = (x @ n.T) - np.sum(n * self.vertices, axis=1)
        return np.all(s <= tol, axis=1)

    def support(self, directions) -> np.ndarray:
        """Support function h(u) = max_{x in D} x.u for unit vectors u."""
        u = np.atleast_2d(np.asarray(directions, dtype=float))
        return (u @ self.vertices.T).max(axis=1)


@dataclass(frozen=True)
class Disk:
    """Closed disk; used as a conductor or an outer wall."""

    radius: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def centroid(self) -> np.ndarray:
        return np.array(self.center)


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.end - self.start)))

    def green(self) -> float:
        # contribution to 0.5 * closed integral of (x dy - y dx)
        return 0.5 * float(_cross(self.start, self.end))


@dataclass(frozen=True)
class Arc:
    center: np.ndarray
    radius: float
    angle_start: float
    sweep: float  # CCW, in [0, pi)

    @property
    def length(self) -> float:
        return self.radius * self.sweep

    def green(self) -> float:
        a0, a1 = self.angle_start, self.angle_start + self.sweep
        cx, cy = self.center
        r = self.radius
        return 0.5 * (r * r * self.sweep
                      + r * (cx * (math.sin(a1) - math.sin(a0)) + cy * (math.cos(a0) - math.cos(a1))))


@dataclass(frozen=True, eq=False)
class OffsetBoundary:
    """Exact boundary of D + delta*B for a convex polygon D."""

    polygon: ConvexPolygon
    delta: float
    pieces: list = field(default_factory=list)

    @property
    def length(self) -> float:
        return math.fsum(p.length for p in self.pieces)

    @property
    def area(self) -> float:
        return math.fsum(p.green() for p in self.pieces)

    @property
    def arc_angle_total(self) -> float:
        return math.fsum(p.sweep for p in self.pieces if isinstance(p, Arc))

    @property
    def centroid(self) -> np.ndarray:
        return self.polygon.centroid

    def contains(self, x) -> np.ndarray:
        return distance_to_polygon(x, self.polygon) <= self.delta

    def sample(self, per_arc: int = 16) -> np.ndarray:
        """Dense CCW point list along the boundary (for plotting/export)."""
        out = []
        for p in self.pieces:
            if isinstance(p, Segment):
                out.append(p.start)
            else:
                t = p.angle_start + p.sweep * np.arange(per_arc) / per_arc
                out.extend(p.center + p.radius * np.column_stack([np.cos(t), np.sin(t)]))
        return np.array(out)


Region = Union[ConvexPolygon, Disk, OffsetBoundary]


def regular_polygon(m: int, circumradius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> ConvexPolygon:
    t = phase + 2 * np.pi * np.arange(m) / m
    return ConvexPolygon(np.asarray(center) + circumradius * np.column_stack([np.cos(t), np.sin(t)]))


def regular_polygon_with_perimeter(m: int, perimeter: float, center=(0.0, 0.0)) -> ConvexPolygon:
    side = perimeter / m
    return regular_polygon(m, side / (2 * math.sin(math.pi / m)), center)


def rectangle(a: float, b: float, origin=(0.0, 0.0)) -> ConvexPolygon:
    x, y = origin
    return ConvexPolygon([(x, y), (x + a, y), (x + a, y + b), (x, y + b)])


def area(D: ConvexPolygon) -> float:
    p = D.vertices
    return 0.5 * math.fsum(_cross(p, np.roll(p, -1, axis=0)))


def perimeter(D: ConvexPolygon) -> float:
    return math.fsum(np.linalg.norm(D.edges, axis=1))


def minkowski_offset(D: ConvexPolygon, delta: float) -> OffsetBoundary:
    if delta < 0:
        raise ValueError("negative offset (erosion) is not supported")
    v = D.vertices
    nrm = D.outward_normals
    m = len(v)
    pieces: list = []
    for i in range(m):
        j = (i + 1) % m
        pieces.append(Segment(v[i] + delta * nrm[i], v[j] + delta * nrm[i]))
        if delta > 0:
            a0 = math.atan2(nrm[i, 1], nrm[i, 0])
            a1 = math.atan2(nrm[j, 1], nrm[j, 0])
            sweep = (a1 - a0) % (2 * math.pi)
            pieces.append(Arc(v[j].copy(), float(delta), a0, sweep))
    return OffsetBoundary(D, float(delta), pieces)


def distance_to_polygon(x, D: ConvexPolygon) -> np.ndarray | float:
    """Euclidean distance from point(s) x to the closed polygon (0 inside)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    a = D.vertices[None, :, :]
    e = D.edges[None, :, :]
    rel = pts[:, None, :] - a
    t = np.clip(np.sum(rel * e, axis=-1) / np.sum(e * e, axis=-1), 0.0, 1.0)
    d = np.sqrt(np.sum((rel - t[..., None] * e) ** 2, axis=-1)).min(axis=1)
    d = np.where(D.contains(pts), 0.0, d)
    return float(d[0]) if single else d


def _exit_convex_polygon(c, d, points, normals):
    """Ray exit parameter from convex polygon(s); nan where missed.

    points/normals: (..., k, 2) half-planes n.(x - p) <= 0.
    c: (2,), d: (N, 2).  Returns (N, ...) array.
    """
    num = np.sum(normals * (points - c), axis=-1)  # (..., k)
    den = np.einsum("nj,...kj->n...k", d, normals)  # (N, ..., k)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    t_exit = np.where(den > 0, t, np.inf).min(axis=-1)
    t_enter = np.where(den < 0, t, -np.inf).max(axis=-1)
    inside_par = np.all((den != 0) | (num >= 0), axis=-1)
    ok = (t_enter <= t_exit) & inside_par & np.isfinite(t_exit)
    return np.where(ok, t_exit, np.nan)


def radial_function(region: Region, center, theta) -> np.ndarray | float:
    """Distance from ``center`` to the boundary of a convex region along angle theta."""
    c = np.asarray(center, dtype=float)
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)
    d = np.column_stack([np.cos(th), np.sin(th)])

    if isinstance(region, Disk):
        rel = c - np.asarray(region.center)
        if np.hypot(*rel) >= region.radius:
            raise ValueError("center must lie strictly inside the region")
        b = d @ rel
        r = -b + np.sqrt(b * b - (rel @ rel) + region.radius ** 2)
    elif isinstance(region, ConvexPolygon):
        if not region.contains(c, tol=-1e-14 * region.diameter)[0]:
            raise ValueError("center must lie strictly inside the region")
        r = _exit_convex_polygon(c, d, region.vertices, region.outward_normals)
    elif isinstance(region, OffsetBoundary):
        D, delta = region.polygon, region.delta
        if delta == 0:
            return radial_function(D, c, theta)
        if distance_to_polygon(c, D) >= delta and not D.contains(c)[0]:
            raise ValueError("center must lie strictly inside the region")
        # D + delta*B is the union of D, the edge rectangles and the vertex disks;
        # the union is convex and contains c, so the exit is the max over members.
        v, nrm, e = D.vertices, D.outward_normals, D.edges
        w = np.roll(v, -1, axis=0)
        tang = e / np.linalg.norm(e, axis=1)[:, None]
        rect_pts = np.stack([v, w, w + delta * nrm, v], axis=1)
        rect_nrm = np.stack([-nrm, tang, nrm, -tang], axis=1)
        t_rect = _exit_convex_polygon(c, d, rect_pts, rect_nrm)
        rel = c - v
        b = d @ rel.T
        disc = b * b - np.sum(rel * rel, axis=1) + delta ** 2
        with np.errstate(invalid="ignore"):
            t_disk = np.where(disc >= 0, -b + np.sqrt(disc), np.nan)
        t_poly = _exit_convex_polygon(c, d, v, nrm)
        r = np.nanmax(np.column_stack([t_poly, t_rect, t_disk]), axis=1)
    else:
        raise TypeError(f"unsupported region {type(region).__name__}")

    if np.any(~np.isfinite(r)) or np.any(r <= 0):
        raise ValueError("center must lie strictly inside the region")
    return float(r[0]) if scalar else r


# --- quermassintegrals -----------------------------------------------------

@dataclass(frozen=True)
class QuermassVector:
    """Quermassintegrals (W_0, ..., W_n) of a convex body in R^n."""

    n: int
    W: tuple

    def __post_init__(self):
        if self.n < 1 or len(self.W) != self.n + 1:
            raise ValueError("QuermassVector needs n+1 entries")
        object.__setattr__(self, "W", tuple(float(w) for w in self.W))

    @property
    def volume(self) -> float:
        return self.W[0]

    @property
    def perimeter(self) -> float:
        return self.n * self.W[1]


def quermass_2d(D: ConvexPolygon) -> QuermassVector:
    return QuermassVector(2, (area(D), perimeter(D) / 2, math.pi))


def quermass_ball(n: int, R: float) -> QuermassVector:
    w = unit_ball_volume(n)
    return QuermassVector(n, tuple(w * R ** (n - j) for j in range(n + 1)))


def _elementary_symmetric(values) -> list[float]:
    e = [1.0]
    for x in values:
        e = [a + x * b for a, b in zip(e + [0.0], [0.0] + e)]
    return e


def quermass_box(sides) -> QuermassVector:
    """Quermassintegrals of an axis-parallel box.

    Uses intrinsic volumes V_k = e_k(sides) and W_{n-k} = omega_{n-k} V_k / C(n, k).
    """
    s = [float(a) for a in sides]
    if not s or any(not a > 0 for a in s):
        raise ValueError("box sides must be positive")
    n = len(s)
    e = _elementary_symmetric(s)
    W = [0.0] * (n + 1)
    for k in range(n + 1):
        W[n - k] = unit_ball_volume(n - k) * e[k] / math.comb(n, k)
    return QuermassVector(n, tuple(W))


def steiner_volume(q: QuermassVector, delta: float) -> float:
    return math.fsum(math.comb(q.n, j) * q.W[j] * delta ** j for j in range(q.n + 1))


def steiner_perimeter(q: QuermassVector, delta: float) -> float:
    n = q.n
    return n * math.fsum(math.comb(n - 1, j) * q.W[j + 1] * delta ** j for j in range(n))


def af_margins(q: QuermassVector) -> dict[tuple[int, int], float]:
    """Aleksandrov-Fenchel margins for every pair 0 <= i < j <= n-1.

    Entry (i, j) is (W_j/w_n)^(1/(n-j)) - (W_i/w_n)^(1/(n-i)); nonnegative
    for convex bodies, zero for balls.
    """
    n, w = q.n, unit_ball_volume(q.n)
    norm = [(q.W[k] / w) ** (1.0 / (n - k)) for k in range(n)]
    return {(i, j): norm[j] - norm[i] for i, j in combinations(range(n), 2)}


def equivalent_ball_radius(q: QuermassVector) -> float:
    """Radius of the ball with the same W_{n-1} (same perimeter when n = 2)."""
    return q.W[q.n - 1] / unit_ball_volume(q.n)
