"""Planar curves and the plate pieces built from them.

A *curve* is either closed (circle, polygon, star-shaped Fourier graph) or
degenerate (circular arc, segment, polyline, point).  Rasterization never sees
curves directly; it sees *pieces*: a closed region on one side of a closed
curve, or a zero-thickness slit.  Pieces answer the two questions the grid
needs: which nodes they contain, and where a grid link crosses them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from matplotlib.path import Path

from ..errors import DomainError

TWO_PI = 2.0 * math.pi
_REL = 1e-12


def wrap_angle(theta):
    """Map angles into [0, 2*pi)."""
    return np.mod(theta, TWO_PI)


def angle_offset(theta, center):
    """Signed angular distance theta - center in [-pi, pi)."""
    return np.mod(np.asarray(theta) - center + math.pi, TWO_PI) - math.pi


# ---------------------------------------------------------------- closed curves


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("circle radius must be positive and finite")
        object.__setattr__(self, "center", complex(self.center))

    closed = True

    def inside(self, z):
        return np.abs(np.asarray(z) - self.center) <= self.radius * (1 + _REL)

    def outside(self, z):
        return np.abs(np.asarray(z) - self.center) >= self.radius * (1 - _REL)

    def samples(self, n=256):
        t = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return self.center + self.radius * np.exp(1j * t)

    def distance_range(self, c):
        d = abs(complex(c) - self.center)
        return abs(self.radius - d), self.radius + d

    def bbox(self):
        c, r = self.center, self.radius
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def to_json(self):
        return {"kind": "circle", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Polygon:
    """Closed polyline, vertices listed once (the closing edge is implicit)."""

    vertices: tuple
    max_edge: float = 0.02

    closed = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).ravel()
        if v.size < 3:
            raise DomainError("a polygon needs at least three vertices")
        object.__setattr__(self, "vertices", tuple(complex(x) for x in v))

    @property
    def _path(self):
        v = np.asarray(self.vertices)
        xy = np.column_stack([v.real, v.imag])
        return Path(np.vstack([xy, xy[:1]]), closed=True)

    def inside(self, z):
        z = np.asarray(z, dtype=complex)
        pts = np.column_stack([z.ravel().real, z.ravel().imag])
        return self._path.contains_points(pts, radius=1e-12).reshape(z.shape)

    def outside(self, z):
        return ~self.inside(z)

    def samples(self, n=None):
        v = np.asarray(self.vertices)
        w = np.roll(v, -1)
        out = []
        for a, b in zip(v, w):
            k = max(1, int(math.ceil(abs(b - a) / self.max_edge)))
            out.append(a + (b - a) * np.arange(k) / k)
        return np.concatenate(out)

    def distance_range(self, c):
        d = np.abs(self.samples() - complex(c))
        return float(d.min()), float(d.max())

    def bbox(self):
        v = np.asarray(self.vertices)
        return v.real.min(), v.real.max(), v.imag.min(), v.imag.max()

    def to_json(self):
        return {"kind": "polygon", "vertices": [[v.real, v.imag] for v in self.vertices]}


@dataclass(frozen=True)
class StarCurve:
    """Star-shaped curve r(theta) = exp(c0 + sum a_k cos k theta + b_k sin k theta)."""

    c0: float
    fourier: tuple = ()

    closed = True

    def __post_init__(self):
        object.__setattr__(self, "fourier", tuple((float(a), float(b)) for a, b in self.fourier))

    def radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        s = np.full(theta.shape, float(self.c0))
        for k, (a, b) in enumerate(self.fourier, start=1):
            s = s + a * np.cos(k * theta) + b * np.sin(k * theta)
        return np.exp(s)

    def inside(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z) <= self.radius(np.angle(z)) * (1 + _REL)

    def outside(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z) >= self.radius(np.angle(z)) * (1 - _REL)

    def samples(self, n=1024):
        t = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return self.radius(t) * np.exp(1j * t)

    def radial_extent(self, n=8192):
        r = self.radius(np.linspace(0.0, TWO_PI, n, endpoint=False))
        return float(r.min()), float(r.max())

    def distance_range(self, c):
        if complex(c) == 0:
            lo, hi = self.radial_extent()
            return lo * (1 - 1e-6), hi * (1 + 1e-6)
        d = np.abs(self.samples(8192) - complex(c))
        return float(d.min()) * (1 - 1e-6), float(d.max()) * (1 + 1e-6)

    def bbox(self):
        s = self.samples(4096)
        _, hi = self.radial_extent()
        pad = 1e-3 * hi
        return s.real.min() - pad, s.real.max() + pad, s.imag.min() - pad, s.imag.max() + pad

    def to_json(self):
        return {"kind": "star", "c0": self.c0, "fourier": [list(p) for p in self.fourier]}


# ------------------------------------------------------------ degenerate curves


@dataclass(frozen=True)
class ArcCurve:
    """Arc of the circle |z - center| = radius, |arg - center_angle| <= half_width."""

    radius: float
    center_angle: float
    half_width: float
    center: complex = 0j

    closed = False

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("arc radius must be positive")
        if not (0 < self.half_width < math.pi):
            raise DomainError("arc half-width must lie in (0, pi)")
        object.__setattr__(self, "center_angle", float(wrap_angle(self.center_angle)))
        object.__setattr__(self, "center", complex(self.center))

    def side(self, z):
        return np.abs(np.asarray(z) - self.center) - self.radius

    def extent(self, z):
        off = angle_offset(np.angle(np.asarray(z) - self.center), self.center_angle)
        return np.abs(off) <= self.half_width * (1 + 1e-12) + 1e-15

    def samples(self, n=256):
        t = self.center_angle + np.linspace(-self.half_width, self.half_width, n)
        return self.center + self.radius * np.exp(1j * t)

    @property
    def length(self):
        return 2.0 * self.radius * self.half_width

    def bbox(self):
        s = self.samples(512)
        return s.real.min(), s.real.max(), s.imag.min(), s.imag.max()

    def distance_range(self, c):
        d = np.abs(self.samples(2048) - complex(c))
        return float(d.min()), float(d.max())

    def to_json(self):
        return {"kind": "arc", "radius": self.radius, "center_angle": self.center_angle,
                "half_width": self.half_width, "center": [self.center.real, self.center.imag]}


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    closed = False

    def __post_init__(self):
        object.__setattr__(self, "start", complex(self.start))
        object.__setattr__(self, "end", complex(self.end))
        if self.start == self.end:
            raise DomainError("segment endpoints coincide")

    @property
    def _dir(self):
        return self.end - self.start

    def side(self, z):
        d = self._dir
        return ((np.asarray(z) - self.start) * np.conj(d)).imag / abs(d)

    def extent(self, z):
        d = self._dir
        s = ((np.asarray(z) - self.start) * np.conj(d)).real / abs(d) ** 2
        return (s >= -1e-12) & (s <= 1 + 1e-12)

    def samples(self, n=128):
        return self.start + self._dir * np.linspace(0.0, 1.0, n)

    @property
    def length(self):
        return abs(self._dir)

    def bbox(self):
        a, b = self.start, self.end
        return min(a.real, b.real), max(a.real, b.real), min(a.imag, b.imag), max(a.imag, b.imag)

    def distance_range(self, c):
        d = np.abs(self.samples(1024) - complex(c))
        return float(d.min()), float(d.max())

    def to_json(self):
        return {"kind": "segment", "start": [self.start.real, self.start.imag], "end": [self.end.real, self.end.imag]}


@dataclass(frozen=True)
class Polyline:
    points: tuple

    closed = False

    def __post_init__(self):
        p = np.asarray(self.points, dtype=complex).ravel()
        if p.size < 2:
            raise DomainError("a polyline needs at least two points")
        object.__setattr__(self, "points", tuple(complex(x) for x in p))

    @property
    def segments(self):
        p = self.points
        return [Segment(a, b) for a, b in zip(p[:-1], p[1:]) if a != b]

    def samples(self, n=None):
        return np.concatenate([s.samples(32) for s in self.segments])

    @property
    def length(self):
        return sum(s.length for s in self.segments)

    def bbox(self):
        p = np.asarray(self.points)
        return p.real.min(), p.real.max(), p.imag.min(), p.imag.max()

    def distance_range(self, c):
        d = np.abs(self.samples() - complex(c))
        return float(d.min()), float(d.max())

    def to_json(self):
        return {"kind": "polyline", "points": [[p.real, p.imag] for p in self.points]}


@dataclass(frozen=True)
class PointCurve:
    """A boundary continuum reduced to a single point."""

    point: complex

    closed = False

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))

    def samples(self, n=1):
        return np.array([self.point])

    length = 0.0

    def bbox(self):
        p = self.point
        return p.real, p.real, p.imag, p.imag

    def distance_range(self, c):
        d = abs(self.point - complex(c))
        return d, d

    def to_json(self):
        return {"kind": "point", "point": [self.point.real, self.point.imag]}


# ------------------------------------------------------------------ plate pieces


@dataclass(frozen=True)
class RegionPiece:
    """Closed region on one side of a closed curve."""

    curve: object
    interior: bool = True

    def contains(self, z):
        return self.curve.inside(z) if self.interior else self.curve.outside(z)

    def bbox(self):
        return self.curve.bbox()


@dataclass(frozen=True)
class SlitPiece:
    """Zero-thickness plate along a straight segment or a circular arc."""

    curve: object

    def side(self, z):
        return self.curve.side(z)

    def extent(self, z):
        return self.curve.extent(z)

    def bbox(self):
        return self.curve.bbox()


def pieces_for(curve, interior=True):
    """Plate pieces representing ``curve``.

    Closed curves give a region (interior or exterior side); arcs and
    segments give one slit; polylines give one slit per segment.  Point
    continua have no grid representation and raise.
    """
    if getattr(curve, "closed", False):
        return [RegionPiece(curve, interior)]
    if isinstance(curve, Polyline):
        return [SlitPiece(s) for s in curve.segments]
    if isinstance(curve, (ArcCurve, Segment)):
        return [SlitPiece(curve)]
    raise DomainError(f"{type(curve).__name__} boundary has no grid representation")


def curve_from_json(obj):
    kind = obj["kind"]
    pt = lambda v: complex(v[0], v[1])  # noqa: E731
    if kind == "circle":
        return Circle(pt(obj.get("center", [0, 0])), float(obj["radius"]))
    if kind == "polygon":
        return Polygon(tuple(pt(v) for v in obj["vertices"]))
    if kind == "star":
        return StarCurve(float(obj["c0"]), tuple(tuple(p) for p in obj.get("fourier", [])))
    if kind == "arc":
        return ArcCurve(float(obj["radius"]), float(obj["center_angle"]), float(obj["half_width"]),
                        pt(obj.get("center", [0, 0])))
    if kind == "segment":
        return Segment(pt(obj["start"]), pt(obj["end"]))
    if kind == "polyline":
        return Polyline(tuple(pt(v) for v in obj["points"]))
    if kind == "point":
        return PointCurve(pt(obj["point"]))
    raise DomainError(f"unknown curve kind {kind!r}")
