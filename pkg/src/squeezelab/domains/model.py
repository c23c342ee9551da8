"""Domain model: slit disks, ring domains, disk automorphisms, named examples."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, PreconditionError
from .shapes import (TWO_PI, ArcCurve, Circle, PointCurve, Polygon, Segment, angle_offset, curve_from_json,
                     pieces_for, wrap_angle)


@dataclass(frozen=True)
class CircularArcSlit:
    """Arc {radius * e^{i t} : |t - center_angle| <= half_width} of a circle about 0."""

    radius: float
    center_angle: float
    half_width: float

    def __post_init__(self):
        if not (0.0 < self.radius < 1.0):
            raise DomainError(f"slit radius must lie in (0, 1), got {self.radius!r}")
        if not (0.0 < self.half_width < math.pi):
            raise DomainError(f"slit half-width must lie in (0, pi), got {self.half_width!r}")
        object.__setattr__(self, "center_angle", float(wrap_angle(self.center_angle)))

    def curve(self):
        return ArcCurve(self.radius, self.center_angle, self.half_width)

    def rotated(self, angle):
        return CircularArcSlit(self.radius, self.center_angle + angle, self.half_width)

    def contains_angle(self, theta):
        return np.abs(angle_offset(theta, self.center_angle)) <= self.half_width

    def samples(self, n=256):
        return self.curve().samples(n)

    def to_json(self):
        return {"radius": self.radius, "center_angle": self.center_angle, "half_width": self.half_width}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["radius"]), float(obj["center_angle"]), float(obj["half_width"]))


def _arcs_overlap(a: CircularArcSlit, b: CircularArcSlit) -> bool:
    if a.radius != b.radius:
        return False
    gap = abs(float(angle_offset(a.center_angle, b.center_angle)))
    return gap <= a.half_width + b.half_width


UNIT_CIRCLE = Circle(0j, 1.0)


@dataclass(frozen=True)
class SlitDiskDomain:
    """Unit disk minus finitely many disjoint concentric circular-arc slits.

    Boundary continua are numbered slits first, unit circle last, so that
    ``continua()[-1]`` is the circle.
    """

    slits: tuple = ()

    def __post_init__(self):
        slits = tuple(self.slits)
        for i in range(len(slits)):
            for j in range(i + 1, len(slits)):
                if _arcs_overlap(slits[i], slits[j]):
                    raise DomainError(f"slits {i} and {j} overlap")
        object.__setattr__(self, "slits", slits)

    @property
    def connectivity(self):
        return len(self.slits) + 1

    def continua(self):
        return [s.curve() for s in self.slits] + [UNIT_CIRCLE]

    def plate_pieces(self, index):
        curve = self.continua()[index]
        return pieces_for(curve, interior=False) if curve is UNIT_CIRCLE else pieces_for(curve)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z) < 1.0

    def rotated(self, angle):
        return SlitDiskDomain(tuple(s.rotated(angle) for s in self.slits))

    def slit_set(self, decimals=12):
        """Canonical set of slit parameters, used for exact symmetry checks."""
        return {(round(s.radius, decimals), round(s.center_angle % TWO_PI, decimals) % round(TWO_PI, decimals),
                 round(s.half_width, decimals)) for s in self.slits}

    def bbox(self):
        return -1.0, 1.0, -1.0, 1.0

    def to_json(self):
        return {"type": "slit_disk", "slits": [s.to_json() for s in self.slits]}


@dataclass(frozen=True)
class RingDomain:
    """Doubly connected domain between an outer and an inner boundary continuum.

    ``outer`` is a closed curve; the domain lies inside it.  ``inner`` is a
    closed curve (domain outside it) or a degenerate continuum: arc, segment,
    polyline, or point.  ``outer_slits`` are slits attached to the outer curve
    and belong to the outer continuum.
    """

    outer: object
    inner: object
    outer_slits: tuple = ()

    def __post_init__(self):
        if not getattr(self.outer, "closed", False):
            raise DomainError("outer boundary of a ring domain must be a closed curve")
        object.__setattr__(self, "outer_slits", tuple(self.outer_slits))
        samples = self.inner.samples(256)
        if not np.all(self.outer.inside(samples) & ~self.outer.outside(samples)):
            raise DomainError("inner boundary must lie strictly inside the outer boundary")

    @classmethod
    def annulus(cls, inner_radius, outer_radius=1.0):
        if not (0.0 < inner_radius < outer_radius):
            raise DomainError("annulus needs 0 < inner radius < outer radius")
        return cls(Circle(0j, outer_radius), Circle(0j, inner_radius))

    @classmethod
    def punctured_disk(cls, point=0j):
        if abs(point) >= 1:
            raise DomainError("puncture must lie in the unit disk")
        return cls(UNIT_CIRCLE, PointCurve(point))

    @property
    def inner_degenerate(self):
        return not getattr(self.inner, "closed", False)

    @property
    def is_concentric_annulus(self):
        return (isinstance(self.outer, Circle) and isinstance(self.inner, Circle)
                and self.outer.center == self.inner.center and not self.outer_slits)

    @property
    def is_two_circle(self):
        return isinstance(self.outer, Circle) and isinstance(self.inner, Circle) and not self.outer_slits

    def continua(self):
        return [self.outer, self.inner]

    def plate_pieces(self, index):
        if index == 0:
            out = pieces_for(self.outer, interior=False)
            for s in self.outer_slits:
                out += pieces_for(s)
            return out
        if index == 1:
            return pieces_for(self.inner, interior=True)
        raise DomainError("ring domains have continua 0 (outer) and 1 (inner)")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        ok = self.outer.inside(z) & ~self.outer.outside(z)
        if getattr(self.inner, "closed", False):
            ok &= ~self.inner.inside(z)
        elif isinstance(self.inner, PointCurve):
            ok &= z != self.inner.point
        return ok

    def bbox(self):
        return self.outer.bbox()

    def to_json(self):
        out = {"type": "ring", "outer": self.outer.to_json(), "inner": self.inner.to_json()}
        if self.outer_slits:
            out["outer_slits"] = [s.to_json() for s in self.outer_slits]
        return out


@dataclass(frozen=True)
class JordanDomain:
    """Simply connected domain: interior of a closed curve minus attached slits."""

    boundary: object
    slits: tuple = ()

    def __post_init__(self):
        if not getattr(self.boundary, "closed", False):
            raise DomainError("a Jordan domain needs a closed boundary curve")
        object.__setattr__(self, "slits", tuple(self.slits))

    def plate_pieces(self):
        out = pieces_for(self.boundary, interior=False)
        for s in self.slits:
            out += pieces_for(s)
        return out

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return self.boundary.inside(z) & ~self.boundary.outside(z)

    def bbox(self):
        return self.boundary.bbox()

    def translated(self, shift):
        shift = complex(shift)
        b = self.boundary
        if isinstance(b, Circle):
            nb = Circle(b.center + shift, b.radius)
        elif isinstance(b, Polygon):
            nb = Polygon(tuple(v + shift for v in b.vertices))
        else:
            raise DomainError("translation is implemented for circle and polygon boundaries")
        ns = []
        for s in self.slits:
            if isinstance(s, Segment):
                ns.append(Segment(s.start + shift, s.end + shift))
            elif isinstance(s, ArcCurve):
                ns.append(ArcCurve(s.radius, s.center_angle, s.half_width, s.center + shift))
            else:
                raise DomainError("translation is implemented for segment and arc slits")
        return JordanDomain(nb, tuple(ns))

    def to_json(self):
        return {"type": "disk" if isinstance(self.boundary, Circle) and not self.slits else "jordan",
                "boundary": self.boundary.to_json(), "slits": [s.to_json() for s in self.slits]}


@dataclass(frozen=True)
class MoebiusDiskAutomorphism:
    """z -> e^{i rotation} (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if not abs(self.a) < 1.0:
            raise DomainError("automorphism parameter must satisfy |a| < 1")

    def inverse(self):
        e = np.exp(1j * self.rotation)
        return MoebiusDiskAutomorphism(-self.a * e, -self.rotation)

    def image_of_circle(self, circle: Circle) -> Circle:
        """Image circle (the map sends circles inside the disk to circles)."""
        t = np.array([0.0, 2.1, 4.2])
        w = apply_moebius(self, circle.center + circle.radius * np.exp(1j * t))
        z1, z2, z3 = w
        # circumcenter of three points
        d = 2 * (z1.real * (z2.imag - z3.imag) + z2.real * (z3.imag - z1.imag) + z3.real * (z1.imag - z2.imag))
        ux = ((abs(z1) ** 2) * (z2.imag - z3.imag) + (abs(z2) ** 2) * (z3.imag - z1.imag)
              + (abs(z3) ** 2) * (z1.imag - z2.imag)) / d
        uy = ((abs(z1) ** 2) * (z3.real - z2.real) + (abs(z2) ** 2) * (z1.real - z3.real)
              + (abs(z3) ** 2) * (z2.real - z1.real)) / d
        c = complex(ux, uy)
        return Circle(c, float(abs(z1 - c)))

    def image_of_ring(self, ring: RingDomain) -> RingDomain:
        """Image of a ring domain whose outer boundary is the unit circle and
        whose inner boundary is a circle or polygon."""
        if not (isinstance(ring.outer, Circle) and ring.outer.center == 0 and ring.outer.radius == 1.0):
            raise PreconditionError("only rings inside the unit disk bounded by the unit circle are supported")
        if isinstance(ring.inner, Circle):
            inner = self.image_of_circle(ring.inner)
        elif isinstance(ring.inner, Polygon):
            inner = Polygon(tuple(apply_moebius(self, ring.inner.samples())))
        else:
            raise PreconditionError("inner boundary must be a circle or a polygon")
        return RingDomain(UNIT_CIRCLE, inner)


def apply_moebius(t: MoebiusDiskAutomorphism, z):
    """Apply the automorphism; maps the closed unit disk onto itself, a to 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise DomainError("apply_moebius needs |z| <= 1")
    w = np.exp(1j * t.rotation) * (z - t.a) / (1.0 - np.conj(t.a) * z)
    return complex(w) if w.ndim == 0 else w


def pseudo_hyperbolic(z, w):
    """|(w - z) / (1 - conj(z) w)|, the modulus of the automorphism sending z to 0, at w."""
    z = complex(z)
    w = np.asarray(w, dtype=complex)
    return np.abs((w - z) / (1.0 - np.conj(z) * w))


def build_symmetric_slit_disk(n: int, r: float, alpha: float) -> SlitDiskDomain:
    """Omega(n, r, alpha): n-1 slits of half-width alpha equally spaced on |z| = r."""
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    if not (0.0 < r < 1.0):
        raise DomainError("r must lie in (0, 1)")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if n > 2 and alpha >= math.pi / (n - 1):
        raise DomainError(f"alpha = {alpha} >= pi/(n-1) makes the slits overlap")
    if n == 2 and alpha >= math.pi:
        raise DomainError("alpha must be < pi for a single slit")
    slits = tuple(CircularArcSlit(r, TWO_PI * k / (n - 1), alpha) for k in range(n - 1))
    return SlitDiskDomain(slits)


@dataclass(frozen=True)
class ThreefoldExample:
    """Sphere minus three radial segments [1, a] e^{2 pi i k / 3}, with marked point 0.

    ``inverted_segments`` gives the same configuration after z -> 1/z,
    where every boundary continuum is bounded ([1/a, 1] e^{-2 pi i k/3});
    the marked point 0 goes to infinity in that chart.
    """

    a: float
    segments: tuple
    inverted_segments: tuple
    marked_point: complex = 0j

    def rotated(self, angle):
        rot = np.exp(1j * angle)
        return tuple(Segment(s.start * rot, s.end * rot) for s in self.segments)

    def to_json(self):
        return {"type": "threefold_example", "a": self.a}


def build_threefold_example(a: float, min_length: float = 1e-9) -> ThreefoldExample:
    a = float(a)
    if not a > 1.0:
        raise DomainError("threefold example needs a > 1")
    if a - 1.0 < min_length:
        raise DomainError(f"slits of length {a - 1.0:.3g} are below the degeneracy threshold {min_length:g}")
    segs, inv = [], []
    for k in range(3):
        u = np.exp(2j * math.pi * k / 3)
        segs.append(Segment(u, a * u))
        inv.append(Segment(np.conj(u) / a, np.conj(u)))
    return ThreefoldExample(a, tuple(segs), tuple(inv))


def ring_from_json(obj) -> RingDomain:
    outer = curve_from_json(obj["outer"])
    inner = curve_from_json(obj["inner"])
    slits = tuple(curve_from_json(s) for s in obj.get("outer_slits", []))
    return RingDomain(outer, inner, slits)
