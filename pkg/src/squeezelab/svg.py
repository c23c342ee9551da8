"""Static SVG figures of domains, barriers and computed curves."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .domains.model import RingDomain, SlitDiskDomain, ThreefoldExample, JordanDomain
from .domains.shapes import ArcCurve, Circle, PointCurve, Polygon, Polyline, Segment, StarCurve

SIZE = 480
LEGEND = (("unit circle", "#000000"), ("boundary / slits", "#c0392b"),
          ("computed curves", "#2471a3"), ("marked points", "#1e8449"))


def _points(curve, n=720):
    t = np.linspace(0.0, 1.0, n)
    if isinstance(curve, Circle):
        return curve.center + curve.radius * np.exp(2j * np.pi * t)
    if isinstance(curve, StarCurve):
        th = 2 * np.pi * t
        return curve.radius(th) * np.exp(1j * th)
    if isinstance(curve, ArcCurve):
        th = curve.center_angle + curve.half_width * (2 * t - 1)
        return curve.center + curve.radius * np.exp(1j * th)
    if isinstance(curve, Segment):
        return np.array([curve.start, curve.end])
    if isinstance(curve, Polygon):
        v = np.asarray(curve.vertices, dtype=complex)
        return np.append(v, v[0])
    if isinstance(curve, Polyline):
        return np.asarray(curve.points, dtype=complex)
    if isinstance(curve, PointCurve):
        return np.array([curve.point])
    raise TypeError(f"cannot draw {type(curve).__name__}")


def domain_curves(domain):
    """Boundary curves of a domain (excluding the unit circle, drawn separately)."""
    from .partition import BarrierSet

    if isinstance(domain, SlitDiskDomain):
        return [s.curve() for s in domain.slits]
    if isinstance(domain, RingDomain):
        out = [domain.outer, domain.inner] + list(domain.outer_slits)
        return [c for c in out if not (isinstance(c, Circle) and c.center == 0 and c.radius == 1.0)]
    if isinstance(domain, BarrierSet):
        return [a.curve() for a in domain.arcs]
    if isinstance(domain, ThreefoldExample):
        return list(domain.segments)
    if isinstance(domain, JordanDomain):
        return [domain.boundary] + list(domain.slits)
    raise TypeError(f"cannot draw {type(domain).__name__}")


def render_svg(domain=None, curves=(), points=(), title="", extent=1.1) -> str:
    """SVG document with the unit circle, the domain's boundary, extra curves and points."""
    scale = SIZE / (2 * extent)

    def xy(z):
        return f"{(z.real + extent) * scale:.3f},{(extent - z.imag) * scale:.3f}"

    def path(curve, color, width):
        pts = _points(curve)
        if len(pts) == 1:
            return circle_mark(pts[0], color)
        d = " ".join(xy(complex(p)) for p in pts)
        return f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="{width}"/>'

    def circle_mark(z, color):
        x, y = xy(complex(z)).split(",")
        return f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>'

    h = SIZE + 20 * len(LEGEND) + 30
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{h}" viewBox="0 0 {SIZE} {h}">',
           f'<title>{escape(title)}</title>', f'<rect width="{SIZE}" height="{h}" fill="#ffffff"/>',
           path(Circle(0j, 1.0), LEGEND[0][1], 1.5)]
    if domain is not None:
        out += [path(c, LEGEND[1][1], 2.0) for c in domain_curves(domain)]
    out += [path(c, LEGEND[2][1], 1.5) for c in curves]
    out += [circle_mark(p, LEGEND[3][1]) for p in points]
    for k, (label, color) in enumerate(LEGEND):
        y = SIZE + 20 + 20 * k
        out.append(f'<line x1="10" y1="{y}" x2="40" y2="{y}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="48" y="{y + 4}" font-family="sans-serif" font-size="12">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
