"""Canonical maps of doubly connected domains.

The annulus A(q, 1) is mapped onto the unit disk slit along an arc of the
circle |w| = a by f(z) = a P(z/a, q) / P(z a, q).  Since P(q^2 w) = -P(w)/w
and P(1/w) = -P(w)/w, the formula gives |f| = 1 on |z| = 1 and |f| = a on
|z| = q: the radius of the slit equals the modulus of the marked point.

General ring domains are first uniformized onto an annulus numerically (the
modulus potential gives |image point| = s^{1 - u}); the explicit map then
supplies the slit radii.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .domains.model import MoebiusDiskAutomorphism, RingDomain, apply_moebius
from .domains.raster import FIELD, rasterize
from .domains.shapes import TWO_PI, Circle, PointCurve, angle_offset
from .errors import AccuracyError, DomainError, PreconditionError
from .modulus import ModulusResult, interpolate, ring_modulus, solve_potential
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, prime_product


@dataclass(frozen=True)
class AnnulusSlitMap:
    """Map of A(q, 1) onto the unit disk minus an arc of |w| = a, with f(a) = 0."""

    q: float
    a: float
    truncation: int = 30

    def __post_init__(self):
        if not (0.0 <= self.q < 1.0):
            raise DomainError("q must lie in [0, 1)")
        if not (self.q < self.a < 1.0):
            raise DomainError("a must lie in (q, 1)")
        if int(self.truncation) < 1:
            raise DomainError("truncation must be >= 1")

    def evaluate(self, z):
        return annulus_slit_map_eval(self, z)

    def slit_center_angle(self):
        """Angle of the centre of the image arc (0 or pi: f is real on the real axis)."""
        if self.q == 0:
            return 0.0
        w = annulus_slit_map_eval(self, complex(self.q))
        return float(np.mod(np.angle(w), TWO_PI))

    def slit_half_width(self, n=8192):
        """Half-width of the image arc, from the images of the inner circle."""
        if self.q == 0:
            return 0.0
        c = self.slit_center_angle()

        def offset(t):
            w = annulus_slit_map_eval(self, self.q * np.exp(1j * np.asarray(t)))
            return np.abs(angle_offset(np.angle(w), c))

        th = np.linspace(0.0, math.pi, n)
        off = offset(th)
        k = int(np.argmax(off))
        lo, hi = th[max(k - 1, 0)], th[min(k + 1, n - 1)]
        res = minimize_scalar(lambda t: -float(offset(t)), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        return max(float(off[k]), -float(res.fun))


def annulus_slit_map_eval(m: AnnulusSlitMap, z, tol: ToleranceConfig = DEFAULT_TOLERANCES,
                          with_error: bool = False):
    """f(z) = a P(z/a, q) / P(z a, q) on the closed annulus q <= |z| <= 1."""
    z_arr = np.asarray(z, dtype=complex)
    r = np.abs(z_arr)
    if np.any(r > 1.0 + 1e-12) or np.any(r < m.q * (1.0 - 1e-12)):
        raise DomainError("annulus_slit_map_eval needs q <= |z| <= 1")
    if m.q == 0.0:
        out = (m.a - z_arr) / (1.0 - m.a * z_arr)
        err = np.zeros(out.shape)
    else:
        num, e1 = prime_product(z_arr / m.a, m.q, m.truncation, tol)
        den, e2 = prime_product(z_arr * m.a, m.q, m.truncation, tol)
        out = m.a * num / den
        # first-order propagation of the two product errors through the quotient
        err = np.abs(out) * (e1 / np.maximum(np.abs(num), 1e-300) + e2 / np.abs(den))
    if np.ndim(z) == 0:
        out, err = complex(out), float(err)
    return (out, err) if with_error else out


def reich_warschawski_check(q: float, a: float, samples: int = 256, truncation: int = 30):
    """Max deviations of |f| from a on |z| = q and from 1 on |z| = 1, with the certified bound."""
    m = AnnulusSlitMap(q, a, truncation)
    th = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    wi, ei = annulus_slit_map_eval(m, q * np.exp(1j * th), with_error=True)
    wo, eo = annulus_slit_map_eval(m, np.exp(1j * th), with_error=True)
    return {"q": q, "a": a, "truncation": truncation, "samples": samples,
            "inner_deviation": float(np.max(np.abs(np.abs(wi) - a))),
            "inner_bound": float(np.max(ei)),
            "outer_deviation": float(np.max(np.abs(np.abs(wo) - 1.0))),
            "outer_bound": float(np.max(eo)),
            "zero_residual": float(abs(annulus_slit_map_eval(m, a)))}


def winding_number(values) -> int:
    """Winding number about 0 of a closed sampled curve."""
    v = np.asarray(values, dtype=complex)
    d = np.angle(np.roll(v, -1) / v)
    return int(round(float(np.sum(d)) / TWO_PI))


# ---------------------------------------------------------------- uniformization


@dataclass
class Uniformization:
    """Numerical uniformization of a ring domain onto A(s, 1)."""

    modulus: ModulusResult
    inner_radius: float
    potential: object = field(repr=False)
    coarse_potential: object = field(repr=False, default=None)
    boundary_correspondence: dict = field(default_factory=dict)

    def transport(self, z, min_cells: float = 2.0):
        """Image modulus t = s^{1 - u(z)} of an interior point, Richardson-extrapolated."""
        t_fine = _transport_one(self.potential, self.inner_radius_fine, z, min_cells)
        if self.coarse_potential is None:
            return t_fine, float("inf")
        t_coarse = _transport_one(self.coarse_potential, self.inner_radius_coarse, z, min_cells)
        ext = (4 * t_fine - t_coarse) / 3
        return ext, abs(ext - t_fine)

    @property
    def inner_radius_fine(self):
        return math.exp(-TWO_PI * self.modulus.value)

    @property
    def inner_radius_coarse(self):
        return math.exp(-TWO_PI * self.modulus.coarse_value)


def _transport_one(pot, s, z, min_cells):
    cond = pot.condenser
    fi, fj = cond.chart.index_of(complex(z))
    i0, j0 = int(math.floor(fi)), int(math.floor(fj))
    n0, n1 = cond.shape
    k = int(math.ceil(min_cells))
    rows = np.arange(i0 - k + 1, i0 + k + 1)
    cols = np.arange(j0 - k + 1, j0 + k + 1)
    if rows.min() < 0 or rows.max() >= n0:
        raise AccuracyError("marked point lies within two cells of the grid boundary")
    if cond.chart.periodic:
        cols = np.mod(cols, n1)
    elif cols.min() < 0 or cols.max() >= n1:
        raise AccuracyError("marked point lies within two cells of the grid boundary")
    block = cond.labels[np.ix_(rows, cols)]
    fin = np.isfinite(cond.cut_frac[:, rows][:, :, cols])
    if np.any(block != FIELD) or np.any(fin[:, 1:-1, 1:-1]):
        raise AccuracyError("marked point lies within two cells of the boundary")
    u = interpolate(cond, pot.values, complex(z))
    # potential is 0 on the outer plate and 1 on the inner one
    return s ** u


def _chart_for_ring(domain: RingDomain):
    if isinstance(domain.inner, Circle):
        return "log_polar", None
    if getattr(domain.inner, "closed", False) and domain.inner.inside(0j):
        return "log_polar", 0j
    return "cartesian", None


def annulus_uniformize(domain: RingDomain, resolution: int = 256, grid_kind: str | None = None,
                       tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Uniformization:
    """Modulus potential of a ring domain and the data to transport points.

    The potential u is 0 on the outer and 1 on the inner continuum, so a
    point z goes to a point of modulus t = s^{u(z)}: the outer boundary lands
    on |w| = 1 and the inner one on |w| = s.
    """
    if domain.inner_degenerate and isinstance(domain.inner, PointCurve):
        raise PreconditionError("a point continuum cannot be uniformized on a grid")
    kind, center = _chart_for_ring(domain)
    if grid_kind is not None:
        kind = grid_kind
    cond = rasterize(domain, resolution=resolution, grid_kind=kind, center=center)
    pot = solve_potential(cond, tol=tol)
    mod = ring_modulus(cond, tol=tol)
    coarse_pot = None
    if cond.resolution // 2 >= 32:
        coarse_pot = solve_potential(cond.rebuild(cond.resolution // 2), tol=tol)
    s = math.exp(-TWO_PI * mod.best)
    uni = Uniformization(mod, s, pot, coarse_pot)
    uni.boundary_correspondence = _boundary_correspondence(pot, mod.value)
    return uni


def _boundary_correspondence(pot, m):
    """Image angles of the outer-boundary crossing points, from cumulative flux."""
    cond = pot.condenser
    pts, flux = [], []
    for d in range(4):
        mask = (cond.labels == FIELD) & (cond.cut_plate[d] == 0)
        pts.append(cond.cut_z[d][mask])
        flux.append(pot.link_flux[d][mask])
    pts = np.concatenate(pts)
    flux = np.concatenate(flux)
    if pts.size == 0:
        return {"points": [], "angles": []}
    c = cond.chart.origin if cond.chart.kind == "log_polar" else 0j
    order = np.argsort(np.mod(np.angle(pts - c), TWO_PI), kind="stable")
    cum = np.cumsum(flux[order])
    angles = TWO_PI * m * (cum - 0.5 * flux[order])
    return {"points": pts[order], "angles": angles}


# -------------------------------------------------------------------- slit radii


@dataclass(frozen=True)
class CanonicalMapResult:
    modulus: float
    inner_radius: float
    r_toward_outer: float
    r_toward_inner: float
    method: str = "analytic"
    error_estimate: float = 0.0
    point_modulus: float = float("nan")

    def __post_init__(self):
        if self.modulus != math.inf and not math.isclose(self.inner_radius, math.exp(-TWO_PI * self.modulus),
                                                        rel_tol=1e-10, abs_tol=1e-300):
            raise DomainError("inner radius must equal exp(-2 pi modulus)")
        for v in (self.r_toward_outer, self.r_toward_inner):
            if not (0.0 <= v < 1.0):
                raise DomainError("slit radii must lie in [0, 1)")

    def swapped(self):
        """Same data after the boundary-swapping inversion w -> s/w of the annulus."""
        return CanonicalMapResult(self.modulus, self.inner_radius, self.r_toward_inner, self.r_toward_outer,
                                  self.method, self.error_estimate,
                                  self.inner_radius / self.point_modulus if self.point_modulus > 0 else math.nan)

    def to_json(self):
        return {"modulus": self.modulus, "inner_radius": self.inner_radius,
                "r_toward_outer": self.r_toward_outer, "r_toward_inner": self.r_toward_inner,
                "method": self.method, "error_estimate": self.error_estimate}


def _from_annulus_point(s, t, method, err=0.0):
    if not (s < t < 1.0):
        raise DomainError("transported point must lie inside the annulus")
    m = -math.log(s) / TWO_PI
    return CanonicalMapResult(m, s, t, s / t, method, err, t)


def _two_circle_symmetric_point(outer: Circle, inner: Circle):
    """Automorphism of the outer disk taking the two circles to concentric ones."""
    rr = outer.radius
    c = (inner.center - outer.center) / rr
    rho = inner.radius / rr
    dist = abs(c)
    if dist < 1e-15:
        return outer.center, 0j, rho
    b = 1.0 + dist * dist - rho * rho
    x = (b - math.sqrt(b * b - 4.0 * dist * dist)) / (2.0 * dist)
    a = x * c / dist
    return outer.center, a, None


def slit_radii(domain: RingDomain, z, resolution: int = 512, method: str = "auto") -> CanonicalMapResult:
    """Slit radii r_toward_outer = t and r_toward_inner = s / t at z.

    ``method`` is "auto" (closed forms for concentric and two-circle rings,
    grid otherwise), "analytic" or "grid".
    """
    z = complex(z)
    if not domain.contains(z):
        raise DomainError("z must be an interior point of the domain")
    if isinstance(domain.inner, PointCurve):
        if not (isinstance(domain.outer, Circle)):
            raise PreconditionError("punctured domains are supported for disks only")
        o = domain.outer
        ph = MoebiusDiskAutomorphism((z - o.center) / o.radius)
        t = abs(apply_moebius(ph, (domain.inner.point - o.center) / o.radius))
        # the singleton continuum gets slit radius 0 by convention
        return CanonicalMapResult(math.inf, 0.0, t, 0.0, "analytic", 0.0, t)
    if method not in ("auto", "analytic", "grid"):
        raise DomainError(f"unknown method {method!r}")
    if method != "grid" and domain.is_two_circle:
        o, i = domain.outer, domain.inner
        _, a, _ = _two_circle_symmetric_point(o, i)
        ph = MoebiusDiskAutomorphism(a)
        w = apply_moebius(ph, (z - o.center) / o.radius)
        edge = apply_moebius(ph, (i.center - o.center) / o.radius + i.radius / o.radius)
        s = abs(edge)
        return _from_annulus_point(s, abs(w), "analytic")
    if method == "analytic":
        raise PreconditionError("closed forms exist only for rings bounded by two circles")
    uni = annulus_uniformize(domain, resolution)
    t, terr = uni.transport(z)
    s = uni.inner_radius
    return CanonicalMapResult(uni.modulus.best, s, t, s / t, "grid", max(terr, uni.modulus.error_estimate), t)
