"""Squeezing functions: exact values for rings, bounds for slit disks.

Upper bounds use Groetzsch's module theorem: if a ring of module M separates
a boundary continuum gamma from z and every other continuum, then any
injective map of the domain into the disk sending gamma onto the unit circle
and z to 0 sends that ring to a ring of module M separating the unit circle
from a continuum containing 0 and the whole rest of the image boundary.
Every such image point therefore has modulus at most mu^{-1}(2 pi M).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .canonical import CanonicalMapResult, slit_radii
from .domains.model import (UNIT_CIRCLE, RingDomain, SlitDiskDomain,
                            build_symmetric_slit_disk, pseudo_hyperbolic)
from .domains.raster import rasterize
from .domains.shapes import TWO_PI, ArcCurve, Circle, PointCurve
from .errors import DomainError, PreconditionError, RefinementError, TopologyError
from .modulus import ModulusResult, ring_modulus
from .numerics import groetzsch_mu_inv


@dataclass
class SqueezeReport:
    """Exact value or certified interval for a squeezing function."""

    kind: str
    lo: float
    hi: float
    witness: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("exact", "interval"):
            raise DomainError("report kind must be 'exact' or 'interval'")
        if self.kind == "exact" and not self.witness:
            raise DomainError("exact reports need a witness")
        if self.kind == "interval" and not (0.0 < self.lo <= self.hi <= 1.0):
            raise DomainError(f"interval report needs 0 < lo <= hi <= 1, got [{self.lo}, {self.hi}]")

    @property
    def value(self):
        return self.lo if self.kind == "exact" else (self.lo, self.hi)

    def to_json(self):
        out = {"kind": self.kind, "witness": self.witness,
               "certificates": [{"name": n, "value": v} for n, v in self.certificates]}
        if self.kind == "exact":
            out["value"] = self.lo
        else:
            out["interval"] = [self.lo, self.hi]
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def exact_report(value, witness, certificates=()):
    return SqueezeReport("exact", float(value), float(value), list(witness), list(certificates))


# ---------------------------------------------------------------- rings (exact)


def squeeze_doubly_connected(domain: RingDomain, z, resolution: int = 512, method: str = "auto",
                             tie_tol: float | None = None) -> SqueezeReport:
    """S(z) = max(r_toward_outer, r_toward_inner) with the maximizing direction(s)."""
    if not isinstance(domain, RingDomain):
        raise PreconditionError("squeeze_doubly_connected needs a ring domain")
    if isinstance(domain.outer, PointCurve) and isinstance(domain.inner, PointCurve):
        raise PreconditionError("both boundary continua are points")
    res = slit_radii(domain, z, resolution=resolution, method=method)
    return _report_from_radii(res, tie_tol)


def _report_from_radii(res: CanonicalMapResult, tie_tol=None):
    a, b = res.r_toward_outer, res.r_toward_inner
    tol = (1e-12 if res.method == "analytic" else max(res.error_estimate, 1e-12)) if tie_tol is None else tie_tol
    witness = []
    if a >= b - tol:
        witness.append({"direction": "outer", "map": "canonical slit map sending the outer continuum to the unit "
                        "circle", "radius": a})
    if b >= a - tol:
        witness.append({"direction": "inner", "map": "canonical slit map sending the inner continuum to the unit "
                        "circle", "radius": b})
    certs = [("modulus", res.modulus), ("inner_radius", res.inner_radius),
             ("r_toward_outer", a), ("r_toward_inner", b), ("method", res.method),
             ("error_estimate", res.error_estimate)]
    return exact_report(max(a, b), witness, certs)


# ----------------------------------------------------------- circle-slit exact


def _common_radius(domain: SlitDiskDomain):
    radii = {s.radius for s in domain.slits}
    if len(radii) != 1:
        return None
    return radii.pop()


def directional_squeeze_exact_circle_slits(domain: SlitDiskDomain, z=0j) -> SqueezeReport:
    """S toward the unit circle at 0 when every slit lies on one circle |z| = r: the value is r."""
    if not isinstance(domain, SlitDiskDomain) or not domain.slits:
        raise PreconditionError("needs a slit disk with at least one slit")
    if complex(z) != 0:
        raise PreconditionError("the exact circle-slit value is for the marked point 0")
    r = _common_radius(domain)
    if r is None:
        raise PreconditionError("slits lie on different circles")
    witness = [{"direction": "unit_circle", "map": "identity", "unique_up_to": "rotation about 0"}]
    return exact_report(r, witness, [("slit_radius", r)])


# -------------------------------------------------------------- upper bounds


@dataclass
class DirectionalBound:
    bound: float
    modulus: float
    modulus_result: ModulusResult | None
    curve: object
    continuum: int

    def to_json(self):
        out = {"bound": self.bound, "modulus": self.modulus, "continuum": self.continuum,
               "curve": self.curve.to_json() if self.curve is not None else None}
        if self.modulus_result is not None:
            out["modulus_result"] = self.modulus_result.to_json()
        return out


def groetzsch_bound(modulus: float) -> float:
    """mu^{-1}(2 pi M): the largest modulus an image point can have behind a ring of module M."""
    if not modulus > 0:
        return 1.0
    return groetzsch_mu_inv(TWO_PI * modulus)


def _separates(domain, k, z, curve):
    """Sampled check that ``curve`` separates continuum k from z and the other continua."""
    cont = domain.continua()
    outer_idx = len(cont) - 1 if isinstance(domain, SlitDiskDomain) else 0
    z = complex(z)
    curve_pts = curve.samples(512)
    if not np.all(domain.contains(curve_pts)):
        return False
    # the curve must not meet any boundary continuum
    for j, c in enumerate(cont):
        if j == outer_idx:
            continue
        pts = c.samples(512)
        lo, _ = _min_dist(curve_pts, pts)
        if lo < 1e-9:
            return False
    inside = curve.inside
    if k == outer_idx:
        if not inside(np.array([z]))[0]:
            return False
        return all(np.all(inside(c.samples(256))) for j, c in enumerate(cont) if j != outer_idx)
    if inside(np.array([z]))[0] or not np.all(inside(cont[k].samples(256))):
        return False
    return all(not np.any(inside(c.samples(256))) for j, c in enumerate(cont) if j not in (k, outer_idx))


def _min_dist(a, b):
    d = np.abs(a[:, None] - b[None, :])
    return float(d.min()), float(d.max())


def directional_squeeze_upper_bound(domain, gamma_k: int, z, separating_curve, resolution: int = 256,
                                    details: bool = False):
    """Groetzsch upper bound for S toward continuum ``gamma_k``.

    The ring between the continuum and ``separating_curve`` is solved on a
    grid; its conservative (two-grid) lower module estimate is used, so the
    bound errs upwards.  A circle about 0 separating the unit circle from
    everything else gives the module in closed form.
    """
    cont = domain.continua()
    if not (0 <= gamma_k < len(cont)):
        raise DomainError("no such boundary continuum")
    if not _separates(domain, gamma_k, z, separating_curve):
        raise TopologyError("curve does not separate the continuum from the point and the other continua")
    gamma = cont[gamma_k]
    if gamma is UNIT_CIRCLE or (isinstance(gamma, Circle) and gamma.center == 0 and gamma.radius == 1.0):
        if isinstance(separating_curve, Circle) and separating_curve.center == 0:
            m = math.log(1.0 / separating_curve.radius) / TWO_PI
            out = DirectionalBound(groetzsch_bound(m), m, None, separating_curve, gamma_k)
            return out if details else out.bound
        ring = RingDomain(UNIT_CIRCLE, separating_curve)
        kind = "log_polar" if separating_curve.inside(0j) else "cartesian"
        cond = rasterize(ring, resolution=resolution, grid_kind=kind,
                         center=0j if kind == "log_polar" and not isinstance(separating_curve, Circle) else None)
    else:
        ring = RingDomain(separating_curve, gamma)
        cond = rasterize(ring, resolution=resolution, grid_kind="cartesian")
    mr = ring_modulus(cond)
    m = mr.certified_lower
    out = DirectionalBound(groetzsch_bound(m), m, mr, separating_curve, gamma_k)
    return out if details else out.bound


def _slit_center(curve):
    if isinstance(curve, ArcCurve):
        return curve.center + curve.radius * np.exp(1j * curve.center_angle)
    s = curve.samples(257)
    return s[len(s) // 2]


def _circle_candidates(domain, k, z, count=4):
    """Circles about the midpoint of continuum k, radii swept between the continuum and its neighbours."""
    cont = domain.continua()
    gamma = cont[k]
    c = complex(_slit_center(gamma))
    reach = float(np.max(np.abs(gamma.samples(512) - c)))
    limit = min(1.0 - abs(c), abs(complex(z) - c))
    for j, other in enumerate(cont):
        if j != k and j != len(cont) - 1:
            limit = min(limit, float(np.min(np.abs(other.samples(512) - c))))
    if limit <= reach * 1.05:
        return []
    eps = np.geomspace(reach * 1.05 + 1e-12, 0.95 * limit, count) if 0.95 * limit > reach * 1.05 else [0.95 * limit]
    return [Circle(c, float(e)) for e in eps]


def mobius_lower_bound(domain, z) -> float:
    """dist(0, boundary of phi_z(domain)) for the disk automorphism phi_z; a valid lower bound."""
    z = complex(z)
    if isinstance(domain, SlitDiskDomain):
        curves = [s.curve() for s in domain.slits]
    elif isinstance(domain, RingDomain) and domain.outer == UNIT_CIRCLE and not domain.outer_slits:
        curves = [domain.inner]
    else:
        raise PreconditionError("Moebius lower bound needs the unit circle as outer boundary")
    best = 1.0
    for c in curves:
        if isinstance(c, PointCurve):
            best = min(best, float(pseudo_hyperbolic(z, c.point)))
            continue
        best = min(best, _min_pseudo_hyperbolic(z, c))
    return best


def _min_pseudo_hyperbolic(z, curve):
    if isinstance(curve, ArcCurve):
        def pt(t):
            return curve.center + curve.radius * np.exp(1j * (curve.center_angle + t))
        lo, hi = -curve.half_width, curve.half_width
    elif isinstance(curve, Circle):
        def pt(t):
            return curve.center + curve.radius * np.exp(1j * t)
        lo, hi = 0.0, TWO_PI
    else:
        s = curve.samples(4096)
        return float(np.min(pseudo_hyperbolic(z, s)))
    ts = np.linspace(lo, hi, 2049)
    vals = pseudo_hyperbolic(z, pt(ts))
    k = int(np.argmin(vals))
    a, b = ts[max(k - 1, 0)], ts[min(k + 1, ts.size - 1)]
    res = minimize_scalar(lambda t: float(pseudo_hyperbolic(z, pt(t))), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-13})
    return float(min(vals[k], res.fun))


def squeeze_bounds(domain, z, resolution: int = 256, separating_curves: dict | None = None) -> SqueezeReport:
    """Certified interval [lo, hi] for S(z) on a slit disk or ring domain.

    lo is the best explicit-map value (Moebius witness; the circle-slit exact
    value when it applies).  hi is the largest directional upper bound over
    all boundary continua, since S is the maximum of the directional values.
    For ring domains the exact value (with its grid error) tightens both ends.
    """
    z = complex(z)
    if not bool(domain.contains(np.array([z]))[0]):
        raise DomainError("z must be an interior point")
    certs = []
    warn = []
    lo = 0.0
    witness = []
    try:
        mob = mobius_lower_bound(domain, z)
        certs.append(("moebius_lower", mob))
        lo = mob
        witness.append({"kind": "moebius", "a": [z.real, z.imag]})
    except PreconditionError:
        pass
    circle_value = None
    if isinstance(domain, SlitDiskDomain) and z == 0 and domain.slits and _common_radius(domain) is not None:
        circle_value = _common_radius(domain)
        certs.append(("circle_slit_exact_toward_unit_circle", circle_value))
        if circle_value > lo:
            lo = circle_value
            witness = [{"kind": "identity", "direction": "unit_circle"}]
    separating_curves = dict(separating_curves or {})
    cont = domain.continua()
    hi = 0.0
    hi_from = None
    per = []
    exact = None
    if isinstance(domain, RingDomain):
        exact = squeeze_doubly_connected(domain, z, resolution=max(resolution, 256))
        err = dict(exact.certificates).get("error_estimate", 0.0)
        certs.append(("exact_doubly_connected", exact.lo))
    for k in range(len(cont)):
        outer_idx = len(cont) - 1 if isinstance(domain, SlitDiskDomain) else 0
        if k == outer_idx and circle_value is not None:
            b = circle_value
            per.append({"continuum": k, "bound": b, "source": "circle_slit_exact"})
        else:
            curves = separating_curves.get(k)
            if curves is None:
                curves = _auto_curves(domain, k, z)
            elif not isinstance(curves, (list, tuple)):
                curves = [curves]
            b = None
            for c in curves:
                try:
                    v = directional_squeeze_upper_bound(domain, k, z, c, resolution)
                except (TopologyError, RefinementError, DomainError) as exc:
                    warn.append(f"continuum {k}: curve rejected ({exc})")
                    continue
                b = v if b is None else min(b, v)
            if b is None:
                b = 1.0
                warn.append(f"continuum {k}: no valid separating curve; upper bound 1")
            per.append({"continuum": k, "bound": b, "source": "groetzsch"})
        if b > hi:
            hi, hi_from = b, k
    certs.append(("directional_upper_bounds", per))
    certs.append(("upper_bound_attained_by_continuum", hi_from))
    generic = (lo, hi)
    certs.append(("generic_interval", list(generic)))
    if exact is not None:
        # the exact value and its grid error replace the generic bounds
        lo, hi = max(exact.lo - err, 1e-300), min(exact.lo + err, 1.0)
        witness = exact.witness
    if lo <= 0:
        lo = min(hi, 1e-300)
    if warn:
        for w in warn:
            warnings.warn(w, stacklevel=2)
    return SqueezeReport("interval", lo, max(hi, lo), witness, certs, warn)


def _auto_curves(domain, k, z):
    cont = domain.continua()
    outer_idx = len(cont) - 1 if isinstance(domain, SlitDiskDomain) else 0
    if k == outer_idx:
        if isinstance(domain, SlitDiskDomain) or domain.outer == UNIT_CIRCLE:
            others = [c.samples(512) for j, c in enumerate(cont) if j != outer_idx]
            reach = max([abs(complex(z))] + [float(np.max(np.abs(s))) for s in others])
            if reach < 1:
                return [Circle(0j, reach + 0.5 * (1 - reach) * f) for f in (1e-6, 0.1, 0.3)]
        return []
    return _circle_candidates(domain, k, z)


# -------------------------------------------------------------- equilibrium


def equilibrium_annulus(r: float) -> float:
    """Radius sqrt(r) where the two directional values a and r/a of A(r, 1) coincide."""
    r = float(r)
    if not (0.0 < r < 1.0):
        raise DomainError("r must lie in (0, 1)")
    root = brentq(lambda a: a - r / a, r, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if not math.isclose(root, math.sqrt(r), rel_tol=1e-12):
        raise DomainError("crossing check failed")
    return math.sqrt(r)


# -------------------------------------------------------------- monotonicity


@dataclass
class MonotonicityProbe:
    inner_value: tuple  # value or interval on the smaller domain
    outer_value: tuple  # value or interval on the larger domain
    status: str  # confirmed, refuted, inconclusive

    def to_json(self):
        return {"smaller_domain": list(self.inner_value), "larger_domain": list(self.outer_value),
                "status": self.status}


def _contained(small, big, samples=20000, seed=0):
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = small.bbox()
    pts = rng.uniform(x0, x1, samples) + 1j * rng.uniform(y0, y1, samples)
    inside_small = small.contains(pts)
    ok = np.all(big.contains(pts[inside_small]))
    for c in big.continua():
        if not getattr(c, "closed", False) or c is UNIT_CIRCLE:
            ok = ok and not np.any(small.contains(c.samples(256)))
    return bool(ok)


def _directional_interval(domain, direction, z):
    if isinstance(domain, RingDomain):
        res = slit_radii(domain, z)
        v = res.r_toward_inner if direction == "inner" else res.r_toward_outer
        return v, v
    if isinstance(domain, SlitDiskDomain) and direction in ("outer", "unit_circle"):
        lo = mobius_lower_bound(domain, z)
        k = len(domain.continua()) - 1
        if complex(z) == 0 and _common_radius(domain) is not None:
            r = _common_radius(domain)
            return r, r
        curves = _auto_curves(domain, k, z)
        hi = min([directional_squeeze_upper_bound(domain, k, z, c) for c in curves] or [1.0])
        return lo, hi
    return None


def monotonicity_probe(smaller, larger, z, direction: str = "inner") -> MonotonicityProbe:
    """Compare directional values on nested domains (smaller inside larger).

    The strict ordering value(smaller) > value(larger) is confirmed when the
    intervals are disjoint in that order, refuted when disjoint the other
    way, and inconclusive otherwise.
    """
    if smaller == larger:
        raise PreconditionError("the two domains must differ")
    if not _contained(smaller, larger):
        raise PreconditionError("the first domain is not contained in the second")
    a = _directional_interval(smaller, direction, z)
    b = _directional_interval(larger, direction, z)
    if a is None or b is None:
        return MonotonicityProbe((math.nan, math.nan), (math.nan, math.nan), "inconclusive")
    if a[0] > b[1]:
        status = "confirmed"
    elif a[1] < b[0]:
        status = "refuted"
    else:
        status = "inconclusive"
    return MonotonicityProbe(a, b, status)


# ------------------------------------------------------------ slit-disk certificate


@dataclass
class SlitCertificateTrial:
    alpha: float
    eps_max: float
    eps_in: float
    modulus_value: float
    modulus_coarse: float
    modulus_extrapolated: float
    resolution: int
    modulus_certified: float
    modulus_total: float
    bound: float
    qualifies: bool

    def recompute(self):
        """Recompute the bound from the stored raw moduli."""
        if not math.isfinite(self.eps_in):
            return float("nan"), float("nan"), 1.0
        vals = [self.modulus_value, self.modulus_coarse, self.modulus_extrapolated]
        m_cert = min(vals) - abs(self.modulus_value - self.modulus_coarse)
        m_tot = m_cert + math.log(self.eps_max / self.eps_in) / TWO_PI
        return m_cert, m_tot, groetzsch_bound(m_tot)

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class SlitDiskCertificate:
    n: int
    r: float
    margin: float
    alpha_star: float | None
    trials: list
    conclusive: bool
    conclusion: str

    def revalidate(self, tol: float = 1e-12) -> bool:
        """Re-check every stored trial and the alpha_star claim from raw moduli."""
        for t in self.trials:
            m_cert, m_tot, bound = t.recompute()
            if not math.isclose(bound, t.bound, rel_tol=0, abs_tol=tol):
                return False
            if (bound <= self.r - self.margin) != t.qualifies:
                return False
        if self.alpha_star is None:
            return not self.conclusive
        below = [t for t in self.trials if t.alpha <= self.alpha_star]
        return bool(below) and all(t.qualifies for t in below)

    @property
    def best_margin(self):
        q = [t for t in self.trials if self.alpha_star is not None and math.isclose(t.alpha, self.alpha_star)]
        return self.r - q[0].bound if q else float("nan")

    def to_json(self):
        return {"n": self.n, "r": self.r, "margin": self.margin, "alpha_star": self.alpha_star,
                "conclusive": self.conclusive, "conclusion": self.conclusion,
                "trials": [t.to_json() for t in self.trials]}


def _certificate_trial(n, r, alpha, margin, resolution, multipliers=(2.0, 4.0, 8.0)):
    dom = build_symmetric_slit_disk(n, r, alpha)
    gamma = dom.slits[0].curve()
    c = complex(r)
    reach = 2.0 * r * math.sin(0.5 * alpha)
    others = [s.curve().samples(512) for s in dom.slits[1:]]
    limit = min([r, 1.0 - r] + [float(np.min(np.abs(o - c))) for o in others])
    eps_max = 0.95 * limit
    best = None
    for k in multipliers:
        eps_in = min(k * reach, eps_max)
        if eps_in <= reach * 1.01:
            continue
        ring = RingDomain(Circle(c, eps_in), gamma)
        cond = rasterize(ring, resolution=resolution, grid_kind="cartesian")
        mr = ring_modulus(cond)
        trial = SlitCertificateTrial(alpha, eps_max, eps_in, mr.value, mr.coarse_value, mr.extrapolated, resolution,
                              0.0, 0.0, 1.0, False)
        m_cert, m_tot, bound = trial.recompute()
        trial.modulus_certified, trial.modulus_total, trial.bound = m_cert, m_tot, bound
        trial.qualifies = bound <= r - margin
        if best is None or trial.bound < best.bound:
            best = trial
        if eps_in >= eps_max:
            break
    if best is None:
        # no circle about the slit fits: the trial cannot qualify
        nan = float("nan")
        best = SlitCertificateTrial(alpha, eps_max, nan, nan, nan, nan, resolution, nan, nan, 1.0, False)
    return best


def verify_theorem3(n: int, r: float, margin: float = 0.05, alpha_floor: float = 1e-4,
                    resolution: int = 256, iterations: int = 12):
    """Largest alpha (found by bisection in log alpha) for which the slit bound beats r - margin.

    Returns ``(alpha_star, certificate)``; alpha_star is None and the
    certificate is marked inconclusive when even alpha_floor fails.
    """
    if int(n) != n or n < 3:
        raise PreconditionError("n must be an integer >= 3 (n = 2 is the doubly connected case)")
    if not (0.0 < r < 1.0):
        raise DomainError("r must lie in (0, 1)")
    trials = []
    floor = _certificate_trial(n, r, alpha_floor, margin, resolution)
    trials.append(floor)
    if not floor.qualifies:
        cert = SlitDiskCertificate(n, r, margin, None, trials, False,
                                   f"inconclusive: bound {floor.bound:.6g} > {r - margin:.6g} at the alpha floor")
        return None, cert
    # beyond this size no circle about the slit can enclose it with room to spare
    geo = 2.0 * math.asin(min(1.0, 0.95 * min(r, 1.0 - r) / (4.0 * r)))
    top_alpha = min(0.99 * math.pi / (n - 1), geo)
    top = _certificate_trial(n, r, top_alpha, margin, resolution)
    trials.append(top)
    if top.qualifies:
        alpha_star = top_alpha
    else:
        lo, hi = math.log(alpha_floor), math.log(top_alpha)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            t = _certificate_trial(n, r, math.exp(mid), margin, resolution)
            trials.append(t)
            if t.qualifies:
                lo = mid
            else:
                hi = mid
        alpha_star = _largest_monotone_alpha(trials)
    trials.sort(key=lambda t: t.alpha)
    cert = SlitDiskCertificate(
        n, r, margin, alpha_star, trials, True,
        f"for alpha <= {alpha_star:.6g} every slit-direction bound is <= {r - margin:.6g} < r = {r}, while the "
        f"unit-circle direction has the exact value r; hence S(0) = {r} with the identity map as the "
        "extremal map, unique up to rotation")
    if not cert.revalidate():
        raise DomainError("certificate failed re-validation")
    return alpha_star, cert


def _largest_monotone_alpha(trials):
    best = None
    for t in sorted(trials, key=lambda t: t.alpha):
        if not t.qualifies:
            break
        best = t.alpha
    return best
