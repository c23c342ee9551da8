"""Extremal partitions of the disk minus a barrier set.

A candidate splits the unit disk along a star-shaped curve about 0: D1 is
the inside (containing 0), D2 the ring between the curve and the unit circle.
The objective is alpha1^2 m(D1, 0) + alpha2^2 m(D2), maximized by a
Nelder-Mead search over the curve's Fourier coefficients.

Barrier arcs that the curve neither crosses nor touches are handled by
relaxation: an arc strictly inside the curve is an extra Dirichlet boundary
of D1, an arc strictly outside joins D2's inner plate.  Such evaluations are
flagged in the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .domains.model import UNIT_CIRCLE, CircularArcSlit
from .domains.raster import log_polar_chart, rasterize_pieces, rasterize_pointed
from .domains.shapes import TWO_PI, RegionPiece, SlitPiece, StarCurve
from .errors import AdmissibilityError, DegenerateCondenserError, DomainError, InitializationError
from .modulus import ModulusResult, ReducedModuleResult, reduced_module, ring_modulus

TOUCH_TOL = 1e-6


@dataclass(frozen=True)
class BarrierSet:
    arcs: tuple
    r1: float
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if not (0.0 < self.r1 <= self.r2 < 1.0):
            raise DomainError("need 0 < r1 <= r2 < 1")
        if not self.arcs:
            raise DomainError("barrier set needs at least one arc")
        for a in self.arcs:
            if not (self.r1 - 1e-12 <= a.radius <= self.r2 + 1e-12):
                raise DomainError(f"arc radius {a.radius} outside [{self.r1}, {self.r2}]")

    @property
    def enclosing_radii(self):
        return (self.r1, self.r2)

    def to_json(self):
        return {"arcs": [a.to_json() for a in self.arcs], "enclosing_radii": [self.r1, self.r2]}

    @classmethod
    def from_json(cls, obj):
        r1, r2 = obj["enclosing_radii"]
        return cls(tuple(CircularArcSlit.from_json(a) for a in obj["arcs"]), float(r1), float(r2))


@dataclass(frozen=True)
class PartitionCandidate:
    c0: float
    fourier: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "fourier", tuple((float(a), float(b)) for a, b in self.fourier))

    @property
    def curve(self):
        return StarCurve(self.c0, self.fourier)

    @property
    def harmonics(self):
        return len(self.fourier)

    def to_vector(self):
        return np.array([self.c0] + [a for a, _ in self.fourier] + [b for _, b in self.fourier])

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        k = (x.size - 1) // 2
        return cls(float(x[0]), tuple(zip(x[1:1 + k], x[1 + k:1 + 2 * k])))

    def to_json(self):
        return {"c0": self.c0, "fourier": [list(p) for p in self.fourier]}


@dataclass
class PartitionResult:
    candidate: PartitionCandidate
    m1: ReducedModuleResult
    m2: ModulusResult
    alpha1: float
    alpha2: float
    max_radius: float
    min_radius: float
    flags: tuple = ()
    diagnostics: dict = field(default_factory=dict)
    objective: float = field(init=False)

    def __post_init__(self):
        self.objective = self.alpha1 ** 2 * self.m1.value + self.alpha2 ** 2 * self.m2.value

    def recompute_objective(self):
        return self.alpha1 ** 2 * self.m1.value + self.alpha2 ** 2 * self.m2.value

    def to_json(self):
        return {"objective": self.objective, "candidate": self.candidate.to_json(),
                "m1": self.m1.to_json(), "m2": self.m2.to_json(), "alpha1": self.alpha1,
                "alpha2": self.alpha2, "max_radius": self.max_radius, "min_radius": self.min_radius,
                "flags": list(self.flags), "family": "star-shaped curves about 0 (polar Fourier graphs)",
                "diagnostics": self.diagnostics}


def classify_arcs(barrier: BarrierSet, curve: StarCurve, samples: int = 2048):
    """Position of every arc relative to the curve: 'inside', 'outside', 'touching'.

    Raises :class:`AdmissibilityError` when an arc crosses the curve.
    """
    out = []
    for k, arc in enumerate(barrier.arcs):
        t = arc.center_angle + np.linspace(-arc.half_width, arc.half_width, samples)
        d = arc.radius - curve.radius(t)
        tol = TOUCH_TOL * arc.radius
        if d.max() > tol and d.min() < -tol:
            raise AdmissibilityError(f"curve crosses barrier arc {k}")
        if d.max() <= tol and d.min() >= -tol:
            out.append("touching")
        elif d.max() <= tol:
            out.append("inside" if d.max() < -tol else "touching_inside")
        else:
            out.append("outside" if d.min() > tol else "touching_outside")
    return out


def partition_objective(barrier: BarrierSet, candidate: PartitionCandidate, alpha1: float, alpha2: float,
                        resolution: int = 128, richardson: bool = False) -> PartitionResult:
    """Evaluate alpha1^2 m(D1, 0) + alpha2^2 m(D2) for one candidate curve."""
    if alpha1 < 0 or alpha2 < 0 or (alpha1 == 0 and alpha2 == 0):
        raise DomainError("weights must be non-negative with at least one positive")
    curve = candidate.curve
    rmin, rmax = curve.radial_extent()
    if not rmax < 1.0:
        raise AdmissibilityError("curve leaves the unit disk")
    where = classify_arcs(barrier, curve)
    d1_arcs = [a for a, w in zip(barrier.arcs, where) if w in ("inside", "touching", "touching_inside")]
    d2_arcs = [a for a, w in zip(barrier.arcs, where) if w in ("outside", "touching", "touching_outside")]
    flags = []
    if "inside" in where:
        flags.append("relaxed: barrier arc floating inside D1 treated as Dirichlet boundary")
    if "outside" in where:
        flags.append("relaxed: barrier arc floating inside D2 attached to its inner plate")

    p1 = [RegionPiece(curve, interior=False)] + [SlitPiece(a.curve()) for a in d1_arcs]
    c1 = rasterize_pointed(p1, curve.bbox(), 0j, resolution)
    m1 = reduced_module(c1, 0j, richardson=richardson, check_topology="inside" not in where)

    outer = [RegionPiece(UNIT_CIRCLE, interior=False)]
    inner = [RegionPiece(curve, interior=True)] + [SlitPiece(a.curve()) for a in d2_arcs]

    def build(res):
        chart = log_polar_chart(rmin * (1 - 1e-6), 1.0, res)
        return rasterize_pieces(outer, inner, chart, res, source=build)

    m2 = ring_modulus(build(resolution), richardson=richardson, strict=False)
    return PartitionResult(candidate, m1, m2, float(alpha1), float(alpha2), rmax, rmin, tuple(flags),
                           {"arc_positions": where, "resolution": resolution})


def optimize_partition(barrier: BarrierSet, alpha1: float, alpha2: float, harmonics: int = 4,
                       resolution: int = 128, max_evals: int | None = None, seed: int = 0,
                       init: PartitionCandidate | None = None) -> PartitionResult:
    """Nelder-Mead search over (c0, a_1..a_K, b_1..b_K); infeasible candidates score -inf.

    Starts from the circle r = sqrt(r1 r2).  The best feasible evaluation
    ever seen is returned (not just the final simplex vertex), together with
    the objective history and final simplex diameter.
    """
    if not (0 <= harmonics <= 8):
        raise DomainError("harmonics must lie in 0..8")
    if init is None:
        init = PartitionCandidate(0.5 * math.log(barrier.r1 * barrier.r2), ((0.0, 0.0),) * harmonics)
    x0 = init.to_vector()
    dim = x0.size
    try:
        best = partition_objective(barrier, init, alpha1, alpha2, resolution)
    except AdmissibilityError as exc:
        raise InitializationError(f"initial candidate is infeasible: {exc}") from exc
    initial_objective = best.objective
    history = [best.objective]
    evaluated = {"feasible": 1, "infeasible": 0}

    def f(x):
        nonlocal best
        cand = PartitionCandidate.from_vector(x)
        try:
            res = partition_objective(barrier, cand, alpha1, alpha2, resolution)
        except (AdmissibilityError, DegenerateCondenserError):
            # plates within one cell of each other are rejected like crossings
            evaluated["infeasible"] += 1
            return math.inf
        evaluated["feasible"] += 1
        history.append(res.objective)
        if res.objective > best.objective:
            best = res
        return -res.objective

    steps = np.array([0.05] + [0.02] * (dim - 1))
    simplex = np.vstack([x0] + [x0 + np.eye(dim)[i] * steps[i] for i in range(dim)])
    if max_evals is None:
        max_evals = 60 * dim
    opt = minimize(f, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": max_evals, "xatol": 1e-4, "fatol": 1e-7})
    sim = opt.final_simplex[0]
    diameter = float(max(np.linalg.norm(a - b) for a in sim for b in sim))
    best.diagnostics.update({"initial_objective": initial_objective, "objective_history": history,
                             "simplex_diameter": diameter, "evaluations": dict(evaluated),
                             "optimizer_message": str(opt.message), "seed": seed,
                             "family": "star-shaped curves about 0"})
    return best


def check_free_boundary_location(result: PartitionResult, barrier: BarrierSet, alpha1: float, alpha2: float,
                                 tolerance: float = 0.02) -> dict:
    """Check the radial envelope of the free boundary against the barrier's annulus.

    alpha1 <= alpha2: the curve stays within radius r2; alpha1 >= alpha2: it
    stays outside radius r1; equal weights: both.
    """
    r1, r2 = barrier.r1, barrier.r2
    checks = []
    if alpha1 <= alpha2:
        checks.append({"case": "a", "claim": f"max_radius <= r2 + tol = {r2 + tolerance}",
                       "observed": result.max_radius, "slack": r2 + tolerance - result.max_radius})
    if alpha1 >= alpha2:
        checks.append({"case": "b", "claim": f"min_radius >= r1 - tol = {r1 - tolerance}",
                       "observed": result.min_radius, "slack": result.min_radius - (r1 - tolerance)})
    case = "c" if alpha1 == alpha2 else checks[0]["case"]
    return {"case": case, "checks": checks, "passed": all(c["slack"] >= 0 for c in checks),
            "r1": r1, "r2": r2, "tolerance": tolerance}


def standard_barrier_sets(seed: int = 7):
    """Five barrier sets inside the closed annulus 0.4 <= |z| <= 0.6."""
    rng = np.random.default_rng(seed)
    sets = [
        (CircularArcSlit(0.5, 0.0, math.pi / 2),),
        (CircularArcSlit(0.45, 0.0, 1.0), CircularArcSlit(0.55, math.pi, 1.0)),
        (CircularArcSlit(0.4, 0.0, 0.8), CircularArcSlit(0.5, TWO_PI / 3, 0.8), CircularArcSlit(0.6, 2 * TWO_PI / 3, 0.8)),
        (CircularArcSlit(0.6, 0.0, 1.2), CircularArcSlit(0.4, math.pi, 1.0)),
    ]
    rnd = []
    for k in range(4):
        rnd.append(CircularArcSlit(float(rng.uniform(0.4, 0.6)), k * math.pi / 2 + float(rng.uniform(-0.3, 0.3)),
                                   float(rng.uniform(0.2, 0.5))))
    sets.append(tuple(rnd))
    return [BarrierSet(s, 0.4, 0.6) for s in sets]
