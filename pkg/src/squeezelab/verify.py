"""Named verification suites shared by the CLI and the acceptance tests.

Every check records the raw numbers of its inequality so a failure can be
reproduced by hand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import reich_warschawski_check
from .domains.model import UNIT_CIRCLE, MoebiusDiskAutomorphism, RingDomain, apply_moebius
from .domains.shapes import TWO_PI, Circle, Segment
from .modulus import (arc_measure_data, capacity, mapped_arc_measure, partition_arc_measures, polarize,
                      random_label_condenser)
from .numerics import groetzsch_mu, prime_product
from .partition import check_free_boundary_location, optimize_partition, standard_barrier_sets
from .squeezing import equilibrium_annulus, squeeze_doubly_connected, verify_theorem3


@dataclass
class Check:
    name: str
    lhs: float
    op: str
    rhs: float
    passed: bool

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.lhs!r} {self.op} {self.rhs!r}"

    def to_json(self):
        return {"name": self.name, "lhs": self.lhs, "op": self.op, "rhs": self.rhs, "passed": self.passed}


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def le(self, name, lhs, rhs):
        c = Check(name, float(lhs), "<=", float(rhs), bool(lhs <= rhs))
        self.checks.append(c)
        return c

    def lt(self, name, lhs, rhs):
        c = Check(name, float(lhs), "<", float(rhs), bool(lhs < rhs))
        self.checks.append(c)
        return c

    def ge(self, name, lhs, rhs):
        c = Check(name, float(lhs), ">=", float(rhs), bool(lhs >= rhs))
        self.checks.append(c)
        return c

    def to_json(self):
        return {"suite": self.name, "passed": self.passed, "checks": [c.to_json() for c in self.checks],
                "info": self.info}


def suite_slit_map(q: float = 0.1, a: float = 0.4, samples: int = 256, truncation: int = 30) -> SuiteResult:
    """Slit radius equals the marked point's modulus, certified on both circles."""
    s = SuiteResult("rw")
    rep = reich_warschawski_check(q, a, samples, truncation)
    s.info = rep
    s.lt("max | |f(q e^it)| - a |", rep["inner_deviation"], 1e-8)
    s.lt("max | |f(e^it)| - 1 |", rep["outer_deviation"], 1e-10)
    s.lt("|f(a)|", rep["zero_residual"], 1e-10)
    return s


def distorted_annulus(r: float = 0.25, a: complex = 0.2 + 0.1j):
    t = MoebiusDiskAutomorphism(a)
    return t, t.image_of_ring(RingDomain.annulus(r))


def suite_ring_squeeze(r: float = 0.25, resolution: int = 256, moebius_a: complex = 0.2 + 0.1j) -> SuiteResult:
    """S(a) = max(a, r/a) on A(r, 1): closed forms and the grid pipeline on a distorted copy."""
    s = SuiteResult("thm1")
    ann = RingDomain.annulus(r)
    t, dist = distorted_annulus(r, moebius_a)
    points = [round(0.3 + 0.1 * k, 10) for k in range(7)]
    worst_a = worst_g = 0.0
    for a in points:
        exact = max(a, r / a)
        v = squeeze_doubly_connected(ann, a).lo
        worst_a = max(worst_a, abs(v - exact))
        zg = apply_moebius(t, a * np.exp(0.7j))
        g = squeeze_doubly_connected(dist, zg, resolution=resolution, method="grid").lo
        worst_g = max(worst_g, abs(g - exact))
        s.info[f"a={a}"] = {"exact": exact, "analytic": v, "grid": g}
    s.lt("max |S_analytic - max(a, r/a)|", worst_a, 1e-6)
    s.lt("max |S_grid(moebius image) - max(a, r/a)|", worst_g, 1e-3)
    eq = equilibrium_annulus(r)
    s.lt("|equilibrium radius - sqrt(r)|", abs(eq - math.sqrt(r)), 1e-6)
    return s


def suite_free_boundary(sets: int = 5, harmonics: int = 2, resolution: int = 128, tolerance: float = 0.02) -> SuiteResult:
    """Free-boundary location: max radius <= r2 + tol for alpha1 < alpha2, min radius >= r1 - tol otherwise."""
    s = SuiteResult("thm2")
    for k, barrier in enumerate(standard_barrier_sets()[:sets]):
        for a1, a2 in ((1.0, 2.0), (2.0, 1.0)):
            res = optimize_partition(barrier, a1, a2, harmonics=harmonics, resolution=resolution)
            chk = check_free_boundary_location(res, barrier, a1, a2, tolerance)
            for c in chk["checks"]:
                if c["case"] == "a":
                    s.le(f"set {k} case a: max_radius", res.max_radius, barrier.r2 + tolerance)
                else:
                    s.ge(f"set {k} case b: min_radius", res.min_radius, barrier.r1 - tolerance)
            s.info[f"set {k} ({a1}, {a2})"] = {"objective": res.objective, "min_radius": res.min_radius,
                                               "max_radius": res.max_radius, "flags": list(res.flags)}
    return s


def suite_slit_certificate(n: int = 3, r: float = 0.5, margin: float = 0.05, resolution: int = 256) -> SuiteResult:
    """Slit-direction Groetzsch bounds beat r for small alpha; certificate re-validates."""
    s = SuiteResult("thm3")
    alpha_star, cert = verify_theorem3(n, r, margin=margin, resolution=resolution)
    s.info = cert.to_json()
    if alpha_star is None:
        s.ge("alpha_star (inconclusive)", float("nan"), 1e-3)
        return s
    trial = [t for t in cert.trials if t.alpha == alpha_star][0]
    s.ge("alpha_star", alpha_star, 1e-3)
    s.le("mu^-1(2 pi M) at alpha_star", trial.bound, r - margin)
    s.ge("certificate re-validates (1 = yes)", 1.0 if cert.revalidate() else 0.0, 1.0)
    return s


def suite_polarization(trials: int = 100, seed: int = 0, resolution: int = 64) -> SuiteResult:
    """Polarization never increases capacity on random node-set condensers."""
    s = SuiteResult("polarization")
    rng = np.random.default_rng(seed)
    worst = -math.inf
    worst_pair = None
    strict = 0
    for _ in range(trials):
        c = random_label_condenser(rng, resolution)
        t = float(np.exp(rng.uniform(math.log(0.15), math.log(0.9))))
        p = polarize(c, t)
        a, b = capacity(c), capacity(p)
        if b - a > worst:
            worst, worst_pair = b - a, (a, b, t)
        strict += b < a - 1e-9
    s.info = {"trials": trials, "seed": seed, "strict_decreases": int(strict),
              "worst": {"capacity": worst_pair[0], "polarized": worst_pair[1], "t": worst_pair[2]}}
    s.le("max over trials of capacity(polarized) - capacity(original)", worst, 1e-12)
    return s


def radial_slit_ring(r: float = 0.3, slit_length: float = 0.2):
    return RingDomain(UNIT_CIRCLE, Circle(0j, r), (Segment(-1.0 + 0j, complex(-1.0 + slit_length, 0.0)),))


def suite_arc_measure(resolution: int = 256, arcs: int = 8, seed: int = 0) -> SuiteResult:
    """Image arcs are no longer than the arcs themselves; a full partition adds up to 2 pi."""
    s = SuiteResult("lemma2")
    dom = radial_slit_ring()
    data = arc_measure_data(dom, resolution)
    coarse = arc_measure_data(dom, resolution // 2)
    rng = np.random.default_rng(seed)
    sigmas = [(math.pi, math.pi / 4), (0.0, math.pi / 4)]
    while len(sigmas) < arcs:
        sigmas.append((float(rng.uniform(0, TWO_PI)), float(rng.uniform(0.1, 1.5))))
    for c, hw in sigmas:
        m = mapped_arc_measure(dom, (c, hw), data=data)
        mc = mapped_arc_measure(dom, (c, hw), data=coarse)
        tol = abs(m - mc) + 1e-9
        s.le(f"meas(f(sigma)) for sigma = ({c:.4f} +- {hw:.4f}) vs meas(sigma) + grid tol", m, 2 * hw + tol)
    breaks = np.sort(rng.uniform(0, TWO_PI, arcs))
    parts = partition_arc_measures(dom, breaks, data=data)
    s.le("|sum over partition - 2 pi| / 2 pi", abs(parts.sum() - TWO_PI) / TWO_PI, 0.01)
    s.info = {"modulus": data.modulus, "partition": parts.tolist(), "breakpoints": breaks.tolist()}
    return s


def suite_special(samples: int = 100, seed: int = 0) -> SuiteResult:
    """mu(r) mu(r') = pi^2/4 and the prime-product functional equation within its certified bound."""
    s = SuiteResult("special")
    rng = np.random.default_rng(seed)
    rs = rng.uniform(0.001, 0.999, samples)
    worst = max(abs(groetzsch_mu(r) * groetzsch_mu(math.sqrt(1 - r * r)) - math.pi ** 2 / 4) for r in rs)
    s.lt("max |mu(r) mu(r') - pi^2/4|", worst, 1e-10)
    excess = -math.inf
    for _ in range(samples):
        q = float(rng.uniform(0.01, 0.5))
        w = complex(*rng.uniform(-1, 1, 2))
        while not (q < abs(w) < 1):
            w = complex(*rng.uniform(-1, 1, 2))
        p1, e1 = prime_product(q * q * w, q)
        p0, e0 = prime_product(w, q)
        gap = abs(p1 + p0 / w) - (e1 + e0 / abs(w))
        excess = max(excess, gap)
    s.le("max (|P(q^2 w) + P(w)/w| - certified bound)", excess, 0.0)
    return s


SUITES = {"rw": suite_slit_map, "thm1": suite_ring_squeeze, "thm2": suite_free_boundary,
          "thm3": suite_slit_certificate, "polarization": suite_polarization, "lemma2": suite_arc_measure,
          "special": suite_special}
