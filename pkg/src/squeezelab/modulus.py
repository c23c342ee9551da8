"""Capacities and moduli of grid condensers.

The discrete problem is the symmetric cut-cell five-point Laplacian: a link
from a field node that meets a plate after a fraction t of its length gets
weight 1/t and the Dirichlet value at the crossing.  Both charts are
conformal with square cells, so every uncut link has weight 1 and the
discrete Dirichlet energy approximates the (conformally invariant) Dirichlet
integral directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .domains.model import RingDomain
from .domains.raster import (EXCLUDED, FIELD, PLATE0, PLATE1, Chart, GridCondenser,
                             _classify_components, check_connected_field, log_polar_chart,
                             rasterize_pieces)
from .domains.shapes import TWO_PI, ArcCurve, Circle, angle_offset
from .errors import DegenerateCondenserError, DomainError, GridExtentError, PreconditionError, TopologyError
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, solve_spd


@dataclass(frozen=True)
class ModulusResult:
    """Modulus of a ring condenser.

    ``value`` is the fine-grid modulus 1/capacity; ``extrapolated`` is the
    Richardson value from the fine and half-resolution grids, and
    ``error_estimate`` is their difference.
    """

    value: float
    error_estimate: float
    resolution_used: int
    extrapolated: float = float("nan")
    coarse_value: float = float("nan")
    capacity: float = float("nan")

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError("modulus must be positive")
        if not self.error_estimate >= 0:
            raise DomainError("error estimate must be non-negative")

    @property
    def best(self):
        """Extrapolated value when available, otherwise the fine value."""
        return self.extrapolated if math.isfinite(self.extrapolated) else self.value

    @property
    def certified_lower(self):
        """Conservative lower estimate: smallest of the three values minus the two-grid gap."""
        vals = [self.value]
        gap = 0.0
        if math.isfinite(self.coarse_value):
            vals += [self.coarse_value, self.extrapolated]
            gap = abs(self.value - self.coarse_value)
        return min(vals) - gap

    def to_json(self):
        return {"value": self.value, "error_estimate": self.error_estimate,
                "resolution_used": self.resolution_used, "extrapolated": self.extrapolated,
                "coarse_value": self.coarse_value, "capacity": self.capacity}


@dataclass(frozen=True)
class ReducedModuleResult:
    value: float
    conformal_radius: float
    error_estimate: float = 0.0
    resolution_used: int = 0

    def __post_init__(self):
        if not self.conformal_radius > 0:
            raise DomainError("conformal radius must be positive")
        expected = math.log(self.conformal_radius) / TWO_PI
        if not math.isclose(self.value, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError("reduced module must equal log(conformal radius) / (2 pi)")

    @classmethod
    def from_radius(cls, radius, error_estimate=0.0, resolution_used=0):
        return cls(math.log(radius) / TWO_PI, float(radius), error_estimate, resolution_used)

    def to_json(self):
        return {"value": self.value, "conformal_radius": self.conformal_radius,
                "error_estimate": self.error_estimate, "resolution_used": self.resolution_used}


@dataclass
class Potential:
    """Solved discrete potential on a condenser."""

    condenser: GridCondenser
    values: np.ndarray
    energy: float
    flux: tuple  # flux into plate0 and out of plate1
    link_flux: np.ndarray = field(repr=False, default=None)

    def at(self, z):
        return interpolate(self.condenser, self.values, z)


# ------------------------------------------------------------------ assembly


def _boundary_values(cond, plate_values, boundary_fn, d, mask):
    if boundary_fn is not None:
        return boundary_fn(cond.cut_z[d][mask], cond.cut_plate[d][mask])
    pv = np.asarray(plate_values, dtype=float)
    return pv[cond.cut_plate[d][mask]]


def solve_potential(cond: GridCondenser, plate_values=(0.0, 1.0), boundary_fn=None,
                    tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Potential:
    """Solve the Dirichlet problem on the field nodes.

    Plates carry ``plate_values`` (or, when ``boundary_fn(z, plate)`` is
    given, the values it returns at the crossing points).  Returns the
    potential on all nodes, its discrete Dirichlet energy, and the fluxes
    into plate0 and out of plate1.
    """
    labels = cond.labels
    fmask = labels == FIELD
    nf = int(fmask.sum())
    if nf == 0:
        raise TopologyError("condenser has no field nodes")
    index = np.full(labels.shape, -1, dtype=np.int64)
    index[fmask] = np.arange(nf)
    diag = np.zeros(nf)
    rhs = np.zeros(nf)
    rows, cols = [], []
    cut_data = []
    for d in range(4):
        qi, qj, valid = cond.neighbor(d)
        frac = cond.cut_frac[d]
        cut = fmask & np.isfinite(frac)
        w = 1.0 / frac[cut]
        g = _boundary_values(cond, plate_values, boundary_fn, d, cut)
        ic = index[cut]
        np.add.at(diag, ic, w)
        np.add.at(rhs, ic, w * g)
        cut_data.append((d, cut, w, g))
        unc = fmask & ~np.isfinite(frac) & valid & (labels[qi, qj] == FIELD)
        ip = index[unc]
        iq = index[qi, qj][unc]
        np.add.at(diag, ip, 1.0)
        rows.append(ip)
        cols.append(iq)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    a = sp.csr_matrix((np.concatenate([-np.ones(r.size), diag]),
                       (np.concatenate([r, np.arange(nf)]), np.concatenate([c, np.arange(nf)]))),
                      shape=(nf, nf))
    x = solve_spd(a, rhs, tol)
    u = _fill_values(cond, x, fmask, plate_values, boundary_fn)
    energy = 0.0
    flux0 = flux1 = 0.0
    link_flux = np.zeros((4,) + labels.shape)
    for d, cut, w, g in cut_data:
        up = u[cut]
        energy += float(np.sum(w * (up - g) ** 2))
        lf = w * (up - g)
        link_flux[d][cut] = lf
        plate = cond.cut_plate[d][cut]
        flux0 += float(np.sum(lf[plate == 0]))
        flux1 -= float(np.sum(lf[plate == 1]))
    for d in (0, 2):
        qi, qj, valid = cond.neighbor(d)
        unc = fmask & ~np.isfinite(cond.cut_frac[d]) & valid & (labels[qi, qj] == FIELD)
        energy += float(np.sum((u[unc] - u[qi, qj][unc]) ** 2))
    return Potential(cond, u, energy, (flux0, flux1), link_flux)


def _fill_values(cond, x, fmask, plate_values, boundary_fn):
    u = np.zeros(cond.labels.shape)
    u[fmask] = x
    if boundary_fn is None:
        u[cond.labels == PLATE0] = plate_values[0]
        u[cond.labels == PLATE1] = plate_values[1]
        exc = cond.meta.get("excluded_plate")
        if exc is not None:
            m = cond.labels == EXCLUDED
            u[m] = np.asarray(plate_values, dtype=float)[np.clip(exc[m], 0, 1)]
    else:
        z = cond.node_z()
        for lab, k in ((PLATE0, 0), (PLATE1, 1)):
            m = cond.labels == lab
            if m.any():
                u[m] = boundary_fn(z[m], np.full(int(m.sum()), k))
        m = cond.labels == EXCLUDED
        if m.any():
            u[m] = np.nan
    return u


def interpolate(cond: GridCondenser, values, z):
    """Bilinear interpolation of node values in chart coordinates."""
    fi, fj = cond.chart.index_of(np.asarray(z, dtype=complex))
    fi = np.asarray(fi, dtype=float)
    fj = np.asarray(fj, dtype=float)
    n0, n1 = cond.shape
    i0 = np.floor(fi).astype(int)
    j0 = np.floor(fj).astype(int)
    if np.any(i0 < 0) or np.any(i0 + 1 >= n0):
        raise GridExtentError("interpolation point lies outside the grid")
    if cond.chart.periodic:
        j0 = np.mod(j0, n1)
        j1 = np.mod(j0 + 1, n1)
        fj = np.mod(fj, n1)
        tj = fj - np.floor(fj)
    else:
        if np.any(j0 < 0) or np.any(j0 + 1 >= n1):
            raise GridExtentError("interpolation point lies outside the grid")
        j1 = j0 + 1
        tj = fj - j0
    ti = fi - i0
    v = ((1 - ti) * (1 - tj) * values[i0, j0] + ti * (1 - tj) * values[i0 + 1, j0]
         + (1 - ti) * tj * values[i0, j1] + ti * tj * values[i0 + 1, j1])
    return float(v) if np.ndim(v) == 0 else v


# ------------------------------------------------------------------- moduli


def capacity(cond: GridCondenser, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Discrete Dirichlet energy of the 0/1 potential."""
    return solve_potential(cond, tol=tol).energy


def ring_modulus(cond: GridCondenser, richardson: bool = True, strict: bool = True,
                 tol: ToleranceConfig = DEFAULT_TOLERANCES) -> ModulusResult:
    """Modulus 1/capacity with a two-grid Richardson estimate.

    The coarse grid is the same condenser rasterized at half resolution
    (skipped when that would drop below 32 or no source is attached).
    """
    if strict:
        check_connected_field(cond)
    cap = capacity(cond, tol)
    m_h = 1.0 / cap
    coarse = ext = float("nan")
    err = float("inf")
    if richardson and cond.source is not None and cond.resolution // 2 >= 32:
        c2 = cond.rebuild(cond.resolution // 2)
        coarse = 1.0 / capacity(c2, tol)
        ext = (4.0 * m_h - coarse) / 3.0
        err = abs(ext - m_h)
    return ModulusResult(m_h, err, cond.resolution, ext, coarse, cap)


def boundary_components(cond: GridCondenser) -> int:
    """Number of boundary pieces visible on the grid.

    Nodes that are not field, or that have a cut link, are grouped with
    8-connectivity; a simply connected field has exactly one such group.
    """
    mask = cond.labels != FIELD
    for d in range(4):
        mask |= np.isfinite(cond.cut_frac[d]) & (cond.labels == FIELD)
    mask = mask.copy()
    lab, n = ndimage.label(mask, structure=np.ones((3, 3)))
    if cond.chart.periodic and n > 1:
        # merge labels across the theta seam
        parent = list(range(n + 1))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(lab.shape[0]):
            for di in (-1, 0, 1):
                k = i + di
                if 0 <= k < lab.shape[0] and lab[i, -1] and lab[k, 0]:
                    parent[find(lab[i, -1])] = find(lab[k, 0])
        n = len({find(v) for v in range(1, n + 1)})
    return int(n)


def reduced_module(cond: GridCondenser, z0=None, richardson: bool = True, check_topology: bool = True,
                   tol: ToleranceConfig = DEFAULT_TOLERANCES) -> ReducedModuleResult:
    """Reduced module (1/2pi) log R of the field domain at ``z0``.

    The regular part h of the Green's function solves the Dirichlet problem
    with data log|zeta - z0| on the boundary, and R = exp(h(z0)).
    """
    z0 = complex(cond.marked_point if z0 is None else z0)
    logr = _log_conformal_radius(cond, z0, check_topology, tol)
    err = 0.0
    if richardson and cond.source is not None and cond.resolution // 2 >= 32:
        c2 = cond.rebuild(cond.resolution // 2)
        logr2 = _log_conformal_radius(c2, z0, False, tol)
        ext = (4.0 * logr - logr2) / 3.0
        err = abs(ext - logr) / TWO_PI
    return ReducedModuleResult.from_radius(math.exp(logr), err, cond.resolution)


def _log_conformal_radius(cond, z0, check_topology, tol):
    fi, fj = cond.chart.index_of(z0)
    i0, j0 = int(math.floor(fi)), int(math.floor(fj))
    n0, n1 = cond.shape
    if not (0 <= i0 < n0 - 1 and 0 <= j0 < n1 - 1):
        raise DomainError("marked point lies outside the grid")
    corners = cond.labels[i0:i0 + 2, j0:j0 + 2]
    if np.any(corners != FIELD):
        raise DomainError("marked point is on or outside the boundary (or within one cell of it)")
    if check_topology and boundary_components(cond) != 1:
        raise TopologyError("field domain is not simply connected")

    def data(z, _plate):
        return np.log(np.abs(z - z0))

    pot = solve_potential(cond, boundary_fn=data, tol=tol)
    return pot.at(z0)


# -------------------------------------------------------- boundary-arc measure


def _arc_bounds(sigma):
    if isinstance(sigma, ArcCurve):
        if sigma.center != 0 or not math.isclose(sigma.radius, 1.0):
            raise DomainError("sigma must be an arc of the unit circle")
        return sigma.center_angle, sigma.half_width
    c, hw = sigma
    if not (0 < hw <= math.pi):
        raise DomainError("arc half-width must lie in (0, pi]")
    return float(c), float(hw)


def _unit_circle_ring_condenser(d1: RingDomain, resolution: int):
    outer = d1.outer
    if not (isinstance(outer, Circle) and outer.center == 0 and math.isclose(outer.radius, 1.0)):
        raise DomainError("the outer boundary of D1 must be the unit circle")
    if not (getattr(d1.inner, "closed", False) and d1.inner.inside(0j)):
        raise PreconditionError("the inner boundary of D1 must be a closed curve around 0")

    def build(res):
        lo = d1.inner.distance_range(0j)[0]
        chart = log_polar_chart(lo, 1.0, res)
        return rasterize_pieces(d1.plate_pieces(0), d1.plate_pieces(1), chart, res, source=build)

    return build(resolution)


def _overlap(theta_nodes, h, c, hw):
    """Length fraction of [theta - h/2, theta + h/2] inside the arc [c - hw, c + hw]."""
    if hw >= math.pi:
        return np.ones_like(theta_nodes)
    off = angle_offset(theta_nodes, c)
    lo = np.maximum(off - 0.5 * h, -hw)
    hi = np.minimum(off + 0.5 * h, hw)
    return np.clip(hi - lo, 0.0, None) / h


@dataclass
class ArcMeasureData:
    modulus: float
    circle_flux: np.ndarray  # per top-row column
    slit_flux: np.ndarray  # per column, flux into attached slits from nodes in that column
    theta: np.ndarray
    h: float
    capacity: float


def arc_measure_data(d1: RingDomain, resolution: int = 256,
                     tol: ToleranceConfig = DEFAULT_TOLERANCES) -> ArcMeasureData:
    """Solve once and tabulate the potential's flux through the unit circle by column."""
    cond = _unit_circle_ring_condenser(d1, resolution)
    check_connected_field(cond)
    pot = solve_potential(cond, tol=tol)
    cap = pot.energy
    n0, n1 = cond.shape
    circle = np.zeros(n1)
    slit = np.zeros(n1)
    for d in range(4):
        m = (cond.labels == FIELD) & (cond.cut_plate[d] == 0)
        if not m.any():
            continue
        on_circle = np.abs(np.abs(cond.cut_z[d]) - 1.0) <= 1e-9
        _, jj = np.nonzero(m)
        lf = pot.link_flux[d][m]
        oc = on_circle[m]
        jc = np.mod(np.rint(np.mod(np.angle(cond.cut_z[d][m]), TWO_PI) / cond.chart.h).astype(int), n1)
        np.add.at(circle, jc[oc], lf[oc])
        np.add.at(slit, jj[~oc], lf[~oc])
    theta = np.arange(n1) * cond.chart.h
    return ArcMeasureData(1.0 / cap, circle, slit, theta, cond.chart.h, cap)


def mapped_arc_measure(d1: RingDomain, sigma, resolution: int = 256, data: ArcMeasureData | None = None,
                       tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Angular measure of the image of the unit-circle arc ``sigma``.

    The conformal map of D1 onto an annulus sends the outer continuum to the
    unit circle; the image of sigma has measure 2 pi m(D1) times the flux of
    the modulus potential through sigma.  ``sigma`` is an ``ArcCurve`` on
    the unit circle or a ``(center_angle, half_width)`` pair.
    """
    c, hw = _arc_bounds(sigma)
    if data is None:
        data = arc_measure_data(d1, resolution, tol)
    w = _overlap(data.theta, data.h, c, hw)
    return float(TWO_PI * data.modulus * np.sum(w * data.circle_flux))


def partition_arc_measures(d1: RingDomain, breakpoints, resolution: int = 256,
                           data: ArcMeasureData | None = None,
                           tol: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Image measures of the arcs between consecutive ``breakpoints`` (angles).

    Flux into slits attached to the unit circle is credited to the arc over
    which it enters, by angle, so the measures of a full partition add up to
    2 pi by flux conservation.
    """
    b = np.sort(np.mod(np.asarray(breakpoints, dtype=float), TWO_PI))
    if b.size < 1:
        raise DomainError("need at least one breakpoint")
    if data is None:
        data = arc_measure_data(d1, resolution, tol)
    total = data.circle_flux + data.slit_flux
    ends = np.append(b[1:], b[0] + TWO_PI)
    out = []
    for a, e in zip(b, ends):
        c, hw = 0.5 * (a + e), 0.5 * (e - a)
        if b.size == 1:
            c, hw = a + math.pi, math.pi
        out.append(TWO_PI * data.modulus * float(np.sum(_overlap(data.theta, data.h, c, hw) * total)))
    return np.array(out)


# ------------------------------------------------------------------ polarization


def condenser_from_labels(chart: Chart, labels, resolution=None) -> GridCondenser:
    """Condenser defined purely by node labels (plates are node sets, no cut geometry)."""
    if chart.kind != "log_polar" and chart.kind != "cartesian":
        raise DomainError("unknown chart kind")
    labels = np.array(labels, dtype=np.int8)
    labels[labels == EXCLUDED] = FIELD
    n0, n1 = chart.shape
    cut_frac = np.full((4, n0, n1), np.inf)
    cut_plate = np.full((4, n0, n1), -1, dtype=np.int8)
    cut_z = np.zeros((4, n0, n1), dtype=complex)
    z = chart.node_z()
    cond = GridCondenser(chart, labels, cut_frac, cut_plate, cut_z, resolution or n1)
    fmask = labels == FIELD
    for d in range(4):
        qi, qj, valid = cond.neighbor(d)
        if np.any(fmask & ~valid):
            raise GridExtentError("field region reaches the edge of the grid")
        ql = labels[qi, qj]
        if np.any(valid & (((labels == PLATE0) & (ql == PLATE1)) | ((labels == PLATE1) & (ql == PLATE0)))):
            raise DegenerateCondenserError("plate0 and plate1 nodes are adjacent: the plates touch")
        m = fmask & valid & ((ql == PLATE0) | (ql == PLATE1))
        cut_frac[d][m] = 1.0
        cut_plate[d][m] = (ql[m] == PLATE1).astype(np.int8)
        cut_z[d][m] = z[qi, qj][m]
    _classify_components(cond, False)
    return cond


def _label_only(cond):
    fin = np.isfinite(cond.cut_frac)
    return bool(np.all(cond.cut_frac[fin] == 1.0))


def polarize(cond: GridCondenser, t: float) -> GridCondenser:
    """Polarize the plates with respect to the circle |z - center| = t.

    log t is snapped to the nearest grid row i_t (reported in
    ``meta["polarization_radius"]``); reflection is the row map
    i -> 2 i_t - i.  Inside the circle plate1 becomes plate1 united with
    its reflection and plate0 the intersection; outside, dually.
    """
    chart = cond.chart
    if chart.kind != "log_polar":
        raise PreconditionError("polarization is only implemented on log-polar grids")
    if not (0 < t):
        raise DomainError("polarization radius must be positive")
    if not _label_only(cond):
        raise PreconditionError("polarization needs a condenser whose plates are node sets (no cut links)")
    n0, n1 = chart.shape
    x_rows = chart.coords(np.arange(n0), 0)[0]
    it = int(round((math.log(t) - x_rows[0]) / chart.h))
    if not (0 <= it < n0):
        raise GridExtentError("polarization circle lies outside the grid")
    lab = cond.labels.copy()
    lab[lab == EXCLUDED] = FIELD
    p0 = lab == PLATE0
    p1 = lab == PLATE1

    def reflected(mask, i):
        k = 2 * it - i
        if 0 <= k < n0:
            return mask[k]
        edge = 0 if k < 0 else n0 - 1
        row = mask[edge]
        lrow = lab[edge]
        if not np.all(lrow == lrow[0]):
            raise GridExtentError(f"reflection of row {i} leaves the grid and edge row {edge} is not uniform")
        return row

    new0 = p0.copy()
    new1 = p1.copy()
    for i in range(n0):
        if i == it:
            continue
        r0 = reflected(p0, i)
        r1 = reflected(p1, i)
        if i < it:
            new1[i] = p1[i] | r1
            new0[i] = p0[i] & r0
        else:
            new1[i] = p1[i] & r1
            new0[i] = p0[i] | r0
    out = np.full(lab.shape, FIELD, dtype=np.int8)
    out[new0] = PLATE0
    out[new1] = PLATE1
    res = condenser_from_labels(chart, out, cond.resolution)
    res.meta["polarization_radius"] = float(math.exp(x_rows[it]))
    res.meta["polarization_row"] = it
    return res


def random_label_condenser(rng: np.random.Generator, resolution: int = 64, rho_min: float = 0.1,
                           pieces: int = 6) -> GridCondenser:
    """Random node-set condenser on a log-polar grid, for polarization experiments.

    plate1 is the bottom rows plus random radial and circular node runs,
    plate0 the top row plus runs of its own; plate0 nodes adjacent to plate1
    are returned to the field.
    """
    chart = log_polar_chart(rho_min, 1.0, resolution)
    n0, n1 = chart.shape
    lab = np.full((n0, n1), FIELD, dtype=np.int8)
    p1 = np.zeros((n0, n1), bool)
    p0 = np.zeros((n0, n1), bool)
    p1[:2] = True
    p0[-1] = True
    for plate in (p1, p0):
        for _ in range(int(rng.integers(1, pieces + 1))):
            i = int(rng.integers(2, n0 - 2))
            j = int(rng.integers(0, n1))
            if rng.random() < 0.5:
                length = int(rng.integers(1, max(2, n0 // 3)))
                plate[max(2, i - length):i + 1, j] = True
            else:
                width = int(rng.integers(1, max(2, n1 // 4)))
                cols = np.mod(np.arange(j, j + width), n1)
                plate[i, cols] = True
    p0 &= ~p1
    near = np.zeros_like(p1)
    near[1:] |= p1[:-1]
    near[:-1] |= p1[1:]
    near |= np.roll(p1, 1, axis=1) | np.roll(p1, -1, axis=1)
    p0 &= ~near
    p0[-1] = True
    if np.any(p1[-2]):
        p1[-2] = False
    lab[p1] = PLATE1
    lab[p0] = PLATE0
    return condenser_from_labels(chart, lab, resolution)
