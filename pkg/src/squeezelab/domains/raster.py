"""Rasterization of plate pieces onto Cartesian or log-polar node grids.

Grids are node-centred.  Every node is labelled field, plate0, plate1 or
excluded, and every link from a field node towards a neighbour records the
fraction of the link (in chart coordinates) after which it first meets a
plate, together with the point where it does.  Uncut links carry ``inf``.

Charts are laid out so that halving the spacing nests the old nodes inside
the new grid: the Cartesian origin is fixed, and the log-polar grid is
anchored at its outermost row.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import DegenerateCondenserError, DomainError, GridExtentError, RefinementError, TopologyError
from .shapes import TWO_PI, Circle, RegionPiece, SlitPiece

FIELD, PLATE0, PLATE1, EXCLUDED = 0, 1, 2, 3

# Link directions: (axis-0 step, axis-1 step).  Opposite of d is d ^ 1.
DIRECTIONS = ((0, 1), (0, -1), (1, 0), (-1, 0))

MIN_FRACTION = 1e-6
_BISECT_STEPS = 50


@dataclass(frozen=True)
class Chart:
    """Uniform node lattice in chart coordinates (u0, u1) with spacing h.

    cartesian: z = origin + u0 + i u1, u0 = i*h, u1 = j*h.
    log_polar: z = center + exp(X + i theta), X = x_top - (n0-1-i)*h,
    theta = j*h with h = 2 pi / n1 (axis 1 periodic).
    """

    kind: str
    shape: tuple
    h: float
    origin: complex = 0j
    x_top: float = 0.0

    @property
    def periodic(self):
        return self.kind == "log_polar"

    @property
    def spacing(self):
        return (self.h, self.h)

    def coords(self, i, j):
        i = np.asarray(i, dtype=float)
        j = np.asarray(j, dtype=float)
        if self.kind == "cartesian":
            return i * self.h, j * self.h
        return self.x_top - (self.shape[0] - 1 - i) * self.h, j * self.h

    def to_z(self, u0, u1):
        u0 = np.asarray(u0, dtype=float)
        u1 = np.asarray(u1, dtype=float)
        if self.kind == "cartesian":
            return self.origin + u0 + 1j * u1
        return self.origin + np.exp(u0 + 1j * u1)

    def node_z(self):
        i, j = np.meshgrid(np.arange(self.shape[0]), np.arange(self.shape[1]), indexing="ij")
        return self.to_z(*self.coords(i, j))

    def index_of(self, z):
        """Fractional node indices (i, j) of points z."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "cartesian":
            w = z - self.origin
            return w.real / self.h, w.imag / self.h
        w = z - self.origin
        x = np.log(np.abs(w))
        fi = (x - self.x_top) / self.h + (self.shape[0] - 1)
        fj = np.mod(np.angle(w), TWO_PI) / self.h
        return fi, fj

    @property
    def row_radii(self):
        if self.kind != "log_polar":
            raise DomainError("row radii exist only on log-polar charts")
        return np.exp(self.coords(np.arange(self.shape[0]), 0)[0])


def cartesian_chart(bbox, resolution, margin_frac=0.04):
    """Square Cartesian chart covering ``bbox`` with a fixed margin.

    The node count per axis is resolution + 1 and only the spacing depends
    on ``resolution``, so charts at R and 2R are nested.
    """
    xmin, xmax, ymin, ymax = bbox
    size = max(xmax - xmin, ymax - ymin)
    margin = margin_frac * size
    length = size + 2 * margin
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    origin = complex(cx - 0.5 * length, cy - 0.5 * length)
    h = length / resolution
    return Chart("cartesian", (resolution + 1, resolution + 1), h, origin)


def log_polar_chart(rho_min, rho_max, resolution, center=0j):
    """Log-polar chart with square cells h = 2 pi / resolution.

    The top row sits at radius ``rho_max`` exactly; rows extend inwards until
    at least one row lies strictly below ``rho_min``.
    """
    if not (0 < rho_min < rho_max):
        raise DomainError("log-polar chart needs 0 < rho_min < rho_max")
    h = TWO_PI / resolution
    x_top = math.log(rho_max)
    n0 = int(math.ceil((x_top - math.log(rho_min)) / h)) + 2
    return Chart("log_polar", (n0, resolution), h, complex(center), x_top)


@dataclass
class GridCondenser:
    """Discretized condenser; see the module docstring for the layout."""

    chart: Chart
    labels: np.ndarray
    cut_frac: np.ndarray
    cut_plate: np.ndarray
    cut_z: np.ndarray
    resolution: int
    plate0_pieces: tuple = ()
    plate1_pieces: tuple = ()
    marked_point: complex | None = None
    source: Callable | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def grid_kind(self):
        return self.chart.kind

    @property
    def shape(self):
        return self.chart.shape

    @property
    def spacing(self):
        return self.chart.spacing

    @property
    def cell_state(self):
        return self.labels

    def node_z(self):
        return self.chart.node_z()

    def rebuild(self, resolution):
        if self.source is None:
            raise DomainError("condenser has no source and cannot be re-rasterized")
        return self.source(resolution)

    def neighbor(self, d):
        """Index arrays (qi, qj, valid) of the neighbour in direction d for every node."""
        n0, n1 = self.chart.shape
        di, dj = DIRECTIONS[d]
        i, j = np.meshgrid(np.arange(n0), np.arange(n1), indexing="ij")
        qi, qj = i + di, j + dj
        if self.chart.periodic:
            qj = np.mod(qj, n1)
            valid = (qi >= 0) & (qi < n0)
        else:
            valid = (qi >= 0) & (qi < n0) & (qj >= 0) & (qj < n1)
        return np.clip(qi, 0, n0 - 1), np.clip(qj, 0, n1 - 1), valid


def _path_points(chart, i, j, d, t):
    u0, u1 = chart.coords(i, j)
    di, dj = DIRECTIONS[d]
    return chart.to_z(u0 + di * chart.h * t, u1 + dj * chart.h * t)


def _bisect_region(piece, chart, i, j, d):
    """Smallest t in (0, 1] where the link enters a region piece (p outside, q inside)."""
    lo = np.zeros(i.shape)
    hi = np.ones(i.shape)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        inside = piece.contains(_path_points(chart, i, j, d, mid))
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    return hi


def _bisect_slit(piece, chart, i, j, d, s0):
    lo = np.zeros(i.shape)
    hi = np.ones(i.shape)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        s = piece.side(_path_points(chart, i, j, d, mid))
        same = np.sign(s) == np.sign(s0)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _slit_scale(piece):
    xmin, xmax, ymin, ymax = piece.bbox()
    return max(1.0, abs(xmin), abs(xmax), abs(ymin), abs(ymax))


def _check_slit_resolution(piece, chart, resolution):
    length = getattr(piece.curve, "length", None)
    if length is None:
        return
    z = piece.curve.samples(64)
    if chart.kind == "log_polar":
        local_h = chart.h * float(np.min(np.abs(z - chart.origin)))
    else:
        local_h = chart.h
    if length < local_h:
        need = int(2 ** math.ceil(math.log2(resolution * local_h / length * 1.0001)))
        raise RefinementError(
            f"slit of length {length:.3g} is shorter than the local cell size {local_h:.3g} "
            f"at resolution {resolution}; use resolution >= {need}", suggested_resolution=need)


def rasterize_pieces(plate0, plate1, chart: Chart, resolution: int, *, marked_point=None,
                     source=None, allow_empty_plate1=False, meta=None) -> GridCondenser:
    """Build a :class:`GridCondenser` from lists of plate pieces on a chart."""
    if resolution < 32:
        raise DomainError(f"resolution must be >= 32, got {resolution}")
    plate0, plate1 = tuple(plate0), tuple(plate1)
    for piece in plate0 + plate1:
        if isinstance(piece, SlitPiece):
            _check_slit_resolution(piece, chart, resolution)
    z = chart.node_z()
    n0, n1 = chart.shape
    labels = np.full((n0, n1), FIELD, dtype=np.int8)
    in0 = np.zeros((n0, n1), bool)
    in1 = np.zeros((n0, n1), bool)
    for plate, mask in ((plate0, in0), (plate1, in1)):
        for piece in plate:
            if isinstance(piece, RegionPiece):
                mask |= piece.contains(z)
            else:
                on = (np.abs(piece.side(z)) <= 1e-12 * _slit_scale(piece)) & piece.extent(z)
                mask |= on
    if np.any(in0 & in1):
        raise DegenerateCondenserError("the two plates overlap")
    labels[in0] = PLATE0
    labels[in1] = PLATE1

    cut_frac = np.full((4, n0, n1), np.inf)
    cut_plate = np.full((4, n0, n1), -1, dtype=np.int8)
    cut_z = np.zeros((4, n0, n1), dtype=complex)
    template = GridCondenser(chart, labels, cut_frac, cut_plate, cut_z, resolution)
    field_mask = labels == FIELD
    ii, jj = np.meshgrid(np.arange(n0), np.arange(n1), indexing="ij")
    for d in range(4):
        qi, qj, valid = template.neighbor(d)
        # a field node on the grid edge has no neighbour: the grid is too small
        if np.any(field_mask & ~valid):
            raise GridExtentError("field region reaches the edge of the grid")
        qlab = labels[qi, qj]
        # plate nodes adjacent across a link must belong to the same plate
        touching = valid & (((labels == PLATE0) & (qlab == PLATE1)) | ((labels == PLATE1) & (qlab == PLATE0)))
        if np.any(touching):
            raise DegenerateCondenserError("plate0 and plate1 nodes are adjacent: the plates touch")
        best = cut_frac[d]
        bplate = cut_plate[d]
        bz = cut_z[d]
        zq = z[qi, qj]
        for k, plate in enumerate((plate0, plate1)):
            for piece in plate:
                if isinstance(piece, RegionPiece):
                    cand = field_mask & valid & piece.contains(zq)
                    if not cand.any():
                        continue
                    pi_, pj_ = ii[cand], jj[cand]
                    t = _bisect_region(piece, chart, pi_, pj_, d)
                else:
                    sp_ = piece.side(z)
                    sq_ = sp_[qi, qj]
                    cand = field_mask & valid & ((np.sign(sp_) != np.sign(sq_)) | (sq_ == 0))
                    if not cand.any():
                        continue
                    pi_, pj_ = ii[cand], jj[cand]
                    t = _bisect_slit(piece, chart, pi_, pj_, d, sp_[cand])
                    hit = piece.extent(_path_points(chart, pi_, pj_, d, t))
                    t = np.where(hit, t, np.inf)
                zc = _path_points(chart, pi_, pj_, d, np.where(np.isfinite(t), t, 0.0))
                t = np.maximum(t, MIN_FRACTION)
                better = t < best[pi_, pj_]
                bi, bj = pi_[better], pj_[better]
                best[bi, bj] = t[better]
                bplate[bi, bj] = k
                bz[bi, bj] = zc[better]
    # field links ending at a plate node must be cut (guards tolerance mismatches)
    for d in range(4):
        qi, qj, valid = template.neighbor(d)
        qlab = labels[qi, qj]
        miss = field_mask & valid & ((qlab == PLATE0) | (qlab == PLATE1)) & ~np.isfinite(cut_frac[d])
        if miss.any():
            cut_frac[d][miss] = 1.0
            cut_plate[d][miss] = (qlab[miss] == PLATE1).astype(np.int8)
            cut_z[d][miss] = z[qi, qj][miss]
    cond = GridCondenser(chart, labels, cut_frac, cut_plate, cut_z, resolution, plate0, plate1,
                         None if marked_point is None else complex(marked_point), source, dict(meta or {}))
    _classify_components(cond, allow_empty_plate1)
    return cond


def field_components(cond: GridCondenser):
    """Connected components of field nodes joined by uncut links.

    Returns ``(n_components, comp)`` where ``comp`` is -1 off the field.
    """
    n0, n1 = cond.shape
    fmask = cond.labels == FIELD
    index = np.full((n0, n1), -1, dtype=np.int64)
    index[fmask] = np.arange(int(fmask.sum()))
    rows, cols = [], []
    for d in (0, 2):
        qi, qj, valid = cond.neighbor(d)
        link = fmask & valid & ~np.isfinite(cond.cut_frac[d]) & (cond.labels[qi, qj] == FIELD)
        rows.append(index[link])
        cols.append(index[qi, qj][link])
    nf = int(fmask.sum())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(r.size), (r, c)), shape=(nf, nf))
    ncomp, lab = connected_components(graph, directed=False)
    comp = np.full((n0, n1), -1, dtype=np.int64)
    comp[fmask] = lab
    return ncomp, comp


def _classify_components(cond: GridCondenser, allow_empty_plate1: bool):
    if not np.any(cond.labels == PLATE0) and not np.any(cond.cut_plate == 0):
        raise DomainError("plate0 is empty on the grid")
    if not allow_empty_plate1 and not np.any(cond.labels == PLATE1) and not np.any(cond.cut_plate == 1):
        raise DomainError("plate1 is empty on the grid")
    ncomp, comp = field_components(cond)
    touch = np.zeros((ncomp, 2), bool)
    fmask = comp >= 0
    for d in range(4):
        for k in (0, 1):
            m = fmask & (cond.cut_plate[d] == k)
            touch[comp[m], k] = True
    if allow_empty_plate1:
        keep = touch[:, 0]
        if cond.marked_point is not None:
            fi, fj = cond.chart.index_of(cond.marked_point)
            i0, j0 = int(round(float(fi))), int(round(float(fj)))
            if 0 <= i0 < cond.shape[0] and 0 <= j0 < cond.shape[1] and comp[i0, j0] >= 0:
                keep = np.zeros(ncomp, bool)
                keep[comp[i0, j0]] = True
    else:
        keep = touch[:, 0] & touch[:, 1]
    cond.meta["components_touching_both"] = int(np.sum(touch[:, 0] & touch[:, 1]))
    cond.meta["components_total"] = int(ncomp)
    drop = fmask & ~keep[np.where(fmask, comp, 0)]
    cond.labels[drop] = EXCLUDED
    # values to use on excluded nodes when reporting potentials
    cond.meta["excluded_plate"] = np.where(drop, np.where(touch[np.where(fmask, comp, 0), 1], 1, 0), -1)
    if not np.any(cond.labels == FIELD):
        raise TopologyError("no field component connects the two plates")


def check_connected_field(cond: GridCondenser):
    """Raise :class:`TopologyError` unless exactly one field component joins both plates."""
    n = cond.meta.get("components_touching_both", 1)
    if n != 1:
        raise TopologyError(f"field splits into {n} components joining the plates; expected one")


# ------------------------------------------------------------ domain frontends


def _pieces_for_plate(domain, indices):
    out = []
    for k in indices:
        out += domain.plate_pieces(k)
    return out


def rasterize(domain, plate_assignment=None, resolution=256, grid_kind="log_polar", center=None):
    """Rasterize a slit disk or ring domain into a two-plate condenser.

    ``plate_assignment`` is a pair of lists of boundary-continuum indices
    (see ``domain.continua()``); the default puts the outer continuum (the
    unit circle, or a ring's outer curve) on plate0 and every other continuum
    on plate1.  Every continuum must be assigned to one plate.
    """
    from .model import RingDomain

    ncont = len(domain.continua())
    if plate_assignment is None:
        if isinstance(domain, RingDomain):
            plate_assignment = ([0], [1])
        else:
            plate_assignment = ([ncont - 1], list(range(ncont - 1)))
    p0, p1 = [list(map(int, p)) for p in plate_assignment]
    if not p0 or not p1 or set(p0) & set(p1):
        raise DomainError("plate assignment needs two nonempty disjoint sets of continua")
    if set(p0) | set(p1) != set(range(ncont)) or any(k < 0 or k >= ncont for k in p0 + p1):
        raise DomainError(f"plate assignment must cover the continua 0..{ncont - 1} exactly")
    pieces0 = _pieces_for_plate(domain, p0)
    pieces1 = _pieces_for_plate(domain, p1)
    outer_idx = 0 if isinstance(domain, RingDomain) else ncont - 1
    outer = domain.continua()[outer_idx]

    def build(res):
        if grid_kind == "cartesian":
            chart = cartesian_chart(domain.bbox(), res)
        elif grid_kind == "log_polar":
            chart = _log_polar_for(domain, pieces1, p1, outer, res, center)
        else:
            raise DomainError(f"unknown grid kind {grid_kind!r}")
        return rasterize_pieces(pieces0, pieces1, chart, res, source=build)

    return build(int(resolution))


def _log_polar_for(domain, pieces1, p1, outer, res, center):
    """Log-polar chart whose centre lies inside the closed inner plate."""
    regions = [p for p in pieces1 if isinstance(p, RegionPiece) and p.interior]
    if center is None:
        if len(regions) != 1:
            raise DomainError("log-polar grids need a single closed inner plate containing the chart centre; "
                              "use grid_kind='cartesian'")
        curve = regions[0].curve
        center = curve.center if isinstance(curve, Circle) else 0j
    center = complex(center)
    if not any(p.contains(center) for p in regions):
        raise DomainError("log-polar chart centre must lie inside the inner plate")
    lo = min(r.curve.distance_range(center)[0] for r in regions)
    hi = outer.distance_range(center)[1]
    if isinstance(outer, Circle) and outer.center == center:
        hi = outer.radius
    if lo <= 0:
        raise DomainError("chart centre lies on the inner boundary")
    return log_polar_chart(lo, hi, res, center)


def rasterize_pointed(plate_pieces, bbox, marked_point, resolution=256):
    """Cartesian condenser for a simply connected domain with a marked point.

    Only plate0 is populated; the field component containing the marked
    point is kept.
    """
    def build(res):
        chart = cartesian_chart(bbox, res)
        return rasterize_pieces(plate_pieces, (), chart, res, marked_point=marked_point, source=build,
                                allow_empty_plate1=True)

    return build(int(resolution))


def upsample_labels(coarse: GridCondenser, fine: GridCondenser):
    """Labels of ``coarse`` placed on the nodes of ``fine`` they coincide with.

    Returns ``(fine_indices, coarse_labels)`` for the shared nodes.
    """
    if coarse.chart.kind != fine.chart.kind or not math.isclose(coarse.chart.h, 2 * fine.chart.h):
        raise DomainError("condensers are not a refinement pair")
    zc = coarse.node_z().ravel()
    fi, fj = fine.chart.index_of(zc)
    fi = np.rint(fi).astype(int)
    fj = np.mod(np.rint(fj).astype(int), fine.shape[1])
    ok = (fi >= 0) & (fi < fine.shape[0]) & (fj >= 0) & (fj < fine.shape[1])
    return (fi[ok], fj[ok]), coarse.labels.ravel()[ok]
