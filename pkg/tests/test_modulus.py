import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from squeezelab.canonical import AnnulusSlitMap
from squeezelab.domains import (FIELD, PLATE0, PLATE1, Circle, RingDomain, build_symmetric_slit_disk,
                                log_polar_chart, rasterize, rasterize_pointed)
from squeezelab.domains.model import JordanDomain
from squeezelab.errors import DegenerateCondenserError, DomainError, PreconditionError
from squeezelab.modulus import (ModulusResult, ReducedModuleResult, capacity, condenser_from_labels,
                                mapped_arc_measure, partition_arc_measures, polarize, random_label_condenser,
                                reduced_module, ring_modulus, solve_potential)
from squeezelab.verify import radial_slit_ring


@pytest.mark.parametrize("res", [256, 512])
def test_annulus_modulus(res):
    m = ring_modulus(rasterize(RingDomain.annulus(0.2), resolution=res))
    exact = math.log(5) / (2 * math.pi)
    assert m.extrapolated == pytest.approx(exact, rel=1e-2)
    assert m.value == pytest.approx(exact, rel=1e-6)
    assert m.capacity == pytest.approx(2 * math.pi / math.log(5), rel=1e-2)


def test_unit_modulus_annulus():
    m = ring_modulus(rasterize(RingDomain.annulus(math.exp(-2 * math.pi)), resolution=256))
    assert m.best == pytest.approx(1.0, rel=1e-2)


def test_energy_and_flux_agree():
    cond = rasterize(RingDomain(Circle(0j, 1.0), Circle(0.2 - 0.1j, 0.3)), resolution=128, grid_kind="cartesian")
    pot = solve_potential(cond)
    assert pot.flux[0] == pytest.approx(pot.energy, rel=1e-7)
    assert pot.flux[1] == pytest.approx(pot.energy, rel=1e-7)


def slit_modulus_oracle(r, alpha):
    # the annulus slit map sends A(q, 1) onto the disk minus an arc on |w| = r; match its width
    q = brentq(lambda q: AnnulusSlitMap(q, r).slit_half_width() - alpha, 1e-4, r - 1e-3, xtol=1e-14)
    return -math.log(q) / (2 * math.pi)


def test_slit_disk_modulus_against_slit_map():
    oracle = slit_modulus_oracle(0.5, 0.3)
    assert oracle == pytest.approx(0.37004829592956, abs=1e-10)
    m = ring_modulus(rasterize(build_symmetric_slit_disk(2, 0.5, 0.3), resolution=512, grid_kind="cartesian"))
    assert m.value == pytest.approx(oracle, rel=1e-2)
    assert abs(m.value - oracle) <= 2 * abs(m.value - m.coarse_value)


def test_modulus_result_fields():
    r = ModulusResult(0.3, 0.01, 256, 0.305, 0.29, 1 / 0.3)
    assert r.certified_lower <= min(r.value, r.coarse_value, r.extrapolated)
    assert set(r.to_json()) >= {"value", "error_estimate", "resolution_used"}


def test_adjacent_plates_are_degenerate():
    chart = log_polar_chart(0.3, 1.0, 64)
    lab = np.full(chart.shape, FIELD, dtype=np.int8)
    lab[:2] = PLATE1
    lab[2] = PLATE0
    lab[-1] = PLATE0
    with pytest.raises(DegenerateCondenserError):
        condenser_from_labels(chart, lab)


def disk(r=1.0, c=0j, res=256, z0=None):
    d = JordanDomain(Circle(c, r))
    z0 = c if z0 is None else z0
    return rasterize_pointed(d.plate_pieces(), d.bbox(), z0, res)


def test_reduced_module_unit_disk_center():
    r = reduced_module(disk())
    assert abs(r.value) < 1e-4
    assert r.conformal_radius == pytest.approx(1.0, abs=1e-3)


def test_reduced_module_scaling():
    r = reduced_module(disk(0.5))
    assert r.value == pytest.approx(math.log(0.5) / (2 * math.pi), abs=1e-4)


def test_reduced_module_off_center():
    r = reduced_module(disk(z0=0.5 + 0j), 0.5 + 0j)
    assert r.value == pytest.approx(math.log(0.75) / (2 * math.pi), abs=2e-4)


def test_reduced_module_rejects_boundary_point():
    cond = disk(res=64)
    with pytest.raises(DomainError):
        reduced_module(cond, 0.9999 + 0j)


def test_reduced_result_consistency():
    with pytest.raises(DomainError):
        ReducedModuleResult(0.1, 0.5, 0.0, 64)


def test_arc_measure_identity_on_annulus():
    d = RingDomain.annulus(0.3)
    for c, hw in ((0.0, math.pi / 4), (2.0, 1.0), (4.0, 0.05)):
        assert mapped_arc_measure(d, (c, hw), resolution=128) == pytest.approx(2 * hw, rel=1e-9)


def test_arc_measure_contracts_near_slit():
    d = radial_slit_ring()
    m = mapped_arc_measure(d, (0.0, math.pi / 4), resolution=128)
    m2 = mapped_arc_measure(d, (0.0, math.pi / 4), resolution=256)
    assert m2 < math.pi / 2 - 2 * abs(m2 - m)


def test_partition_of_circle_sums_to_two_pi():
    parts = partition_arc_measures(radial_slit_ring(), [0.3, 2.0, 3.0, 3.3, 5.5], resolution=128)
    assert parts.sum() == pytest.approx(2 * math.pi, rel=1e-6)
    assert np.all(parts > 0)


def symmetric_condenser(res=64):
    chart = log_polar_chart(0.2, 1.0, res)
    rho = chart.row_radii
    lab = np.full(chart.shape, FIELD, dtype=np.int8)
    lab[rho <= 0.2 * (1 + 1e-9)] = PLATE1
    lab[rho >= 1 - 1e-9] = PLATE0
    return condenser_from_labels(chart, lab)


def test_polarization_fixed_point():
    cond = symmetric_condenser()
    rho = cond.chart.row_radii
    lo, hi = np.nonzero(rho <= 0.2 * (1 + 1e-9))[0].max(), np.nonzero(rho >= 1 - 1e-9)[0].min()
    t = math.sqrt(rho[lo] * rho[hi])
    p = polarize(cond, t)
    assert np.array_equal(p.labels, cond.labels)


def test_polarization_inner_plate_unchanged():
    cond = symmetric_condenser()
    p = polarize(cond, 0.9)
    assert capacity(p) == pytest.approx(capacity(cond), rel=1e-12)


def test_polarization_requires_label_condenser():
    with pytest.raises(PreconditionError):
        polarize(rasterize(RingDomain.annulus(0.3), resolution=64), 0.5)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.15, 0.9))
def test_polarization_never_increases_capacity(seed, t):
    cond = random_label_condenser(np.random.default_rng(seed), 48)
    assert capacity(polarize(cond, t)) <= capacity(cond) + 1e-12
