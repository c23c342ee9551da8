import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from squeezelab.canonical import (AnnulusSlitMap, annulus_slit_map_eval, annulus_uniformize,
                                  reich_warschawski_check, slit_radii, winding_number)
from squeezelab.domains import UNIT_CIRCLE, Circle, MoebiusDiskAutomorphism, RingDomain, apply_moebius
from squeezelab.domains.shapes import ArcCurve, PointCurve
from squeezelab.errors import AccuracyError, DomainError

from test_modulus import slit_modulus_oracle


def test_reich_warschawski_certificate():
    rep = reich_warschawski_check(0.1, 0.4, samples=256, truncation=30)
    assert rep["inner_deviation"] < 1e-8
    assert rep["outer_deviation"] < 1e-10


def test_slit_map_zero_and_degree():
    m = AnnulusSlitMap(0.2, 0.5)
    assert abs(m.evaluate(0.5)) < 1e-14
    w = m.evaluate(np.exp(1j * np.linspace(0, 2 * np.pi, 400, endpoint=False)))
    assert winding_number(w) == 1


@given(st.floats(0.02, 0.6), st.floats(0.05, 0.95))
def test_slit_map_boundary_moduli(q, frac):
    a = q + frac * (1 - q)
    m = AnnulusSlitMap(q, a)
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    inner, ei = annulus_slit_map_eval(m, q * np.exp(1j * th), with_error=True)
    outer, eo = annulus_slit_map_eval(m, np.exp(1j * th), with_error=True)
    assert np.all(np.abs(np.abs(inner) - a) <= ei + 1e-12)
    assert np.all(np.abs(np.abs(outer) - 1) <= eo + 1e-12)


def test_slit_map_rejects_outside_annulus():
    m = AnnulusSlitMap(0.2, 0.5)
    with pytest.raises(DomainError):
        m.evaluate(0.1)
    with pytest.raises(DomainError):
        AnnulusSlitMap(0.5, 0.3)


def test_uniformize_identity():
    t, err = annulus_uniformize(RingDomain.annulus(0.3), 256).transport(0.6)
    assert t == pytest.approx(0.6, abs=1e-3)


def test_uniformize_moebius_image():
    tr = MoebiusDiskAutomorphism(0.2)
    uni = annulus_uniformize(tr.image_of_ring(RingDomain.annulus(0.3)), 256)
    assert uni.modulus.best == pytest.approx(math.log(1 / 0.3) / (2 * math.pi), rel=1e-2)
    t, _ = uni.transport(apply_moebius(tr, 0.6))
    assert t == pytest.approx(0.6, abs=1e-2)


def test_uniformize_near_boundary_rejected():
    uni = annulus_uniformize(RingDomain.annulus(0.3), 64)
    with pytest.raises(AccuracyError):
        uni.transport(0.3005)


def test_arc_slit_ring_self_convergence():
    ring = RingDomain(UNIT_CIRCLE, ArcCurve(0.5, 0.0, 0.4))
    a, b = annulus_uniformize(ring, 256), annulus_uniformize(ring, 512)
    assert a.modulus.value == pytest.approx(b.modulus.value, rel=2e-2)
    assert b.modulus.value == pytest.approx(slit_modulus_oracle(0.5, 0.4), rel=1e-2)
    # all slits on one circle: the canonical map toward the unit circle is the identity, radius 0.5
    ta, _ = a.transport(0j)
    tb, _ = b.transport(0j)
    assert ta == pytest.approx(tb, abs=1e-4)
    assert tb == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("z, expected", [(0.5, (0.5, 0.5)), (0.9, (0.9, 0.25 / 0.9)), (-0.4j, (0.4, 0.625))])
def test_slit_radii_concentric(z, expected):
    r = slit_radii(RingDomain.annulus(0.25), z)
    assert (r.r_toward_outer, r.r_toward_inner) == pytest.approx(expected, abs=1e-14)
    assert r.r_toward_outer * r.r_toward_inner == pytest.approx(r.inner_radius, abs=1e-14)


def test_slit_radii_punctured_disk():
    r = slit_radii(RingDomain(UNIT_CIRCLE, PointCurve(0.3 + 0.2j)), 0.1j)
    assert r.r_toward_inner == 0.0
    p = 0.3 + 0.2j
    assert r.r_toward_outer == pytest.approx(abs((p - 0.1j) / (1 - np.conj(0.1j) * p)), abs=1e-14)


def test_slit_radii_two_circle_closed_form_vs_grid():
    ring = RingDomain(Circle(0j, 1.0), Circle(0.2 - 0.1j, 0.3))
    exact = slit_radii(ring, 0.5j)
    grid = slit_radii(ring, 0.5j, resolution=256, method="grid")
    assert grid.modulus == pytest.approx(exact.modulus, rel=1e-3)
    assert grid.r_toward_outer == pytest.approx(exact.r_toward_outer, abs=1e-3)


@given(st.floats(0, 0.6), st.floats(0, 2 * math.pi), st.floats(0.1, 0.6), st.floats(0.05, 0.95),
       st.floats(0, 2 * math.pi))
def test_two_circle_closed_form_is_conformally_invariant(ra, ta, s, frac, tz):
    tr = MoebiusDiskAutomorphism(ra * complex(math.cos(ta), math.sin(ta)))
    ring = tr.image_of_ring(RingDomain.annulus(s))
    t = s + frac * (1 - s)
    z = apply_moebius(tr, t * complex(math.cos(tz), math.sin(tz)))
    r = slit_radii(ring, z)
    assert r.inner_radius == pytest.approx(s, rel=1e-8)
    assert r.r_toward_outer == pytest.approx(t, rel=1e-8)
