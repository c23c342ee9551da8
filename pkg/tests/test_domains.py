import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import ndimage

from squeezelab.domains import (FIELD, PLATE0, PLATE1, Circle, CircularArcSlit, MoebiusDiskAutomorphism,
                                RingDomain, SlitDiskDomain, apply_moebius, build_symmetric_slit_disk,
                                build_threefold_example, rasterize, upsample_labels)
from squeezelab.domains.raster import check_connected_field, field_components
from squeezelab.domains.schema import SpecError, load_domain, read_spec
from squeezelab.errors import DomainError, RefinementError


def test_single_slit_case():
    d = build_symmetric_slit_disk(2, 0.5, 0.3)
    assert len(d.slits) == 1
    s = d.slits[0]
    assert (s.radius, s.center_angle, s.half_width) == (0.5, 0.0, 0.3)


def test_three_slits_equally_spaced():
    d = build_symmetric_slit_disk(4, 0.5, 0.2)
    angles = sorted(s.center_angle for s in d.slits)
    assert angles == pytest.approx([0.0, 2 * math.pi / 3, 4 * math.pi / 3], abs=1e-15)


def test_slit_overlap_rejected():
    with pytest.raises(DomainError):
        build_symmetric_slit_disk(3, 0.5, math.pi / 2)


@given(st.integers(2, 7), st.floats(0.05, 0.95), st.floats(0.01, 0.99))
def test_slit_disk_rotation_invariant(n, r, frac):
    alpha = frac * math.pi / (n - 1)
    d = build_symmetric_slit_disk(n, r, alpha)
    assert d.rotated(2 * math.pi / (n - 1)).slit_set(9) == d.slit_set(9)


def test_threefold_example():
    ex = build_threefold_example(2.0)
    ends = sorted((s.start, s.end) for s in ex.segments[:1])
    assert ends[0][0] == pytest.approx(1.0) and ends[0][1] == pytest.approx(2.0)
    rot = ex.rotated(2 * math.pi / 3)
    for s in rot:
        assert any(abs(s.start - t.start) < 1e-12 and abs(s.end - t.end) < 1e-12 for t in ex.segments)
    inv = ex.inverted_segments[0]
    assert sorted([inv.start.real, inv.end.real]) == pytest.approx([0.5, 1.0])
    assert abs(inv.start.imag) < 1e-15 and abs(inv.end.imag) < 1e-15
    with pytest.raises(DomainError):
        build_threefold_example(1.0 + 1e-12)


def test_moebius_examples():
    z = np.array([0.3 + 0.1j, -0.5j, 0.0])
    assert np.allclose(apply_moebius(MoebiusDiskAutomorphism(), z), z)
    t = MoebiusDiskAutomorphism(0.3 - 0.4j, 0.7)
    assert abs(apply_moebius(t, t.a)) < 1e-15
    w = apply_moebius(t, np.exp(1j * np.linspace(0, 6, 50)))
    assert np.allclose(np.abs(w), 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        apply_moebius(t, 1.5)


@given(st.floats(0, 0.95), st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(0, 0.999),
       st.floats(0, 2 * math.pi))
def test_moebius_inverse_round_trip(ra, ta, rot, rz, tz):
    t = MoebiusDiskAutomorphism(ra * complex(math.cos(ta), math.sin(ta)), rot)
    z = rz * complex(math.cos(tz), math.sin(tz))
    back = apply_moebius(t.inverse(), apply_moebius(t, z))
    assert abs(back - z) < 1e-12 * max(1.0, 1.0 / (1.0 - ra) ** 2)


def test_moebius_image_of_circle_is_exact():
    t = MoebiusDiskAutomorphism(0.2 + 0.1j)
    c = t.image_of_circle(Circle(0j, 0.25))
    w = apply_moebius(t, 0.25 * np.exp(1j * np.linspace(0, 6.2, 40)))
    assert np.allclose(np.abs(w - c.center), c.radius, atol=1e-12)


def test_rasterize_annulus_labels():
    cond = rasterize(RingDomain.annulus(0.2), resolution=256)
    radii = np.abs(cond.node_z())
    field = cond.labels == FIELD
    assert np.all((radii[field] > 0.2 - 1e-12) & (radii[field] < 1.0 + 1e-12))
    assert np.any(cond.labels == PLATE0) and np.any(cond.labels == PLATE1)
    # every row of a log-polar chart is one circle: each row is uniformly labelled
    assert all(len(set(row)) == 1 for row in cond.labels)


def test_rasterize_slit_disk_connected():
    d = build_symmetric_slit_disk(3, 0.5, 0.3)
    cond = rasterize(d, resolution=128, grid_kind="cartesian")
    check_connected_field(cond)
    n, _ = field_components(cond)
    # independent oracle: 4-connected flood fill of field nodes (cut links only remove edges, so
    # the flood fill component count is a lower bound that must also be one here)
    lab, count = ndimage.label(cond.labels == FIELD)
    assert count == 1
    assert n == 1


def test_rasterize_refinement_error():
    d = build_symmetric_slit_disk(3, 0.5, 0.001)
    with pytest.raises(RefinementError) as info:
        rasterize(d, resolution=32, grid_kind="cartesian")
    sug = info.value.suggested_resolution
    assert sug > 32 and sug & (sug - 1) == 0


def test_rasterize_rejects_low_resolution():
    with pytest.raises(DomainError):
        rasterize(RingDomain.annulus(0.2), resolution=16)


@pytest.mark.parametrize("res", [32, 64])
@pytest.mark.parametrize("domain", [RingDomain.annulus(0.3), RingDomain(Circle(0j, 1.0), Circle(0.2 + 0.1j, 0.3))])
def test_rasterization_nested(domain, res):
    kind = "log_polar" if domain.is_concentric_annulus else "cartesian"
    coarse = rasterize(domain, resolution=res, grid_kind=kind)
    fine = rasterize(domain, resolution=2 * res, grid_kind=kind)
    (fi, fj), lab = upsample_labels(coarse, fine)
    assert lab.size > 0
    assert np.all(fine.labels[fi, fj][lab == FIELD] == FIELD)


def test_spec_shorthand_and_json():
    d, spec = load_domain("annulus:0.25")
    assert isinstance(d, RingDomain) and d.inner.radius == 0.25
    d, _ = load_domain('{"type": "slit_disk", "n": 3, "r": 0.5, "alpha": 0.2}')
    assert isinstance(d, SlitDiskDomain) and len(d.slits) == 2
    d, _ = load_domain('{"type": "annulus", "inner_radius": 0.25, "moebius": {"a": [0.2, 0.1]}}')
    assert not d.is_concentric_annulus


def test_spec_malformed_json_reports_position():
    with pytest.raises(SpecError) as info:
        read_spec('{"type": "annulus",\n "inner_radius": }')
    assert (info.value.line, info.value.column) == (2, 18)


def test_spec_schema_violation():
    with pytest.raises(SpecError):
        read_spec('{"type": "annulus", "inner_radius": 1.5}')
    with pytest.raises(SpecError):
        read_spec('{"type": "hexagon"}')


def test_arc_slit_json_round_trip():
    s = CircularArcSlit(0.4, 1.0, 0.3)
    assert CircularArcSlit.from_json(s.to_json()) == s
