import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardy_extremal.geometry import (GeometryError, Segment, circle_intersection, comb_domain,
                                     comb_level_radius, crosscut_decomposition, disk,
                                     domain_from_spec, load_domain, polygon, slit_plane,
                                     transition_radii, wedge)


def test_wedge_membership_and_distance():
    D = wedge(math.pi / 2, 0.5 + 0.25j)
    assert D.contains(2 + 0.5j) and not D.contains(-1 + 0.1j)
    assert D.distance_to_boundary(3 + 0j) == pytest.approx(3 / math.sqrt(2))


def test_base_point_must_be_interior():
    with pytest.raises(GeometryError):
        disk(0j, 1.0, 2.0 + 0j)
    with pytest.raises(GeometryError):
        slit_plane([(1 + 0j, 1 + 0j)], 2.0 + 0j)


def test_segment_crossing():
    s = Segment(0j, 1 + 0j)
    a, b = np.array([0.5 - 1j, 2 - 1j]), np.array([0.5 + 1j, 2 + 1j])
    np.testing.assert_array_equal(s.crosses(a, b), [True, False])


@pytest.mark.parametrize("opening", [math.pi / 4, math.pi / 2, math.pi, 1.5 * math.pi])
def test_wedge_circle_section_width(opening):
    arcs = circle_intersection(wedge(opening), 7.0)
    assert len(arcs) == 1 and arcs[0].width == pytest.approx(opening)


def test_disk_sections():
    D = disk(0j, 5.0, 0j)
    assert circle_intersection(D, 3.0)[0].closed
    assert circle_intersection(D, 6.0) == []


def test_comb_ray_counts():
    D = comb_domain(2.0, 3)
    assert len(D.pieces) == 4 + 4 + 8 + 16
    beyond = circle_intersection(D, 2 * comb_level_radius(2.0, 3))
    assert len(beyond) == 32
    assert max(a.width for a in beyond) == pytest.approx(math.pi / 16)
    assert transition_radii(D) == pytest.approx([1.0] + [math.exp(2.0 * l) for l in (1, 2, 3)])


@settings(max_examples=30, deadline=None)
@given(st.floats(1.01, 1e4))
def test_section_widths_sum_below_full_turn(r):
    arcs = circle_intersection(comb_domain(2.0, 3), r)
    assert sum(a.width for a in arcs) <= 2 * math.pi + 1e-9
    assert all(a.width > 0 for a in arcs)


def test_decomposition_wedge_single_unbounded():
    dec = crosscut_decomposition(wedge(math.pi / 2, 0.5 + 0.25j), 10.0, 10.0 / 64)
    assert len(dec) == 1 and dec.crosscuts[0].far_side_unbounded


def test_decomposition_slit_plane_full_turn():
    dec = crosscut_decomposition(slit_plane([(1 + 0j, 1 + 0j)]), 5.0, 5.0 / 64)
    assert len(dec) == 1
    assert dec.crosscuts[0].width == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("r, count", [(3.0, 4), (10.0, 8), (100.0, 16)])
def test_decomposition_comb_counts(r, count):
    dec = crosscut_decomposition(comb_domain(2.0, 3, base_point=0.5 + 0.1j), r, r / 64)
    assert len(dec) == count
    assert all(c.far_side_unbounded for c in dec.crosscuts)


def test_decomposition_square():
    sq = polygon([-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j], 0j)
    assert crosscut_decomposition(sq, 0.1, 0.1 / 64).crosscuts[0].closed
    dec = crosscut_decomposition(sq, 1.2, 1.2 / 64)
    assert len(dec) == 4 and not any(c.far_side_unbounded for c in dec.crosscuts)


def test_decomposition_keeps_only_arcs_bounding_base_component():
    # U shape: the circle meets both arms, and both arcs border the base component
    u = polygon([-3 - 1j, 3 - 1j, 3 + 3j, 2 + 3j, 2 + 0j, -2 + 0j, -2 + 3j, -3 + 3j], -0.5j)
    dec = crosscut_decomposition(u, 2.5, 2.5 / 64)
    assert len(dec) == 2
    assert sum(not c.far_side_unbounded for c in dec.crosscuts) == 2


def test_spec_roundtrip(tmp_path):
    spec = {"kind": "comb", "c": 2.0, "levels": 2}
    path = tmp_path / "comb.json"
    path.write_text(json.dumps(spec))
    D = load_domain(path)
    assert D.kind == "comb" and D.params["levels"] == 2


@pytest.mark.parametrize("spec", [{"kind": "blob"}, {"kind": "wedge"}, [], {"opening": 1.0},
                                  {"kind": "comb", "levels": 0}])
def test_malformed_specs(spec):
    with pytest.raises(GeometryError):
        domain_from_spec(spec)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(GeometryError):
        load_domain(path)


@pytest.mark.parametrize("r, count", [(2000.0, 4), (1.5e5, 4), (2.925e5, 8)])
def test_decomposition_wide_comb_keeps_core_resolved(r, count):
    # far from the unit core the sectors still meet at the origin
    dec = crosscut_decomposition(comb_domain(4 * math.pi, 1), r, r / 64)
    assert len(dec) == count
