import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holomimo.errors import InvalidArgumentError
from holomimo.geometry import (
    ArrayGeometry,
    Layout,
    build_linear_2d,
    build_linear_3d,
    projected_length,
)


def test_two_element_row():
    g = build_linear_2d(2, 0.5)
    np.testing.assert_array_equal(g.elements, [[0, 0, 0], [0.5, 0, 0]])
    assert g.layout is Layout.PLANAR2D
    assert g.element_count == len(g) == 2


def test_eleven_elements_span_five_wavelengths():
    g = build_linear_2d(11, 0.5)
    assert g.aperture_length() == pytest.approx(5.0, abs=1e-12)
    assert g.halfwave_count() == 11


def test_single_element():
    g = build_linear_2d(1, 0.3)
    np.testing.assert_array_equal(g.elements, [[0, 0, 0]])
    assert g.aperture_length() == 0.0
    assert g.halfwave_count() == 1


def test_alternating_heights():
    g = build_linear_3d(4, 0.4, 0.5)
    np.testing.assert_array_equal(g.elements[:, 2], [0, 0.5, 0, 0.5])
    assert g.layout is Layout.ALTERNATING3D
    assert g.height_difference == 0.5


@pytest.mark.parametrize("n,s", [(1, 0.3), (3, 0.4), (25, 5 / 24)])
def test_zero_height_degenerates_to_planar(n, s):
    assert build_linear_3d(n, s, 0.0) == build_linear_2d(n, s)


def test_paper_sized_3d_row():
    g = build_linear_3d(25, 5 / 24, 0.5)
    assert g.element_count == 25
    assert g.aperture_length() == pytest.approx(5.0)


@pytest.mark.parametrize("n,s", [(0, 0.5), (-1, 0.5), (2, 0.0), (2, -0.1), (2.5, 0.5)])
def test_bad_arguments(n, s):
    with pytest.raises(InvalidArgumentError):
        build_linear_2d(n, s)


def test_negative_height():
    with pytest.raises(InvalidArgumentError):
        build_linear_3d(3, 0.4, -0.1)


def test_invariants_enforced():
    with pytest.raises(InvalidArgumentError):
        ArrayGeometry(np.array([[0, 0, 0], [1, 0, 0.1]]), Layout.PLANAR2D)
    with pytest.raises(InvalidArgumentError):
        ArrayGeometry(np.array([[0, 0, np.nan]]), Layout.CUSTOM)
    with pytest.raises(InvalidArgumentError):
        ArrayGeometry(np.zeros((0, 3)), Layout.CUSTOM)
    with pytest.raises(InvalidArgumentError):
        ArrayGeometry(np.array([[0, 0, 0], [1, 0, 0.5], [2, 0, 0.7]]), Layout.ALTERNATING3D)


def test_min_spacing_is_euclidean():
    g = build_linear_3d(5, 0.3, 0.4)
    # same-height neighbours are 0.6 apart, staggered neighbours 0.5
    assert g.min_spacing() == pytest.approx(0.5)


def test_json_round_trip():
    g = build_linear_3d(5, 0.3, 0.4)
    doc = json.loads(g.to_json())
    assert doc["layout"] == "alternating3d"
    assert ArrayGeometry.from_json(g.to_json()) == g


def test_from_dict_rejects_garbage():
    with pytest.raises(InvalidArgumentError):
        ArrayGeometry.from_dict({"layout": "custom"})


@pytest.mark.parametrize(
    "geometry,direction,expected",
    [
        (build_linear_2d(2, 0.5), (0, 0, 1), 0.5),
        (build_linear_2d(2, 0.5), (1, 0, 0), 0.0),
        (build_linear_3d(2, 0.5, 0.5), (1, 0, 0), 0.5),
    ],
)
def test_projected_length_examples(geometry, direction, expected):
    assert projected_length(geometry, direction) == pytest.approx(expected, abs=1e-12)


def test_projected_length_rejects_zero_direction():
    with pytest.raises(InvalidArgumentError):
        projected_length(build_linear_2d(2, 0.5), (0, 0, 0))


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


directions = st.tuples(*[st.floats(-1, 1) for _ in range(3)]).filter(lambda v: np.linalg.norm(v) > 0.1).map(_unit)


@settings(max_examples=50, deadline=None)
@given(directions, st.tuples(*[st.floats(-10, 10) for _ in range(3)]))
def test_projected_length_translation_invariant(d, offset):
    g = build_linear_3d(6, 0.3, 0.5)
    assert projected_length(g.translated(offset), d) == pytest.approx(projected_length(g, d), abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 8, 25])
@pytest.mark.parametrize("s", [0.2, 0.5])
def test_staggered_row_visible_end_on(n, s):
    # seen along the row, the planar array collapses to a point but the
    # staggered one keeps its vertical extent
    end_fire = (1.0, 0.0, 0.0)
    assert projected_length(build_linear_2d(n, s), end_fire) == pytest.approx(0.0, abs=1e-12)
    assert projected_length(build_linear_3d(n, s, 0.5), end_fire) == pytest.approx(0.5)


@pytest.mark.parametrize("n", [2, 5, 12])
def test_broadside_projection_is_row_length(n):
    assert projected_length(build_linear_3d(n, 0.3, 0.5), (0, 0, 1)) == pytest.approx((n - 1) * 0.3)


@pytest.mark.parametrize(
    "n,s,d",
    [(2, 0.5, _unit([1, 0, 1])), (5, 0.15625, (0.0, 1.0, 0.0))],
)
def test_staggered_projection_can_be_shorter(n, s, d):
    # The principal-axis extent is not monotone in the stagger: the
    # principal axis of the staggered point cloud tilts away from x.
    assert projected_length(build_linear_3d(n, s, 0.5), d) < projected_length(build_linear_2d(n, s), d)
