import math

import numpy as np
import pytest

from graspforge.dynamics.collision import PLANE, POLYGON, collide_py, segment_segment

GROUND = np.array([[0.0, 0.0], [0.0, 1.0]])


def box(cx, cy, w, h, angle=0.0):
    pts = np.array([[-w / 2, -h / 2], [w / 2, -h / 2], [w / 2, h / 2], [-w / 2, h / 2]])
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return pts @ rot.T + [cx, cy]


def test_box_resting_on_plane_two_points():
    out = collide_py(PLANE, GROUND, 0.0, POLYGON, box(0, 0.0049, 0.05, 0.01), 0.0)
    assert len(out) == 2
    assert np.allclose(out[:, 4], 0.0001)
    assert np.allclose(out[:, 2:4], [0, 1])
    assert sorted(out[:, 0]) == pytest.approx([-0.025, 0.025])


def test_box_above_plane_outside_margin():
    assert len(collide_py(PLANE, GROUND, 0.0, POLYGON, box(0, 0.1, 0.05, 0.01), 0.0, margin=0.001)) == 0
    spec = collide_py(PLANE, GROUND, 0.0, POLYGON, box(0, 0.0055, 0.05, 0.01), 0.0, margin=0.001)
    assert len(spec) == 2 and np.allclose(spec[:, 4], -0.0005)


def test_circle_on_plane():
    out = collide_py(PLANE, GROUND, 0.0, POLYGON, [[0.3, 0.039]], 0.04)
    assert len(out) == 1
    assert out[0, 4] == pytest.approx(0.001)
    assert out[0, 0] == pytest.approx(0.3)


def test_face_to_face_boxes():
    a = box(0, 0, 0.02, 0.02)
    b = box(0.0195, 0.005, 0.02, 0.02)
    out = collide_py(POLYGON, a, 0.0, POLYGON, b, 0.0)
    assert len(out) == 2
    assert np.allclose(out[:, 2:4], [1, 0])
    assert np.allclose(out[:, 4], 0.0005)


def test_normal_points_from_a_to_b_when_b_is_reference():
    small = box(0.0, 0.0, 0.01, 0.01)
    big = box(0.0, -0.0549, 0.2, 0.1)
    out = collide_py(POLYGON, small, 0.0, POLYGON, big, 0.0)
    assert len(out) >= 1
    assert np.allclose(out[:, 2:4], [0, -1])
    assert np.allclose(out[:, 4], 0.0001, atol=1e-9)


def test_rounded_corner_contact_uses_vertex_direction():
    # two rounded squares touching corner to corner along the diagonal
    r = 0.002
    a = box(0, 0, 0.01, 0.01)
    b = box(0.01 + 2 * r / math.sqrt(2) - 0.0001, 0.01 + 2 * r / math.sqrt(2) - 0.0001, 0.01, 0.01)
    out = collide_py(POLYGON, a, r, POLYGON, b, r)
    assert len(out) == 1
    assert out[0, 2] == pytest.approx(1 / math.sqrt(2), rel=1e-6)
    assert out[0, 3] == pytest.approx(1 / math.sqrt(2), rel=1e-6)
    assert out[0, 4] == pytest.approx(0.0001 * math.sqrt(2), rel=1e-6)


def test_circle_against_box_side():
    b = box(0, 0, 0.02, 0.02)
    out = collide_py(POLYGON, b, 0.0, POLYGON, [[0.0139, 0.0]], 0.004)
    assert len(out) == 1
    assert np.allclose(out[0, 2:4], [1, 0])
    assert out[0, 4] == pytest.approx(0.0001)
    flipped = collide_py(POLYGON, [[0.0139, 0.0]], 0.004, POLYGON, b, 0.0)
    assert np.allclose(flipped[0, 2:4], [-1, 0])
    assert flipped[0, 0] == pytest.approx(out[0, 0])


def test_circle_center_inside_box():
    b = box(0, 0, 0.02, 0.02)
    out = collide_py(POLYGON, b, 0.0, POLYGON, [[0.008, 0.0]], 0.004)
    assert np.allclose(out[0, 2:4], [1, 0])
    assert out[0, 4] == pytest.approx(0.006)


def test_tilted_box_single_corner():
    out = collide_py(PLANE, GROUND, 0.0, POLYGON, box(0, 0.001, 0.02, 0.02, math.pi / 4), 0.0)
    assert len(out) == 1
    assert out[0, 4] == pytest.approx(0.01 * math.sqrt(2) - 0.001)


def test_segment_segment_crossing_and_parallel():
    s, t, ax, ay, bx, by = segment_segment(0, 0, 1, 0, 0.5, 1, 0.5, 2)
    assert (s, t) == pytest.approx((0.5, 0.0))
    s, t, ax, ay, bx, by = segment_segment(0, 0, 1, 0, 2, 1, 3, 1)
    assert (s, t) == pytest.approx((1.0, 0.0))
    assert math.hypot(bx - ax, by - ay) == pytest.approx(math.sqrt(2))
