import math

import numpy as np
import pytest

from src.maps.projection import make_projection
from src.slicing.cross_sections import (VmaxCertificate, certified_fiber_bound, face_boundary_boxes,
                                        fiber_total_volume, max_cross_section_volume,
                                        offset_range, section_volume)
from src.maps.small_fiber_map import fiber_of_f, eval_f
from src.maps.charts import BoundaryPoint


def test_face_boundary_boxes_live_in_the_face():
    boxes = face_boundary_boxes(3, axis=1, side=1.0)
    assert len(boxes) == 6
    assert all(b.lo[1] == b.hi[1] == 1.0 for b in boxes)


def test_offset_range():
    lo, hi = offset_range(np.array([[1.0, -2.0, 3.0, 4.0]]), axis=0)
    assert lo.tolist() == [-2.0] and hi.tolist() == [7.0]


def test_section_of_the_unit_square_boundary_counts_points():
    # n = q: the unit square boundary in the face x_0 = 0 of I^3, one line
    vectors = np.array([[0.0, 1.0, 1.0]])
    assert section_volume(2, vectors, 0, [1.0]) == 2.0


def test_section_of_the_unit_cube_boundary():
    # x_3 = 0.5 cuts the boundary of I^3 (in face x_0 = 0) in a square of perimeter 4
    vectors = np.array([[0.0, 0.0, 0.0, 1.0]])
    assert section_volume(3, vectors, 0, [0.5]) == pytest.approx(4.0)


def test_vmax_bounds_the_best_section():
    projection = make_projection([[1.0, 1.0, 1.0, 1.0]])
    cert = max_cross_section_volume(3, 2, projection, resolution=16, refinements=2)
    assert cert.value >= cert.best > 0
    assert cert.dimension == 1
    lo, hi = offset_range(projection.matrix, cert.axis)
    grid = np.linspace(lo[0], hi[0], 101)
    sampled = max(section_volume(3, projection.matrix, axis, [c]) for axis in range(4) for c in grid)
    assert sampled <= cert.value + 1e-9


def test_vmax_scaling():
    cert = VmaxCertificate(2.0, 1.9, 0.1, 1.0, 8, 0.1, 0, (0.0,), 2, 10)
    assert cert.scaled(0.5) == pytest.approx(0.5)
    assert VmaxCertificate.from_dict(cert.to_dict()) == cert


def test_sliced_fibre_volume_is_bounded(small_map):
    bound = certified_fiber_bound(small_map)
    rng = np.random.default_rng(9)
    for _ in range(200):
        bp = BoundaryPoint(int(rng.integers(8)), tuple(rng.random(3)))
        measured = fiber_total_volume(fiber_of_f(small_map, eval_f(small_map, bp)),
                                      small_map.projection)
        assert measured.components >= 1
        assert measured.volume <= bound
        assert math.isfinite(measured.volume)
