import math

import numpy as np
import pytest

from src.slicing.slicer import (HyperplaneSystem, SlicePolytope, polytope_volume, slice_box,
                                slice_volume_mc)
from src.trees.tree_map import Box

UNIT_SQUARE = Box((0.0, 0.0), (1.0, 1.0))
UNIT_CUBE = Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
DIAGONAL = HyperplaneSystem.from_arrays([[1.0, 1.0]], [1.0])
CENTRAL = HyperplaneSystem.from_arrays([[1.0, 1.0, 1.0]], [1.5])


def test_square_diagonal():
    poly = slice_box(UNIT_SQUARE, DIAGONAL)
    assert poly.dim == 1
    assert len(poly.vertices) == 2
    assert polytope_volume(poly) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_central_hexagon():
    poly = slice_box(UNIT_CUBE, CENTRAL)
    assert len(poly.vertices) == 6
    assert polytope_volume(poly) == pytest.approx(3 * math.sqrt(3) / 4, abs=1e-9)


def test_missed_box_is_empty():
    poly = slice_box(UNIT_SQUARE, HyperplaneSystem.from_arrays([[1.0, 1.0]], [3.0]))
    assert poly.is_empty
    assert polytope_volume(poly) == 0.0


def test_corner_contact_has_measure_zero():
    poly = slice_box(UNIT_SQUARE, HyperplaneSystem.from_arrays([[1.0, 1.0]], [2.0]))
    assert polytope_volume(poly) == 0.0


def test_point_slice_of_a_segment():
    segment = Box((0.0, 0.0), (1.0, 0.0))
    poly = slice_box(segment, HyperplaneSystem.from_arrays([[1.0, 2.0]], [0.25]))
    assert poly.dim == 0
    np.testing.assert_allclose(poly.vertices, [[0.25, 0.0]])


def test_fixed_axes_are_respected():
    face = Box((0.0, 0.0, 1.0), (1.0, 1.0, 1.0))
    poly = slice_box(face, HyperplaneSystem.from_arrays([[1.0, 1.0, 1.0]], [2.0]))
    assert polytope_volume(poly) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_two_planes_through_a_cube():
    system = HyperplaneSystem.from_arrays([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [0.5, 0.5])
    poly = slice_box(UNIT_CUBE, system)
    assert poly.dim == 1
    assert polytope_volume(poly) == pytest.approx(1.0)


def test_monte_carlo_diagonal():
    estimate = slice_volume_mc(UNIT_SQUARE, DIAGONAL, tau=1e-3, samples=1_000_000, seed=1)
    assert abs(estimate.value - math.sqrt(2)) <= 3 * estimate.stderr + 1e-3


def test_monte_carlo_hexagon():
    estimate = slice_volume_mc(UNIT_CUBE, CENTRAL, tau=1e-2, samples=1_000_000, seed=2)
    assert abs(estimate.value - 1.299) <= 3 * estimate.stderr + 5e-3


def test_monte_carlo_flags_zero_hits():
    estimate = slice_volume_mc(UNIT_SQUARE, HyperplaneSystem.from_arrays([[1.0, 1.0]], [5.0]),
                               tau=1e-3, samples=1000)
    assert estimate.zero_hits and estimate.value == 0.0


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(100))
def test_exact_and_monte_carlo_agree(seed):
    # n in 2..5 and k = q - 1 in {1, 2}, cycled by seed
    n = 2 + seed % 4
    k = min(1 + (seed // 4) % 2, n - 1)
    rng = np.random.default_rng(seed)
    lo = rng.random(n) * 0.2
    box = Box(tuple(lo), tuple(lo + 0.5 + rng.random(n)))
    normals = rng.standard_normal((k, n))
    centre = (np.array(box.lo) + np.array(box.hi)) / 2
    system = HyperplaneSystem.from_arrays(normals, normals @ (centre + 0.1 * rng.standard_normal(n)))
    exact = polytope_volume(slice_box(box, system))
    tau = 2e-3 if k == 1 else 5e-2
    estimate = slice_volume_mc(box, system, tau=tau, samples=400_000, seed=seed)
    assert abs(exact - estimate.value) <= 3 * estimate.stderr + 0.1 * exact + 1e-3


def test_two_lines_meet_in_one_point():
    lines = HyperplaneSystem.from_arrays([[1.0, 0.0], [1.0, 1.0]], [0.25, 1.0])
    poly = slice_box(UNIT_SQUARE, lines)
    assert poly.dim == 0
    np.testing.assert_allclose(poly.vertices, [[0.25, 0.75]])
    assert polytope_volume(poly) == 0.0


def test_empty_polytope_volume():
    assert polytope_volume(SlicePolytope(np.zeros((0, 2)), 1)) == 0.0
