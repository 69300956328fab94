import dataclasses

import numpy as np
import pytest

from src.errors import ParameterError
from src.maps.charts import containing_faces, cube_point, sample_boundary, BoundaryPoint
from src.maps.small_fiber_map import (build_small_fiber_map, choose_parameters, eval_f,
                                      fiber_of_f, from_bundle, root_fiber_boxes, tree_part)
from src.trees.tree import is_root, max_degree, node_point


def test_glued_tree_has_a_branch_per_face(small_map):
    assert len(small_map.tree.branches) == 8
    assert max_degree(small_map.tree) == 9


def test_choose_parameters(small_map):
    r, delta = choose_parameters(3, 2, 0.1, small_map.projection, certificate=small_map.vmax)
    assert delta == pytest.approx(0.00625)
    assert delta < 0.1 / 8
    target = 0.1 / 8
    assert small_map.vmax.value * 2.0 ** -r <= target
    assert r == 0 or small_map.vmax.value * 2.0 ** -(r - 1) > target


def test_choose_parameters_depth_zero(small_map):
    tiny = dataclasses.replace(small_map.vmax, value=0.01)
    assert choose_parameters(3, 2, 0.5, small_map.projection, certificate=tiny)[0] == 0


def test_root_fibre_is_the_codim2_skeleton():
    assert len(root_fiber_boxes(3)) == 4 * 6


def test_face_boundary_point_goes_to_the_root(small_map):
    x = np.array([0.0, 0.0, 0.3, 0.7])
    assert is_root(small_map.tree, tree_part(small_map, cube_point(x)))
    p = small_map.projection.project(x)
    root = small_map.embedding.position(small_map.tree.root)
    expected = root.copy()
    expected[1:] += small_map.embedding.d / 4 * p / small_map.projection.M
    np.testing.assert_allclose(eval_f(small_map, cube_point(x)), expected, atol=1e-15)


def test_all_charts_agree_on_the_skeleton(small_map):
    rng = np.random.default_rng(2)
    for _ in range(200):
        y = rng.random(4)
        y[0], y[2] = 1.0, 0.0
        images = [eval_f(small_map, bp) for bp in containing_faces(y)]
        assert len(images) == 2
        assert np.array_equal(images[0], images[1])


def test_face_centre_lands_on_its_trunk(small_map):
    bp = BoundaryPoint(3, (0.5, 0.5, 0.5))
    point = tree_part(small_map, bp)
    assert small_map.tree.edge_key(point.edge)[0] == 3


def test_sphere_input(small_map):
    x = np.array([0.0, 0.6, 0.0, 0.8])
    assert eval_f(small_map, x).shape == (2,)
    with pytest.raises(ParameterError):
        eval_f(small_map, [0.0, 0.6, 0.0])


def test_root_image_preimages_touch_the_root(small_map):
    root = node_point(small_map.tree, small_map.tree.root)
    y = small_map.embedding.point_position(root)
    components = fiber_of_f(small_map, y)
    assert 1 <= len(components) <= 8
    assert any(c.face is None for c in components)


def test_far_point_has_an_empty_fibre(small_map):
    assert fiber_of_f(small_map, [-5.0, 100.0]) == []


def test_inversion_is_sound_and_bounded(small_map):
    faces, local = sample_boundary(3, 1000, np.random.default_rng(4))
    limit = max_degree(small_map.tree)
    for face, row in zip(faces, local):
        bp = BoundaryPoint(int(face), tuple(row))
        x = bp.ambient
        components = fiber_of_f(small_map, eval_f(small_map, bp))
        assert len(components) <= limit
        px = small_map.projection.project(x)
        assert any(np.allclose(c.offset, px, atol=1e-8)
                   and any(box.contains(x, tol=1e-9) for box in c.boxes)
                   for c in components)


def test_bundle_round_trip(small_map):
    bundle = small_map.to_bundle()
    rebuilt = from_bundle(bundle)
    assert rebuilt.embedding.d == small_map.embedding.d
    x = BoundaryPoint(6, (0.1, 0.8, 0.35))
    assert np.array_equal(eval_f(rebuilt, x), eval_f(small_map, x))


def test_bundle_schema_checked(small_map):
    bundle = dict(small_map.to_bundle(), schema='other/1')
    with pytest.raises(ParameterError):
        from_bundle(bundle)


@pytest.mark.parametrize('n, q, epsilon', [(2, 2, 0.1), (3, 3, 0.1), (3, 2, 1.0), (3, 2, 0.0)])
def test_build_rejects_bad_parameters(n, q, epsilon):
    with pytest.raises(ParameterError):
        build_small_fiber_map(n, q, epsilon)


@pytest.mark.slow
def test_build_n3_q2():
    fiber_map = build_small_fiber_map(3, 2, 0.1, seed=0, resolution=16)
    assert len(fiber_map.tree.branches) == 8
    assert fiber_map.delta == pytest.approx(0.00625)
    assert fiber_map.embedding.d > 0


@pytest.mark.slow
def test_build_n4_q2():
    assert len(build_small_fiber_map(4, 2, 0.5, seed=0, resolution=8).tree.branches) == 10
