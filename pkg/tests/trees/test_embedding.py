import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import ParameterError
from src.trees.embedding import (EmbeddingSpec, LayoutParams, embed_tree, invert_thickening,
                                 max_edge_length, min_disjoint_edge_distance, segment_distances,
                                 thicken_eval)
from src.trees.tree import TreePoint, build_tree, glue_at_roots, max_degree, node_point, tree_distance


def _dense_grid_distance(spec, steps=201):
    tree = spec.tree
    grid = np.linspace(0.0, 1.0, steps)
    best = math.inf
    for a, b in itertools.combinations(list(tree.iter_edges()), 2):
        if {a.parent, a.child} & {b.parent, b.child}:
            continue
        pa0, pa1 = spec.segment(a.id)
        pb0, pb1 = spec.segment(b.id)
        sa = pa0 + grid[:, None] * (pa1 - pa0)
        sb = pb0 + grid[:, None] * (pb1 - pb0)
        best = min(best, float(np.linalg.norm(sa[:, None] - sb[None], axis=2).min()))
    return best


def test_single_edge_layout():
    spec = embed_tree(build_tree(2, 0), q=2)
    start, end = spec.segment(0)
    assert end[0] > start[0]
    assert min_disjoint_edge_distance(spec) == math.inf


def test_t21_leaves_spread_in_second_coordinate():
    spec = embed_tree(build_tree(2, 1), q=2)
    leaves = [spec.position(e + 1)[1] for e in spec.tree.daughter_edges(1)]
    assert len(set(leaves)) == 4


def test_d_matches_dense_grid():
    spec = embed_tree(glue_at_roots([build_tree(2, 1)] * 2), q=2)
    assert spec.d == pytest.approx(_dense_grid_distance(spec), abs=2e-2)
    assert spec.d <= _dense_grid_distance(spec) + 1e-12


def test_parallel_segments():
    p0, p1 = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    q0, q1 = np.array([0.0, 1.0]), np.array([1.0, 1.0])
    assert float(segment_distances(p0, p1, q0, q1)) == pytest.approx(1.0)


def test_star_is_planar_in_q3():
    spec = embed_tree(glue_at_roots([build_tree(2, 0)] * 3), q=3)
    for node in spec.tree.iter_nodes():
        assert spec.position(node.id)[2] == 0.0


@pytest.mark.parametrize('n, r', [(2, 2), (3, 1), (1, 3)])
def test_first_coordinate_increases_along_edges(n, r):
    spec = embed_tree(glue_at_roots([build_tree(n, r)] * 2 * (n + 1)), q=2)
    for edge in spec.tree.iter_edges():
        start, end = spec.segment(edge.id)
        assert end[0] - start[0] > 0


def test_window_matches_brute_force():
    spec = embed_tree(glue_at_roots([build_tree(2, 2)] * 6), q=2)
    assert min_disjoint_edge_distance(spec, 'window') == pytest.approx(
        min_disjoint_edge_distance(spec, 'brute'), abs=1e-12)


def test_embedding_rejects_q1():
    with pytest.raises(ParameterError):
        embed_tree(build_tree(2, 1), q=1)


def test_thicken_zero_offset_is_the_tree_point():
    spec = embed_tree(build_tree(2, 1), q=3, M=2.0)
    p = TreePoint(3, 0.25)
    np.testing.assert_allclose(thicken_eval(spec, p, [0.0, 0.0]), spec.point_position(p))


def test_thicken_full_offset_at_root():
    spec = embed_tree(build_tree(2, 1), q=3, M=2.0)
    root = node_point(spec.tree, spec.tree.root)
    y = thicken_eval(spec, root, [2.0, 0.0]) - spec.point_position(root)
    assert y[0] == 0.0
    assert np.linalg.norm(y) == pytest.approx(spec.d / 4)


def test_thicken_rejects_large_offset():
    spec = embed_tree(build_tree(2, 1), q=2, M=1.0)
    with pytest.raises(ParameterError):
        thicken_eval(spec, TreePoint(0, 0.5), [1.5])


def test_to_dict_field_names():
    data = embed_tree(build_tree(2, 1), q=2).to_dict()
    assert {'positions', 'd', 'M'} <= set(data)


GLUED = embed_tree(glue_at_roots([build_tree(3, 1)] * 8), q=2, M=3.0)


@settings(max_examples=200, deadline=None)
@given(edge=st.integers(0, GLUED.tree.edge_count - 1), s=st.floats(0.0, 1.0),
       x=st.floats(-3.0, 3.0))
def test_inversion_finds_the_source(edge, s, x):
    point = TreePoint(edge, s)
    y = thicken_eval(GLUED, point, [x])
    preimages = invert_thickening(GLUED, y)
    assert 1 <= len(preimages) <= max_degree(GLUED.tree)
    assert min(tree_distance(GLUED.tree, point, p) for p, _ in preimages) < 1e-6


@settings(max_examples=100, deadline=None)
@given(e1=st.integers(0, GLUED.tree.edge_count - 1), s1=st.floats(0.0, 1.0),
       e2=st.integers(0, GLUED.tree.edge_count - 1), s2=st.floats(0.0, 1.0),
       x1=st.floats(-3.0, 3.0), x2=st.floats(-3.0, 3.0))
def test_thickening_lipschitz_bound(e1, s1, e2, s2, x1, x2):
    a, b = TreePoint(e1, s1), TreePoint(e2, s2)
    gap = np.linalg.norm(thicken_eval(GLUED, a, [x1]) - thicken_eval(GLUED, b, [x2]))
    bound = (max_edge_length(GLUED) * tree_distance(GLUED.tree, a, b)
             + GLUED.d / (4 * GLUED.M) * abs(x1 - x2))
    assert gap <= bound + 1e-9


def test_far_point_has_no_preimage():
    assert invert_thickening(GLUED, [-10.0, 50.0]) == []


def test_inversion_near_the_end_of_a_long_edge():
    spec = embed_tree(build_tree(2, 1), q=2, layout=LayoutParams(leaf_gap=1e9))
    edge = max(spec.tree.iter_edges(),
               key=lambda e: float(np.linalg.norm(np.subtract(*spec.segment(e.id))))).id
    point = TreePoint(edge, 1.0 - 5e-8)
    preimages = invert_thickening(spec, thicken_eval(spec, point, [0.0]))
    assert len(preimages) == 1
    found, offset = preimages[0]
    assert found.edge == edge
    assert found.s == pytest.approx(point.s, abs=1e-12)
    assert abs(offset[0]) < 1e-3


def test_layout_params_validated():
    with pytest.raises(ParameterError):
        LayoutParams(level_gap=0.0)
    assert isinstance(GLUED, EmbeddingSpec)
