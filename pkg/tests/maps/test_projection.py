import itertools

import numpy as np
import pytest

from src.errors import ParameterError, ProjectionError
from src.maps.projection import (ProjectionSpec, build_projection, is_transverse, make_projection,
                                 min_singular_value, pair_matrix, transversality_margin)


def test_all_ones_accepted_with_vertex_radius_4():
    spec = make_projection([[1.0, 1.0, 1.0, 1.0]])
    assert spec.M == 4.0
    assert spec.q == 2 and spec.n == 3


def test_coordinate_vector_rejected():
    with pytest.raises(ProjectionError):
        make_projection([[1.0, 0.0, 0.0, 0.0]])


def test_margin_zero_for_dependent_set():
    spec = ProjectionSpec(vectors=((1.0, 0.0, 0.0, 0.0),), M=1.0)
    assert transversality_margin(spec) == pytest.approx(0.0, abs=1e-15)


def test_margin_matches_pairwise_minimum():
    v = np.array([[0.5, 0.5, 0.5, 0.5]])
    spec = make_projection(v)
    brute = min(np.linalg.svd(pair_matrix(v, i, j) / np.linalg.norm(pair_matrix(v, i, j), axis=0),
                              compute_uv=False).min()
                for i, j in itertools.combinations(range(4), 2))
    assert transversality_margin(spec) == pytest.approx(brute, abs=1e-12)
    assert transversality_margin(spec) > 0


def test_orthonormal_columns_have_margin_one():
    assert min_singular_value(np.eye(4)[:, :3]) == pytest.approx(1.0)


def test_seeded_draws_are_reproducible():
    assert build_projection(3, 2, seed=7) == build_projection(3, 2, seed=7)


def test_two_vectors_for_q3():
    spec = build_projection(3, 3, seed=0)
    assert spec.matrix.shape == (2, 4)
    assert is_transverse(spec.matrix)


def test_square_projection_for_q_equal_n():
    spec = build_projection(2, 2, seed=0)
    assert spec.matrix.shape == (1, 3)
    assert transversality_margin(spec) > 0


@pytest.mark.parametrize('n, q', [(2, 3), (3, 1), (3, 4)])
def test_dimension_range(n, q):
    with pytest.raises(ParameterError):
        build_projection(n, q)


def test_injected_shape_checked():
    with pytest.raises(ParameterError):
        build_projection(4, 2, vectors=[[1.0, 2.0, 3.0, 4.0]])
