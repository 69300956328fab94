import numpy as np
import pytest

from src.errors import ParameterError
from src.maps.charts import (BoundaryPoint, containing_faces, cube_point, cube_to_sphere,
                             face_chart, sample_boundary, sample_sphere, sphere_to_cube)


def test_first_basis_vector_hits_a_face_centre():
    bp = sphere_to_cube([1.0, 0.0, 0.0, 0.0])
    assert (bp.axis, bp.side) == (0, 1)
    assert bp.local == (0.5, 0.5, 0.5)


def test_diagonal_goes_to_a_vertex():
    n = 3
    bp = sphere_to_cube(np.ones(n + 1) / np.sqrt(n + 1))
    np.testing.assert_allclose(bp.ambient, np.ones(n + 1))


def test_round_trip():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5):
        points = sample_sphere(n, 3000, rng)
        back = np.array([cube_to_sphere(sphere_to_cube(x)) for x in points])
        assert np.abs(back - points).max() < 1e-12


def test_chart_and_ambient_agree():
    bp = BoundaryPoint(5, (0.2, 0.9, 0.4))
    ambient = bp.ambient
    assert ambient[2] == 1.0
    assert cube_point(ambient) == bp
    np.testing.assert_array_equal(face_chart(5, bp.local), ambient)


def test_skeleton_points_have_several_charts():
    reps = containing_faces([0.0, 1.0, 0.3])
    assert {bp.face for bp in reps} == {0, 3}


@pytest.mark.parametrize('bad', [[0.0, 0.0, 0.0], [0.6, 0.8, 0.1]])
def test_sphere_rejects_non_unit(bad):
    with pytest.raises(ParameterError):
        sphere_to_cube(bad)


def test_interior_point_rejected():
    with pytest.raises(ParameterError):
        cube_to_sphere([0.5, 0.5, 0.5])


def test_boundary_sampling_shapes():
    faces, local = sample_boundary(3, 100, np.random.default_rng(1))
    assert faces.shape == (100,) and local.shape == (100, 3)
    assert faces.min() >= 0 and faces.max() < 8
