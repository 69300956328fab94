import math

import numpy as np
import pytest

from src.errors import ParameterError
from src.lab.inventory import smooth_map
from src.lab.regions import (AngularBand, Band, Cap, CloudLevelSet, CloudThresholdSet, GreatSphere,
                             HeightMap, PointSet, Union, WholeSphere, split_at, trace_level_points)

NORTH = np.array([1.0, 0.0, 0.0])
SOUTH = -NORTH
POINTS = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])


def test_cap_distances():
    np.testing.assert_allclose(Cap(NORTH, 0.5).distance(POINTS), [0.0, math.pi / 2 - 0.5, math.pi - 0.5])


def test_great_sphere_distances():
    equator = GreatSphere.equatorial(2, 1)
    np.testing.assert_allclose(equator.distance(POINTS), [math.pi / 2, 0.0, math.pi / 2], atol=1e-12)
    assert equator.k == 1


def test_band_and_union():
    tube = Band(GreatSphere.equatorial(2, 1), 0.2)
    assert tube.distance(POINTS)[0] == pytest.approx(math.pi / 2 - 0.2)
    both = Union([Cap(NORTH, 0.1), Cap(SOUTH, 0.1)])
    np.testing.assert_allclose(both.distance(POINTS), [0.0, math.pi / 2 - 0.1, 0.0], atol=1e-12)


def test_point_set_membership():
    assert PointSet([NORTH]).contains(POINTS).tolist() == [True, False, False]


def test_hemispheres_meet_in_the_equator():
    north = AngularBand(NORTH, 0.0, math.pi / 2)
    south = AngularBand(SOUTH, 0.0, math.pi / 2)
    both = north.intersect(south)
    assert both.theta_min == pytest.approx(math.pi / 2) and both.theta_max == pytest.approx(math.pi / 2)
    assert AngularBand(NORTH, 0.0, 0.3).intersect(AngularBand(SOUTH, 0.0, 0.3)) is None
    assert north.intersect(AngularBand([0.0, 1.0, 0.0], 0.0, 1.0)) is None
    assert WholeSphere(2).intersect(north) is north


def test_band_angles_validated():
    with pytest.raises(ParameterError):
        AngularBand(NORTH, 1.0, 0.5)
    with pytest.raises(ParameterError):
        Cap(NORTH, 4.0)


def test_height_map_sets_are_bands():
    p = HeightMap(NORTH, lambda h: (1.0 + h) / 2.0, name='p')
    level = p.level_set(0.5)
    assert level.theta_min == pytest.approx(math.pi / 2) and level.theta_max == pytest.approx(math.pi / 2)
    sub = p.sublevel_set(0.5)
    assert sub.theta_max == math.pi
    assert p.sublevel_volume_fraction(0.25) == pytest.approx(0.25, abs=1e-9)
    with pytest.raises(ParameterError):
        p.level_set(2.0)


def test_plateau_gives_a_thick_level_set():
    clamped = HeightMap(NORTH, lambda h: np.maximum((1.0 + h) / 2.0, 0.4))
    lo, hi = clamped.height_interval(0.4)
    assert lo == -1.0
    assert hi == pytest.approx(-0.2, abs=1e-9)
    level = clamped.level_set(0.4)
    assert level.theta_max == math.pi
    assert level.theta_min == pytest.approx(math.acos(-0.2), abs=1e-8)


def test_traced_points_lie_on_the_level_set():
    fn = smooth_map(2, seed=0)
    points = trace_level_points(fn, 0.0, circles=50, seed=1)
    assert np.abs(fn(points)).max() < 1e-9
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0)


def test_unattained_level_reports_no_points():
    fn = smooth_map(2, seed=0)
    with pytest.raises(ParameterError):
        trace_level_points(fn, 1e6, circles=10, seed=0)


def test_cloud_level_set_resolution():
    fn = smooth_map(2, seed=0)
    level = CloudLevelSet(fn, 0.0, circles=2000, seed=3)
    assert level.resolution < 0.05
    assert level.distance(level.points[:10]).max() == pytest.approx(0.0, abs=1e-12)
    assert level.name == 'smooth0=0'


def test_split_shares_its_boundary():
    fn = smooth_map(2, seed=0)
    below, above = split_at(fn, 0.0, circles=300, seed=0)
    assert isinstance(below, CloudThresholdSet) and isinstance(above, CloudThresholdSet)
    assert below.intersect(above) is below.boundary is above.boundary
    inside = below.contains(POINTS) | above.contains(POINTS)
    assert inside.all()


def test_split_of_a_height_map_is_exact():
    below, above = split_at(HeightMap(NORTH), 0.0)
    assert isinstance(below, AngularBand) and isinstance(above, AngularBand)
    assert below.intersect(above).theta_min == pytest.approx(math.pi / 2)
