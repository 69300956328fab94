import math

import numpy as np
import pytest

from src.errors import ParameterError
from src.lab.regions import AngularBand, Cap, GreatSphere, PointSet, WholeSphere
from src.lab.volumes import (SampleBlock, band_neighbourhood_volume, band_volume,
                             cap_radius_for_volume, cap_volume, draw_sample, equator_tube_volume,
                             exact_volume, nbhd_profile, nbhd_volume_mc, region_volume_mc,
                             sphere_volume)

NORTH = np.array([1.0, 0.0, 0.0])


@pytest.mark.parametrize('n, expected', [(0, 2.0), (1, 2 * math.pi), (2, 4 * math.pi),
                                         (3, 2 * math.pi ** 2)])
def test_sphere_volume(n, expected):
    assert sphere_volume(n) == pytest.approx(expected, rel=1e-14)


def test_cap_volumes_on_s2():
    assert cap_volume(2, math.pi / 2) == pytest.approx(2 * math.pi, rel=1e-12)
    assert cap_volume(2, math.pi) == pytest.approx(4 * math.pi, rel=1e-12)
    assert cap_volume(2, 0.3) == pytest.approx(2 * math.pi * (1 - math.cos(0.3)), rel=1e-12)


@pytest.mark.parametrize('epsilon', [0.05, 0.3, 1.0])
def test_equator_band_on_s2(epsilon):
    assert equator_tube_volume(2, 1, epsilon) == pytest.approx(4 * math.pi * math.sin(epsilon), rel=1e-12)


def test_tube_around_a_point_is_a_cap():
    assert equator_tube_volume(3, 3, 0.4) == pytest.approx(2 * cap_volume(3, 0.4), rel=1e-12)


@pytest.mark.parametrize('n, q, epsilon', [(2, 3, 0.1), (2, 1, 0.0), (2, 1, 2.0)])
def test_tube_parameters_checked(n, q, epsilon):
    with pytest.raises(ParameterError):
        equator_tube_volume(n, q, epsilon)


@pytest.mark.parametrize('n', [1, 2, 4])
def test_cap_radius_inverts_cap_volume(n):
    for radius in (0.1, 1.0, 2.5):
        assert cap_radius_for_volume(n, cap_volume(n, radius)) == pytest.approx(radius, abs=1e-10)


def test_sample_is_reproducible_across_workers():
    one = draw_sample(2, 70_000, seed=5, workers=1)
    many = draw_sample(2, 70_000, seed=5, workers=4)
    np.testing.assert_array_equal(one.points, many.points)
    assert np.allclose(np.linalg.norm(one.points, axis=1), 1.0)


def test_too_few_samples_rejected():
    with pytest.raises(ParameterError):
        draw_sample(2, 10)


def test_equator_neighbourhood_matches_the_band_formula():
    equator = GreatSphere.equatorial(2, 1)
    for estimate in nbhd_profile(equator, [0.05, 0.1, 0.2], 100_000, seed=1):
        exact = 4 * math.pi * math.sin(estimate.epsilon)
        assert abs(estimate.estimate - exact) <= 4 * estimate.stderr


def test_point_neighbourhood_is_a_cap():
    estimate = nbhd_volume_mc(PointSet([NORTH]), 0.5, 100_000, seed=2)
    assert abs(estimate.estimate - cap_volume(2, 0.5)) <= 4 * estimate.stderr
    assert not estimate.coarse


def test_non_positive_radius_rejected():
    with pytest.raises(ParameterError):
        nbhd_volume_mc(WholeSphere(2), 0.0, 1000)


def test_block_caches_distances_per_region():
    block = draw_sample(2, 1000, seed=0)
    cap = Cap(NORTH, 0.3)
    first = block.distances(cap)
    assert block.distances(cap) is first
    assert block.distances(Cap(NORTH, 0.3)) is not first


def test_region_volume_of_a_hemisphere():
    block = draw_sample(2, 50_000, seed=3)
    estimate = region_volume_mc(Cap(NORTH, math.pi / 2), block)
    assert abs(estimate.estimate - 2 * math.pi) <= 4 * estimate.stderr


def test_exact_volumes():
    assert exact_volume(WholeSphere(2)) == pytest.approx(4 * math.pi)
    assert exact_volume(AngularBand(NORTH, 0.2, 0.9)) == pytest.approx(band_volume(2, 0.2, 0.9))
    assert exact_volume(GreatSphere.equatorial(2, 1)) == 0.0
    assert exact_volume(PointSet([NORTH])) == 0.0


def test_estimate_dict():
    data = nbhd_volume_mc(Cap(NORTH, 0.2), 0.1, 1000).to_dict()
    assert {'epsilon', 'samples', 'estimate', 'stderr', 'coarse'} <= set(data)
    assert isinstance(draw_sample(2, 1000), SampleBlock)


def test_band_neighbourhood_matches_monte_carlo():
    band = AngularBand(NORTH, 0.5, 1.0)
    estimate = nbhd_volume_mc(band, 0.2, 100_000, seed=6)
    exact = band_neighbourhood_volume(2, 0.5, 1.0, 0.2)
    assert exact == pytest.approx(band_volume(2, 0.3, 1.2))
    assert abs(estimate.estimate - exact) <= 4 * estimate.stderr
