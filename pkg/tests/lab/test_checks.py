import itertools
import math

import numpy as np
import pytest

from src.errors import CoverageError, ParameterError
from src.lab.checks import (MONOTONE_CHUNKS, antipodal_band, check_codim1, check_decomposition,
                            comparison_height, geqnbd_compare)
from src.lab.inventory import codim1_maps
from src.lab.regions import AngularBand, Cap, GreatSphere, PointSet, ScalarMap, Union
from src.lab.volumes import cap_radius_for_volume, cap_volume, draw_sample

NORTH = np.array([1.0, 0.0, 0.0])
EAST = np.array([0.0, 1.0, 0.0])
EPSILONS = (0.05, 0.1, 0.2)


@pytest.fixture(scope='module')
def block():
    return draw_sample(2, 60_000, seed=11)


def test_equator_is_larger_than_a_point(block):
    report = geqnbd_compare(GreatSphere.equatorial(2, 1), PointSet([NORTH]), EPSILONS, 0, block=block)
    assert report.consistent
    assert report.verdict.startswith('consistent with')
    assert [row.epsilon for row in report.rows] == list(EPSILONS)


def test_point_is_not_larger_than_the_equator(block):
    report = geqnbd_compare(PointSet([NORTH]), GreatSphere.equatorial(2, 1), EPSILONS, 0, block=block)
    assert not report.consistent
    assert report.verdict.startswith('inconsistent with')


def test_two_caps_beat_the_ball_of_equal_volume(block):
    two_caps = Union([Cap(NORTH, 0.4), Cap(-NORTH, 0.4)])
    ball = Cap(NORTH, cap_radius_for_volume(2, 2 * cap_volume(2, 0.4)))
    report = geqnbd_compare(two_caps, ball, EPSILONS, 0, block=block)
    assert report.consistent
    data = report.to_dict()
    assert data['E'] == 'union' and data['F'] == 'cap'
    assert len(data['rows']) == 3


def test_comparison_needs_matching_dimensions():
    with pytest.raises(ParameterError):
        geqnbd_compare(Cap([1, 0, 0], 0.1), Cap([1, 0, 0, 0], 0.1), EPSILONS, 1000)
    with pytest.raises(ParameterError):
        geqnbd_compare(Cap(NORTH, 0.1), Cap(NORTH, 0.2), [], 1000)


def test_hemisphere_decomposition(block):
    north = AngularBand(NORTH, 0.0, math.pi / 2, name='north')
    south = AngularBand(NORTH, math.pi / 2, math.pi, name='south')
    report = check_decomposition(north, south, 0.1, 0, block=block)
    assert report.pointwise_mismatches == 0
    assert report.consistent
    assert report.lhs == pytest.approx(report.rhs, abs=1e-12)
    assert report.antipodal.consistent
    assert report.to_dict()['terms']['X']['value'] == pytest.approx(2 * math.pi, rel=0.05)


def test_uncovered_pair_is_reported(block):
    with pytest.raises(CoverageError):
        check_decomposition(Cap(NORTH, 0.5), Cap(-NORTH, 0.5), 0.1, 0, block=block)


def test_pair_without_intersection_oracle(block):
    with pytest.raises(ParameterError):
        check_decomposition(Cap(NORTH, 3.0), Cap(EAST, 3.0), 0.1, 0, block=block)


def test_antipodal_band_of_hemispheres_is_the_equator():
    band = antipodal_band(2, 2 * math.pi, 2 * math.pi)
    assert band.theta_min == pytest.approx(math.pi / 2)
    assert band.theta_max == pytest.approx(math.pi / 2)


def test_comparison_height_range():
    p = comparison_height(3)
    assert p(np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]])).tolist() == [1.0, 0.0]


def test_linear_height_is_the_equality_case(block):
    p = codim1_maps(2)[0]
    report = check_codim1(p, 0.25, 0, block=block)
    assert report.alpha == pytest.approx(0.25, abs=0.01)
    assert report.beta == pytest.approx(0.75, abs=0.01)
    assert report.equality
    assert report.consistent
    assert len(report.comparisons) == 3


def test_plateau_leaves_a_positive_margin(block):
    clamped = next(fn for fn in codim1_maps(2) if fn.name == 'clamped_p')
    report = check_codim1(clamped, 0.25, 0, block=block)
    assert report.alpha == pytest.approx(0.4, abs=1e-6)
    assert report.margin > report.tolerance
    assert report.consistent
    assert 'margin' in report.verdict


def test_inconsistent_evaluations_are_flagged(block):
    calls = itertools.count()

    def flicker(points):
        # alternate chunks see u**3 instead of u during the first pass over the sample
        u = (1.0 + points[:, 0]) / 2.0
        k = next(calls)
        return u ** 3 if k < MONOTONE_CHUNKS and k % 2 else u

    report = check_codim1(ScalarMap(2, flicker, name='flicker'), 0.25, 0, block=block)
    assert 'non_monotone' in report.flags
    assert not report.consistent
    assert report.verdict.startswith('inconsistent')


def test_well_defined_maps_are_not_flagged(block):
    for fn in codim1_maps(2):
        assert 'non_monotone' not in check_codim1(fn, 0.25, 0, block=block).flags


@pytest.mark.parametrize('y', [0.0, 0.6, -0.1])
def test_level_outside_the_lower_half_rejected(y):
    with pytest.raises(ParameterError):
        check_codim1(comparison_height(2), y, 1000)
