"""Shared fixtures"""
import pytest

from src.maps.small_fiber_map import _assemble
from src.maps.projection import make_projection
from src.slicing.cross_sections import max_cross_section_volume


@pytest.fixture(scope='session')
def small_map():
    """n=3, q=2 map with an injected projection and a shallow depth"""
    projection = make_projection([[1.0, 2.0, 3.0, 5.0]])
    vmax = max_cross_section_volume(3, 2, projection, resolution=8, refinements=1)
    return _assemble(3, 2, 0.5, 0, 1, 0.5 / 16, projection, vmax)
