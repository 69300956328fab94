"""
Sphere lab: neighbourhood volumes on S^n and the statistical checks built on them
"""
from .regions import (AngularBand, Band, Cap, CloudLevelSet, CloudThresholdSet, GreatSphere,
                      HeightMap, PointSet, RegionOracle, ScalarMap, Union, WholeSphere, split_at)
from .volumes import (NeighborhoodEstimate, SampleBlock, cap_radius_for_volume, cap_volume,
                      draw_sample, equator_tube_volume, exact_volume, nbhd_profile,
                      nbhd_volume_mc, sphere_volume)
from .checks import (ComparisonReport, Codim1Report, DecompositionReport, check_codim1,
                     check_decomposition, comparison_height, geqnbd_compare)
from .inventory import SUITES, SuiteReport, run_suite

__all__ = [
    'AngularBand', 'Band', 'Cap', 'CloudLevelSet', 'CloudThresholdSet', 'GreatSphere',
    'HeightMap', 'PointSet', 'RegionOracle', 'ScalarMap', 'Union', 'WholeSphere', 'split_at',
    'NeighborhoodEstimate', 'SampleBlock', 'cap_radius_for_volume', 'cap_volume', 'draw_sample',
    'equator_tube_volume', 'exact_volume', 'nbhd_profile', 'nbhd_volume_mc', 'sphere_volume',
    'ComparisonReport', 'Codim1Report', 'DecompositionReport', 'check_codim1',
    'check_decomposition', 'comparison_height', 'geqnbd_compare',
    'SUITES', 'SuiteReport', 'run_suite',
]
