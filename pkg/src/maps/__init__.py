"""Maps from S^n (via the cube boundary) to R^q with small fibres."""
from .charts import BoundaryPoint, cube_point, cube_to_sphere, face_chart, sample_boundary, sphere_to_cube
from .projection import ProjectionSpec, build_projection, make_projection, transversality_margin
from .small_fiber_map import (SmallFiberMap, FiberComponent, build_small_fiber_map, choose_parameters,
                              eval_f, fiber_of_f, from_bundle)

__all__ = [
    'BoundaryPoint', 'cube_point', 'cube_to_sphere', 'face_chart', 'sample_boundary', 'sphere_to_cube',
    'ProjectionSpec', 'build_projection', 'make_projection', 'transversality_margin',
    'SmallFiberMap', 'FiberComponent', 'build_small_fiber_map', 'choose_parameters',
    'eval_f', 'fiber_of_f', 'from_bundle',
]
