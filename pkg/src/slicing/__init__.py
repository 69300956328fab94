"""Box slicing, polytope volumes and certified cross-section maxima."""
from .slicer import (HyperplaneSystem, SlicePolytope, SliceEstimate, slice_box, polytope_volume,
                     slice_volume_mc)
from .cross_sections import (VmaxCertificate, FiberVolume, max_cross_section_volume,
                             fiber_total_volume, certified_fiber_bound)

__all__ = [
    'HyperplaneSystem', 'SlicePolytope', 'SliceEstimate', 'slice_box', 'polytope_volume',
    'slice_volume_mc', 'VmaxCertificate', 'FiberVolume', 'max_cross_section_volume',
    'fiber_total_volume', 'certified_fiber_bound',
]
