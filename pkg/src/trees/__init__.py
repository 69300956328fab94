"""Trees T_{n,r}, their straight-line embeddings and cube-to-tree maps."""
from .tree import (Tree, TreePoint, Edge, Node, build_tree, glue_at_roots, max_degree,
                   canonical, node_point, tree_distance)
from .embedding import (EmbeddingSpec, LayoutParams, embed_tree, thicken_eval,
                        invert_thickening, min_disjoint_edge_distance)
from .tree_map import (TreeMapSpec, FiberKind, FiberDescriptor, Box, build_tree_map,
                       eval_tree_map, fiber_of, fiber_faces, fiber_volume,
                       small_fiber_coverage, exceptional_volume)

__all__ = [
    'Tree', 'TreePoint', 'Edge', 'Node', 'build_tree', 'glue_at_roots', 'max_degree',
    'canonical', 'node_point', 'tree_distance',
    'EmbeddingSpec', 'LayoutParams', 'embed_tree', 'thicken_eval', 'invert_thickening',
    'min_disjoint_edge_distance',
    'TreeMapSpec', 'FiberKind', 'FiberDescriptor', 'Box', 'build_tree_map', 'eval_tree_map',
    'fiber_of', 'fiber_faces', 'fiber_volume', 'small_fiber_coverage', 'exceptional_volume',
]
