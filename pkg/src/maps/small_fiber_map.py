"""
Small-fibre maps f = phi o (t x p) on the boundary of I^{n+1} (and on S^n).

Every n-face carries a copy of the tree map t_{n,r,delta}; the copies are
glued at their roots, which is where all face boundaries go. p is the
linear projection, phi the thickened tree embedding in R^q.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .charts import BoundaryPoint, face_count, sphere_to_cube
from .projection import ProjectionSpec, build_projection, make_projection
from ..errors import DegeneracyError, ParameterError
from ..slicing.cross_sections import VmaxCertificate, max_cross_section_volume
from ..trees.embedding import (EmbeddingSpec, LayoutParams, embed_tree, invert_thickening,
                               thicken_eval)
from ..trees.tree import Tree, TreePoint, build_tree, canonical, glue_at_roots, is_root, node_point
from ..trees.tree_map import (Box, FiberDescriptor, TreeMapSpec, build_tree_map,
                              eval_tree_map, fiber_faces, fiber_of)

logger = logging.getLogger(__name__)

BUNDLE_SCHEMA = 'smallfibers.bundle/1'


@dataclass(frozen=True)
class SmallFiberMap:
    n: int
    q: int
    epsilon: float
    seed: int
    r: int
    delta: float
    face_map: TreeMapSpec
    tree: Tree
    embedding: EmbeddingSpec
    projection: ProjectionSpec
    vmax: VmaxCertificate

    @property
    def faces(self) -> int:
        return face_count(self.n)

    def to_bundle(self) -> Dict:
        """JSON bundle; rebuilding from it reproduces this map exactly"""
        return {
            'schema': BUNDLE_SCHEMA,
            'n': self.n,
            'q': self.q,
            'epsilon': self.epsilon,
            'seed': self.seed,
            'r': self.r,
            'delta': self.delta,
            'v': [list(v) for v in self.projection.vectors],
            'M': self.projection.M,
            'd': self.embedding.d,
            'resamples': self.projection.resamples,
            'vmax': self.vmax.to_dict(),
            'tree': self.tree.to_dict(materialize=False),
            'embedding': self.embedding.to_dict(),
        }


@dataclass(frozen=True)
class FiberComponent:
    """
    One preimage (p, x) of a point under phi with its fibre under t x p

    face is None for the root, whose fibre under t is the codimension-2
    skeleton of I^{n+1}.
    """
    point: TreePoint
    offset: np.ndarray
    descriptor: Optional[FiberDescriptor]
    face: Optional[int]
    boxes: Tuple[Box, ...]

    def to_dict(self) -> Dict:
        return {
            'point': self.point.to_dict(),
            'offset': np.asarray(self.offset).tolist(),
            'face': self.face,
            'descriptor': self.descriptor.to_dict() if self.descriptor else None,
            'boxes': len(self.boxes),
        }


def choose_parameters(n: int, q: int, epsilon: float, projection: ProjectionSpec,
                      certificate: Optional[VmaxCertificate] = None,
                      resolution: int = 64) -> Tuple[int, float]:
    """
    (r, delta) for a target epsilon

    delta = epsilon / (4(n+1)); r is the least depth with
    V_max * 2^(-r(n-q)) <= epsilon / 2^n.
    """
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n <= q:
        raise ParameterError(f"Parameter choice needs n > q, got n={n}, q={q}")
    if certificate is None:
        certificate = max_cross_section_volume(n, q, projection, resolution)
    delta = epsilon / (4 * (n + 1))
    target = epsilon / 2 ** n
    r = 0
    while certificate.value * 2.0 ** (-r * (n - q)) > target:
        r += 1
    return r, delta


def _assemble(n: int, q: int, epsilon: float, seed: int, r: int, delta: float,
              projection: ProjectionSpec, vmax: VmaxCertificate,
              layout: Optional[LayoutParams] = None) -> SmallFiberMap:
    face_map = build_tree_map(n, r, delta)
    tree = glue_at_roots([build_tree(n, r)] * face_count(n))
    embedding = embed_tree(tree, q, M=projection.M, layout=layout)
    return SmallFiberMap(n=n, q=q, epsilon=epsilon, seed=seed, r=r, delta=delta,
                         face_map=face_map, tree=tree, embedding=embedding,
                         projection=projection, vmax=vmax)


def build_small_fiber_map(n: int, q: int, epsilon: float, seed: int = 0,
                          resolution: int = 64, vectors: Optional[Sequence[Sequence[float]]] = None,
                          layout: Optional[LayoutParams] = None, workers: int = 1) -> SmallFiberMap:
    """
    Assemble f for S^n -> R^q

    Args:
        n: Sphere dimension
        q: Target dimension, n > q > 1
        epsilon: Volume budget in (0, 1)
        seed: Projection seed
        resolution: Offset grid for V_max
        vectors: Injected projection vectors
        layout: Embedding spacing
        workers: Threads for the V_max scan

    Returns:
        SmallFiberMap
    """
    if not n > q > 1:
        raise ParameterError(f"Small-fibre maps need n > q > 1, got n={n}, q={q}")
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")

    logger.info(f"Building small-fibre map n={n} q={q} epsilon={epsilon} seed={seed}")
    projection = build_projection(n, q, seed, vectors=vectors)
    vmax = max_cross_section_volume(n, q, projection, resolution, workers=workers)
    r, delta = choose_parameters(n, q, epsilon, projection, certificate=vmax)
    logger.info(f"Chose r={r}, delta={delta:.6g} from V_max={vmax.value:.6g}")
    fiber_map = _assemble(n, q, epsilon, seed, r, delta, projection, vmax, layout)
    logger.info(f"Glued tree: {len(fiber_map.tree.branches)} branches, "
                f"{fiber_map.tree.edge_count} edges, d={fiber_map.embedding.d:.6g}")
    return fiber_map


def from_bundle(data: Dict) -> SmallFiberMap:
    """
    Rebuild a map from its bundle

    The projection, depth and budget are taken from the bundle; d is
    recomputed and must match.
    """
    if data.get('schema') != BUNDLE_SCHEMA:
        raise ParameterError(f"Unsupported bundle schema: {data.get('schema')!r}")
    try:
        projection = make_projection(data['v'], resamples=int(data.get('resamples', 0)))
        layout = LayoutParams(float(data['embedding']['level_gap']),
                              float(data['embedding']['leaf_gap']))
        fiber_map = _assemble(int(data['n']), int(data['q']), float(data['epsilon']),
                              int(data['seed']), int(data['r']), float(data['delta']),
                              projection, VmaxCertificate.from_dict(data['vmax']), layout)
    except KeyError as e:
        raise ParameterError(f"Bundle is missing key {e}") from e
    if fiber_map.embedding.d != float(data['d']) or fiber_map.projection.M != float(data['M']):
        raise DegeneracyError("Rebuilt embedding does not match the bundle")
    return fiber_map


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

def _as_boundary_point(fiber_map: SmallFiberMap,
                       point: Union[BoundaryPoint, Sequence[float]]) -> BoundaryPoint:
    if isinstance(point, BoundaryPoint):
        if point.n != fiber_map.n:
            raise ParameterError(f"Chart point has {point.n} coordinates, expected {fiber_map.n}")
        return point
    x = np.asarray(point, dtype=float)
    if x.shape != (fiber_map.n + 1,):
        raise ParameterError(f"Expected a unit vector of R^{fiber_map.n + 1}, got shape {x.shape}")
    return sphere_to_cube(x)


def lift_point(fiber_map: SmallFiberMap, face: int, point: TreePoint) -> TreePoint:
    """Move a point of the face tree T_{n,r} onto the glued tree"""
    if is_root(fiber_map.face_map.tree, point):
        return node_point(fiber_map.tree, fiber_map.tree.root)
    _, path = fiber_map.face_map.tree.edge_key(point.edge)
    return TreePoint(fiber_map.tree.edge_id(face, path), point.s)


def tree_part(fiber_map: SmallFiberMap, point: Union[BoundaryPoint, Sequence[float]]) -> TreePoint:
    """t(x) on the glued tree"""
    bp = _as_boundary_point(fiber_map, point)
    return lift_point(fiber_map, bp.face, eval_tree_map(fiber_map.face_map, bp.local))


def eval_f(fiber_map: SmallFiberMap, point: Union[BoundaryPoint, Sequence[float]]) -> np.ndarray:
    """
    f(x) = phi(t(x), p(x))

    Args:
        fiber_map: Assembled map
        point: BoundaryPoint (use charts.cube_point for ambient cube
            coordinates) or a unit vector of R^{n+1}

    Returns:
        Point of R^q
    """
    bp = _as_boundary_point(fiber_map, point)
    tp = lift_point(fiber_map, bp.face, eval_tree_map(fiber_map.face_map, bp.local))
    return thicken_eval(fiber_map.embedding, tp, fiber_map.projection.project(bp.ambient))


def root_fiber_boxes(n: int) -> List[Box]:
    """Codimension-2 skeleton of I^{n+1}: 4 * C(n+1, 2) boxes"""
    boxes = []
    dim = n + 1
    for a in range(dim):
        for b in range(a + 1, dim):
            for sa in (0.0, 1.0):
                for sb in (0.0, 1.0):
                    lo = [0.0] * dim
                    hi = [1.0] * dim
                    lo[a] = hi[a] = sa
                    lo[b] = hi[b] = sb
                    boxes.append(Box(tuple(lo), tuple(hi)))
    return boxes


def component_for(fiber_map: SmallFiberMap, point: TreePoint, offset: np.ndarray) -> FiberComponent:
    tree = fiber_map.tree
    point = canonical(tree, point)
    if point == node_point(tree, tree.root):
        return FiberComponent(point, offset, None, None, tuple(root_fiber_boxes(fiber_map.n)))
    face, path = tree.edge_key(point.edge)
    local = TreePoint(fiber_map.face_map.tree.edge_id(0, path), point.s)
    descriptor = fiber_of(fiber_map.face_map, local)
    axis, side = divmod(face, 2)
    boxes = tuple(box.embed(axis, float(side)) for box in fiber_faces(descriptor))
    return FiberComponent(point, offset, descriptor, face, boxes)


def fiber_of_f(fiber_map: SmallFiberMap, y: Sequence[float]) -> List[FiberComponent]:
    """
    f^{-1}(y) as components (p, x, fibre of t, face)

    The sliced fibre of a component is {z in its boxes : p(z) = x}.
    """
    return [component_for(fiber_map, point, offset)
            for point, offset in invert_thickening(fiber_map.embedding, y)]
