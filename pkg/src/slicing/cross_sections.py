"""
Cross-sections of cube boundaries and sliced fibre volumes.

V_max is the largest (n-q)-volume of {x in boundary of I^n : V x = c} over
all offsets c, with the unit cube sitting in a face of I^{n+1}. It is found
by a grid scan over the achievable offsets followed by branch-and-bound
refinement; the reported value adds a Lipschitz padding so that it bounds
the supremum, not just the best sample.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .slicer import DEDUP_TOL, HyperplaneSystem, polytope_volume, slice_box, _dedupe
from ..errors import ParameterError
from ..trees.tree import max_degree
from ..trees.tree_map import Box, cube_boundary_boxes
from ..utils.parallel import chunked_map

logger = logging.getLogger(__name__)

# Finite-difference slope estimates are multiplied by this before padding
LIPSCHITZ_SAFETY = 2.0

# Cells split per refinement round
MAX_SPLIT = 256


@dataclass
class VmaxCertificate:
    """Certified upper bound on unit-scale cross-section volumes"""
    value: float
    best: float
    padding: float
    lipschitz: float
    resolution: int
    final_spacing: float
    axis: int
    offset: Tuple[float, ...]
    dimension: int
    evaluations: int
    counting: bool = False

    def scaled(self, factor: float) -> float:
        """Bound for the boundary of a cube of side `factor`"""
        return self.value * factor ** self.dimension

    def to_dict(self) -> Dict:
        return {
            'value': self.value,
            'best': self.best,
            'padding': self.padding,
            'lipschitz': self.lipschitz,
            'resolution': self.resolution,
            'final_spacing': self.final_spacing,
            'axis': self.axis,
            'offset': list(self.offset),
            'dimension': self.dimension,
            'evaluations': self.evaluations,
            'counting': self.counting,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'VmaxCertificate':
        data = dict(data)
        data['offset'] = tuple(data['offset'])
        return cls(**data)


@dataclass
class FiberVolume:
    volume: float = 0.0
    cardinality: int = 0
    components: int = 0
    degenerate: int = 0
    slices: int = 0

    def to_dict(self) -> Dict:
        return {'volume': self.volume, 'cardinality': self.cardinality,
                'components': self.components, 'degenerate': self.degenerate,
                'slices': self.slices}


def face_boundary_boxes(n: int, axis: int, side: float = 0.0,
                        corner: Optional[Sequence[float]] = None, scale: float = 1.0) -> List[Box]:
    """Boundary of an n-cube placed in the face x_axis = side of I^{n+1}"""
    corner = np.zeros(n) if corner is None else np.asarray(corner, dtype=float)
    return [b.embed(axis, side) for b in cube_boundary_boxes(corner, scale)]


def offset_range(vectors: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Achievable V x over the face x_axis = 0"""
    others = np.delete(vectors, axis, axis=1)
    return np.minimum(others, 0).sum(axis=1), np.maximum(others, 0).sum(axis=1)


def section_measure(boxes: Sequence[Box], system: HyperplaneSystem) -> Tuple[float, int, int]:
    """
    Total slice volume over boxes

    Returns:
        (volume, point count for 0-dimensional slices, degenerate slices)
    """
    volume = 0.0
    points = []
    degenerate = 0
    for idx, box in enumerate(boxes):
        poly = slice_box(box, system, idx)
        degenerate += int(poly.degenerate)
        if poly.is_empty:
            continue
        if poly.dim == 0:
            points.append(poly.vertices)
        else:
            volume += polytope_volume(poly)
    count = len(_dedupe(np.vstack(points), DEDUP_TOL)) if points else 0
    return volume, count, degenerate


def section_volume(n: int, vectors: np.ndarray, axis: int, offset: Sequence[float]) -> float:
    """Cross-section volume (or point count when n = q) of the unit boundary in face `axis`"""
    system = HyperplaneSystem.from_arrays(vectors, offset)
    volume, count, _ = section_measure(face_boundary_boxes(n, axis), system)
    return float(count) if vectors.shape[0] == n - 1 else volume


def _grid(lo: np.ndarray, hi: np.ndarray, resolution: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cell centres (resolution^k rows) and the cell half-widths"""
    half = (hi - lo) / (2 * resolution)
    axes = [lo[i] + half[i] * (2 * np.arange(resolution) + 1) for i in range(len(lo))]
    centres = np.array(list(itertools.product(*axes)))
    return centres, half


def _grid_lipschitz(values: np.ndarray, half: np.ndarray, resolution: int) -> float:
    shaped = values.reshape((resolution,) * len(half))
    slope = 0.0
    for dim in range(len(half)):
        if resolution < 2 or half[dim] == 0:
            continue
        diffs = np.abs(np.diff(shaped, axis=dim))
        slope = max(slope, float(diffs.max()) / (2 * half[dim]))
    return slope


def max_cross_section_volume(n: int, q: int, projection, resolution: int = 64,
                             refinements: int = 4, workers: int = 1) -> VmaxCertificate:
    """
    Certified V_max for the unit boundary of I^n under a projection

    Args:
        n: Cube dimension (the face of I^{n+1})
        q: Target dimension; q - 1 hyperplanes
        projection: ProjectionSpec (or anything with a .matrix of shape (q-1, n+1))
        resolution: Grid cells per offset dimension
        refinements: Branch-and-bound rounds
        workers: Threads for the grid scan

    Returns:
        VmaxCertificate; value >= best evaluated volume
    """
    vectors = np.atleast_2d(np.asarray(projection.matrix, dtype=float))
    if vectors.shape != (q - 1, n + 1):
        raise ParameterError(f"Projection shape {vectors.shape} does not match n={n}, q={q}")
    if resolution < 2:
        raise ParameterError("resolution must be at least 2")
    dimension = n - q
    counting = dimension == 0

    overall: Optional[VmaxCertificate] = None
    total_evaluations = 0
    for axis in range(n + 1):
        lo, hi = offset_range(vectors, axis)
        centres, half = _grid(lo, hi, resolution)

        def evaluate(c, axis=axis):
            return section_volume(n, vectors, axis, c)

        values = np.array(chunked_map(evaluate, list(centres), workers))
        total_evaluations += len(values)
        best_idx = int(np.argmax(values))
        best = float(values[best_idx])
        best_offset = centres[best_idx]

        if counting:
            cert = VmaxCertificate(best, best, 0.0, 0.0, resolution, float(2 * half.max()),
                                   axis, tuple(best_offset.tolist()), 0, 0, True)
        else:
            lipschitz = LIPSCHITZ_SAFETY * _grid_lipschitz(values, half, resolution)

            def upper(cell) -> float:
                return cell[2] + lipschitz * float(np.linalg.norm(cell[1]))

            cells = [(c, half.copy(), float(v)) for c, v in zip(centres, values)]
            for _ in range(refinements):
                open_cells = sorted((cell for cell in cells if upper(cell) > best), key=upper, reverse=True)
                to_split = open_cells[:MAX_SPLIT]
                if not to_split:
                    break
                split_ids = {id(cell) for cell in to_split}
                cells = [cell for cell in cells if id(cell) not in split_ids]
                children = []
                for centre, hw, _ in to_split:
                    for signs in itertools.product((-1.0, 1.0), repeat=len(hw)):
                        children.append((centre + np.array(signs) * hw / 2, hw / 2))
                child_values = chunked_map(lambda ch: evaluate(ch[0]), children, workers)
                total_evaluations += len(children)
                for (centre, hw), value in zip(children, child_values):
                    cells.append((centre, hw, float(value)))
                    if value > best:
                        best, best_offset = float(value), centre
            value = max(best, max(upper(cell) for cell in cells))
            final_spacing = 2 * min(float(cell[1].max()) for cell in cells)
            cert = VmaxCertificate(value, best, value - best, lipschitz, resolution, final_spacing,
                                   axis, tuple(np.asarray(best_offset).tolist()), dimension, 0)
        logger.debug(f"Face axis {axis}: best section {cert.best:.6g}, certified {cert.value:.6g}")
        if overall is None or cert.value > overall.value:
            overall = cert

    overall.evaluations = total_evaluations
    logger.info(f"V_max = {overall.value:.6g} (best {overall.best:.6g}, padding {overall.padding:.3g})")
    return overall


def fiber_total_volume(components: Iterable, projection) -> FiberVolume:
    """
    Sum of sliced volumes over fibre components

    Args:
        components: Items with .boxes (ambient boxes) and .offset (values of p)
        projection: ProjectionSpec supplying the hyperplane normals

    Returns:
        FiberVolume; 0-dimensional slices add to cardinality instead of volume
    """
    result = FiberVolume()
    vectors = np.atleast_2d(projection.matrix)
    for component in components:
        system = HyperplaneSystem.from_arrays(vectors, component.offset)
        volume, count, degenerate = section_measure(component.boxes, system)
        result.volume += volume
        result.cardinality += count
        result.degenerate += degenerate
        result.slices += len(component.boxes)
        result.components += 1
    return result


def certified_fiber_bound(fiber_map) -> float:
    """
    max_degree * max(2^q, n+1) * V_max

    A component is a section of a cube boundary of side <= 1, of 2^n cube
    boundaries of side <= 1/2, or of the codimension-2 skeleton of I^{n+1}
    (n+1 face boundaries, each counted once).
    """
    per_component = max(2 ** fiber_map.q, fiber_map.n + 1) * fiber_map.vmax.value
    return max_degree(fiber_map.tree) * per_component
