"""
Cutting axis-parallel boxes with affine hyperplanes and measuring the result.

A box with F free coordinates cut by k hyperplanes gives a polytope of
dimension m = F - k. Its vertices are found by choosing m free coordinates to
pin at a box bound and solving the k x k system for the rest.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import DegeneracyError, ParameterError
from ..trees.tree_map import Box
from ..utils.parallel import chunked_map, sampled_chunks

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-10
DEDUP_TOL = 1e-10
CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class HyperplaneSystem:
    """{x : normals @ x = offsets}"""
    normals: Tuple[Tuple[float, ...], ...]
    offsets: Tuple[float, ...]

    def __post_init__(self):
        if len(self.normals) != len(self.offsets):
            raise ParameterError("One offset per normal is required")

    @classmethod
    def from_arrays(cls, normals: np.ndarray, offsets: Sequence[float]) -> 'HyperplaneSystem':
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls(tuple(tuple(float(c) for c in row) for row in normals),
                   tuple(float(c) for c in np.atleast_1d(offsets)))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.normals, dtype=float)

    @property
    def rhs(self) -> np.ndarray:
        return np.array(self.offsets, dtype=float)

    def residual(self, x: Sequence[float]) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) - self.rhs


@dataclass(eq=False)
class SlicePolytope:
    vertices: np.ndarray
    dim: int
    box_id: Optional[int] = None
    degenerate: bool = False

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0


@dataclass
class SliceEstimate:
    value: float
    stderr: float
    hits: int
    samples: int
    zero_hits: bool = False


@lru_cache(maxsize=None)
def _active_sets(free: int, pinned: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    All ways to pin `pinned` of `free` coordinates at a bound

    Returns:
        (pinned index sets, solved index sets, bound choices)
    """
    combos = list(itertools.combinations(range(free), pinned))
    pins = np.array(combos, dtype=int).reshape(len(combos), pinned)
    solved = np.array([[i for i in range(free) if i not in row] for row in pins],
                      dtype=int).reshape(len(combos), free - pinned)
    choices = list(itertools.product((0, 1), repeat=pinned))
    bounds = np.array(choices, dtype=int).reshape(len(choices), pinned)
    return pins, solved, bounds


def _dedupe(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    kept: List[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - k)) > tol for k in kept):
            kept.append(p)
    return np.array(kept) if kept else np.zeros((0, points.shape[1] if points.ndim == 2 else 0))


def slice_box(box: Box, system: HyperplaneSystem, box_id: Optional[int] = None) -> SlicePolytope:
    """
    Vertices of {x in box : normals @ x = offsets}

    Args:
        box: Axis-parallel box (fixed axes have lo == hi)
        system: Hyperplanes
        box_id: Carried through to the result

    Returns:
        SlicePolytope, possibly empty; degenerate is set when an active set
        had to be skipped for conditioning
    """
    lo = np.asarray(box.lo, dtype=float)
    hi = np.asarray(box.hi, dtype=float)
    A_full = system.matrix
    if A_full.shape[1] != len(lo):
        raise ParameterError(f"Hyperplanes live in R^{A_full.shape[1]}, box in R^{len(lo)}")
    free = np.array(box.free_axes, dtype=int)
    fixed = np.array(box.fixed_axes, dtype=int)
    k = A_full.shape[0]
    m = len(free) - k
    dim = len(lo)
    if m < 0:
        return SlicePolytope(np.zeros((0, dim)), m, box_id)

    A = A_full[:, free]
    rhs = system.rhs - (A_full[:, fixed] @ lo[fixed] if len(fixed) else 0.0)
    flo, fhi = lo[free], hi[free]

    pins, solved, bounds = _active_sets(len(free), m)
    degenerate = False
    found = []
    for pin, rest in zip(pins, solved):
        A_rest = A[:, rest]
        if k and np.linalg.cond(A_rest) > CONDITION_LIMIT:
            degenerate = degenerate or np.linalg.matrix_rank(A_rest) == k
            continue
        # every bound combination for the pinned coordinates at once
        pinned = np.where(bounds == 0, flo[pin], fhi[pin])          # (B, m)
        target = rhs[None, :] - pinned @ A[:, pin].T                 # (B, k)
        values = np.linalg.solve(A_rest, target.T).T if k else np.zeros((len(bounds), 0))
        ok = np.all((values >= flo[rest] - FEASIBILITY_TOL) & (values <= fhi[rest] + FEASIBILITY_TOL), axis=1)
        for row in np.flatnonzero(ok):
            x = lo.copy()
            x[free[pin]] = pinned[row]
            x[free[rest]] = np.clip(values[row], flo[rest], fhi[rest])
            found.append(x)

    vertices = _dedupe(np.array(found)) if found else np.zeros((0, dim))
    if degenerate:
        logger.debug(f"Ill-conditioned active set skipped while slicing box {box_id}")
    return SlicePolytope(vertices.reshape(-1, dim), m, box_id, degenerate)


def _affine_basis(vertices: np.ndarray) -> Tuple[int, np.ndarray]:
    diffs = vertices[1:] - vertices[0]
    if len(diffs) == 0:
        return 0, np.zeros((0, vertices.shape[1]))
    _, sing, vt = np.linalg.svd(diffs, full_matrices=False)
    scale = max(1.0, float(np.abs(diffs).max()))
    rank = int(np.count_nonzero(sing > FEASIBILITY_TOL * scale))
    return rank, vt[:rank]


def polytope_volume(poly: SlicePolytope) -> float:
    """
    m-dimensional volume of a slice

    A fan from vertex 0 over the hull facets that avoid it; simplex volumes
    by Gram determinants. Point slices (m = 0) have volume 0, their count is
    reported separately. A slice whose vertices span less than m dimensions
    is a contact of measure zero.
    """
    if poly.is_empty or poly.dim <= 0:
        return 0.0
    vertices = np.asarray(poly.vertices, dtype=float)
    rank, basis = _affine_basis(vertices)
    if rank > poly.dim:
        raise DegeneracyError(f"Slice vertices span {rank} dimensions, expected {poly.dim}")
    if rank < poly.dim:
        return 0.0

    local = (vertices - vertices[0]) @ basis.T
    if poly.dim == 1:
        return float(local[:, 0].max() - local[:, 0].min())

    try:
        hull = ConvexHull(local)
    except QhullError as e:
        raise DegeneracyError(f"qhull failed on a {poly.dim}-dimensional slice: {e}") from e

    total = 0.0
    factorial = math.factorial(poly.dim)
    for simplex in hull.simplices:
        if 0 in simplex:
            continue
        edges = local[simplex] - local[0]
        gram = edges @ edges.T
        total += math.sqrt(max(np.linalg.det(gram), 0.0)) / factorial
    return total


def slice_volume_mc(box: Box, system: HyperplaneSystem, tau: float, samples: int,
                    seed: int = 0, workers: int = 1) -> SliceEstimate:
    """
    Monte-Carlo estimate of the slice volume through a slab of thickness tau

    The slab {|normals @ x - offsets| <= tau/2} has volume ~ slice volume *
    tau^k / sqrt(det(A A^T)), A the normals restricted to the free axes.
    """
    if tau <= 0:
        raise ParameterError("Slab thickness must be positive")
    if samples <= 0:
        raise ParameterError("samples must be positive")
    lo = np.asarray(box.lo, dtype=float)
    hi = np.asarray(box.hi, dtype=float)
    free = list(box.free_axes)
    fixed = list(box.fixed_axes)
    A_full = system.matrix
    A = A_full[:, free]
    rhs = system.rhs - (A_full[:, fixed] @ lo[fixed] if fixed else 0.0)
    k = A.shape[0]

    def run(job) -> int:
        size, rng = job
        pts = lo[free] + rng.random((size, len(free))) * (hi[free] - lo[free])
        resid = pts @ A.T - rhs
        return int(np.count_nonzero(np.all(np.abs(resid) <= tau / 2, axis=1)))

    hits = sum(chunked_map(run, sampled_chunks(samples, seed), workers))
    box_volume = float(np.prod(hi[free] - lo[free]))
    jacobian = math.sqrt(np.linalg.det(A @ A.T)) if k else 1.0
    scale = box_volume * jacobian / tau ** k
    p = hits / samples
    return SliceEstimate(value=p * scale, stderr=math.sqrt(p * (1 - p) / samples) * scale,
                         hits=hits, samples=samples, zero_hits=hits == 0)
