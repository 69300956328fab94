"""
Cube-to-tree maps t_{n,r,delta}: I^n -> T_{n,r}.

Level k works in a frame (a cube of side S_k) with relative collar width

    delta_1^(k) = delta^(k) / (4n),  delta^(k) = delta / 2^k

The collar of the frame maps onto the level-k edge by relative distance to
the frame boundary; the inner cube is split into 2^n subcubes which recurse
with budget delta_2^(k) = delta^(k+1). At the deepest level the whole frame
maps onto the leaf edge by distance to its boundary, the centre going to the
leaf endpoint.

Fibres are the boundaries of concentric cubes, the inner skeleton of a frame
(the inner cube boundary plus its dividing walls), or a single point.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .tree import Tree, TreePoint, build_tree, canonical
from ..errors import ParameterError
from ..utils.parallel import chunked_map, sampled_chunks

logger = logging.getLogger(__name__)


class FiberKind(str, Enum):
    SINGLE_POINT = 'SinglePoint'
    CUBE_BOUNDARY = 'CubeBoundary'
    SKELETON = 'Skeleton'


@dataclass(frozen=True)
class Box:
    """Axis-parallel box; axes with lo == hi are fixed"""
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def free_axes(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.dim) if self.hi[i] > self.lo[i])

    @property
    def fixed_axes(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.dim) if self.hi[i] == self.lo[i])

    @property
    def volume(self) -> float:
        """Volume in the box's own dimension"""
        return float(np.prod([self.hi[i] - self.lo[i] for i in self.free_axes]))

    def contains(self, x: Sequence[float], tol: float = 1e-12) -> bool:
        return all(self.lo[i] - tol <= x[i] <= self.hi[i] + tol for i in range(self.dim))

    def embed(self, axis: int, value: float) -> 'Box':
        """Insert a fixed coordinate at position `axis`"""
        lo = list(self.lo)
        hi = list(self.hi)
        lo.insert(axis, value)
        hi.insert(axis, value)
        return Box(tuple(lo), tuple(hi))

    def to_dict(self) -> Dict:
        return {'lo': list(self.lo), 'hi': list(self.hi)}


@dataclass(frozen=True)
class CubeFrame:
    """Frame of a recursion level: global = offset + scale * local"""
    offset: Tuple[float, ...]
    scale: float
    level: int
    path: Tuple[int, ...] = ()

    def to_global(self, local: Sequence[float]) -> np.ndarray:
        return np.asarray(self.offset) + self.scale * np.asarray(local, dtype=float)

    def to_local(self, x: Sequence[float]) -> np.ndarray:
        return (np.asarray(x, dtype=float) - np.asarray(self.offset)) / self.scale


@dataclass(frozen=True)
class FiberDescriptor:
    """
    A fibre of a tree map

    side is the cube side for CubeBoundary, the cell side for Skeleton and
    0 for SinglePoint.
    """
    kind: FiberKind
    frame: CubeFrame
    s: float
    side: float

    @property
    def n(self) -> int:
        return len(self.frame.offset)

    @property
    def corner(self) -> np.ndarray:
        """Lower corner of the cube (CubeBoundary) or inner cube (Skeleton)"""
        if self.kind == FiberKind.SKELETON:
            depth = (self.frame.scale - 2 * self.side) / 2
        else:
            depth = (self.frame.scale - self.side) / 2
        return np.asarray(self.frame.offset) + depth

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind.value,
            'level': self.frame.level,
            'path': list(self.frame.path),
            'offset': list(self.frame.offset),
            'scale': self.frame.scale,
            's': self.s,
            'side': self.side,
        }


@dataclass(frozen=True)
class TreeMapSpec:
    """Schedule of a tree map t_{n,r,delta}"""
    n: int
    r: int
    delta: float
    deltas: Tuple[float, ...]
    collars: Tuple[float, ...]
    budgets: Tuple[float, ...]
    scales: Tuple[float, ...]
    tree: Tree

    def collar_edge(self, path: Sequence[int]) -> int:
        """Tree edge onto which the collar of the frame at `path` maps"""
        return self.tree.edge_id(0, path)

    def frame(self, path: Sequence[int]) -> CubeFrame:
        """Frame reached by following subcube indices `path`"""
        offset = np.zeros(self.n)
        scale = 1.0
        for level, j in enumerate(path):
            c1 = self.collars[level]
            bits = np.array([(j >> i) & 1 for i in range(self.n)], dtype=float)
            offset = offset + scale * (c1 + bits * (1.0 - 2.0 * c1) / 2.0)
            scale = scale * (1.0 - 2.0 * c1) / 2.0
        return CubeFrame(tuple(float(v) for v in offset), scale, len(path), tuple(path))

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'r': self.r,
            'delta': self.delta,
            'levels': [
                {'level': k, 'delta': self.deltas[k], 'collar': self.collars[k],
                 'budget': self.budgets[k], 'frame_side': self.scales[k]}
                for k in range(self.r + 1)
            ],
        }


def build_tree_map(n: int, r: int, delta: float) -> TreeMapSpec:
    """
    Schedule collar widths and budgets for every recursion level

    Args:
        n: Cube dimension
        r: Recursion depth
        delta: Exceptional-volume budget in (0, 1)

    Returns:
        TreeMapSpec
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if r < 0:
        raise ParameterError(f"r must be >= 0, got {r}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")

    deltas = tuple(delta / 2 ** k for k in range(r + 1))
    collars = tuple(dk / (4 * n) for dk in deltas)
    budgets = tuple(dk / 2 for dk in deltas)
    if any(c >= 0.5 for c in collars):
        raise ParameterError("Collar width must stay below half the frame side")

    scales = [1.0]
    for k in range(r):
        scales.append(scales[-1] * (1.0 - 2.0 * collars[k]) / 2.0)

    logger.debug(f"Tree map schedule n={n} r={r} delta={delta}: collars={collars}")
    return TreeMapSpec(n=n, r=r, delta=delta, deltas=deltas, collars=collars,
                       budgets=budgets, scales=tuple(scales), tree=build_tree(n, r))


def _check_cube_point(x: Sequence[float], n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ParameterError(f"Cube point must have {n} coordinates, got shape {x.shape}")
    if np.any(x < 0.0) or np.any(x > 1.0) or not np.all(np.isfinite(x)):
        raise ParameterError(f"Point {x.tolist()} lies outside [0,1]^{n}")
    return x


def descend(spec: TreeMapSpec, x: Sequence[float]) -> Tuple[Tuple[int, ...], float]:
    """
    Follow x down the recursion

    Returns:
        (path, s): subcube indices taken and the parameter on the level
        len(path) edge
    """
    local = _check_cube_point(x, spec.n)
    path: List[int] = []
    for k in range(spec.r + 1):
        dist = float(min(local.min(), (1.0 - local).min()))
        if k == spec.r:
            return tuple(path), min(2.0 * dist, 1.0)
        c1 = spec.collars[k]
        if dist <= c1:
            return tuple(path), dist / c1
        inner = (local - c1) / (1.0 - 2.0 * c1)
        bits = inner > 0.5
        path.append(int(sum(1 << i for i in range(spec.n) if bits[i])))
        local = np.clip(2.0 * inner - bits, 0.0, 1.0)
    raise AssertionError("unreachable")


def eval_tree_map(spec: TreeMapSpec, x: Sequence[float]) -> TreePoint:
    """
    t_{n,r,delta}(x) in canonical form

    Points on a wall between subcubes go to the lexicographically smallest
    subcube; both sides give the same junction.
    """
    path, s = descend(spec, x)
    return canonical(spec.tree, TreePoint(spec.collar_edge(path), s))


def fiber_of(spec: TreeMapSpec, point: TreePoint) -> FiberDescriptor:
    """
    t^{-1}(p)

    Args:
        spec: Tree map
        point: Point of T_{n,r}

    Returns:
        FiberDescriptor; the root fibre is the boundary of I^n
    """
    p = canonical(spec.tree, point)
    _, path = spec.tree.edge_key(p.edge)
    frame = spec.frame(path)
    k = len(path)
    if k < spec.r:
        c1 = spec.collars[k]
        if p.s < 1.0:
            side = frame.scale * (1.0 - 2.0 * p.s * c1)
            return FiberDescriptor(FiberKind.CUBE_BOUNDARY, frame, p.s, side)
        return FiberDescriptor(FiberKind.SKELETON, frame, 1.0, frame.scale * (1.0 - 2.0 * c1) / 2.0)
    if p.s < 1.0:
        return FiberDescriptor(FiberKind.CUBE_BOUNDARY, frame, p.s, frame.scale * (1.0 - p.s))
    return FiberDescriptor(FiberKind.SINGLE_POINT, frame, 1.0, 0.0)


@dataclass(frozen=True)
class FiberFaces:
    """Boxes making up a fibre; point_only marks a SinglePoint fibre"""
    boxes: Tuple[Box, ...]
    point_only: bool = False

    def __iter__(self) -> Iterator[Box]:
        return iter(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)


def cube_boundary_boxes(corner: Sequence[float], side: float) -> List[Box]:
    """The 2n facets of the cube [corner, corner + side]"""
    lo = np.asarray(corner, dtype=float)
    hi = lo + side
    boxes = []
    for axis in range(len(lo)):
        for value in (lo[axis], hi[axis]):
            blo, bhi = lo.copy(), hi.copy()
            blo[axis] = bhi[axis] = value
            boxes.append(Box(tuple(blo.tolist()), tuple(bhi.tolist())))
    return boxes


def skeleton_boxes(origin: Sequence[float], cell: float) -> List[Box]:
    """Walls of the 2x2..x2 grid of cells of side `cell` starting at origin"""
    origin = np.asarray(origin, dtype=float)
    n = len(origin)
    boxes = []
    for axis in range(n):
        others = [i for i in range(n) if i != axis]
        for plane in range(3):
            for cells in itertools.product((0, 1), repeat=n - 1):
                lo = origin.copy()
                hi = origin.copy()
                lo[axis] = hi[axis] = origin[axis] + plane * cell
                for i, c in zip(others, cells):
                    lo[i] = origin[i] + c * cell
                    hi[i] = origin[i] + (c + 1) * cell
                boxes.append(Box(tuple(lo.tolist()), tuple(hi.tolist())))
    return boxes


def fiber_faces(descriptor: FiberDescriptor) -> FiberFaces:
    """
    Decompose a fibre into axis-parallel (n-1)-dimensional boxes

    CubeBoundary gives 2n boxes, Skeleton gives 3n * 2^(n-1); a SinglePoint
    fibre yields no boxes and point_only=True.
    """
    if descriptor.kind == FiberKind.SINGLE_POINT:
        return FiberFaces((), point_only=True)
    if descriptor.kind == FiberKind.CUBE_BOUNDARY:
        return FiberFaces(tuple(cube_boundary_boxes(descriptor.corner, descriptor.side)))
    return FiberFaces(tuple(skeleton_boxes(descriptor.corner, descriptor.side)))


def fiber_volume(descriptor: FiberDescriptor) -> float:
    """(n-1)-volume of a fibre"""
    n = descriptor.n
    if descriptor.kind == FiberKind.SINGLE_POINT:
        return 0.0
    if descriptor.kind == FiberKind.CUBE_BOUNDARY:
        return 2 * n * descriptor.side ** (n - 1)
    return 3 * n * 2 ** (n - 1) * descriptor.side ** (n - 1)


# ----------------------------------------------------------------------
# Exceptional volume
# ----------------------------------------------------------------------

def _exact(value: float) -> Fraction:
    return Fraction(value)


def _exact_scales(spec: TreeMapSpec) -> Tuple[List[Fraction], List[Fraction]]:
    collars = [_exact(c) for c in spec.collars]
    scales = [Fraction(1)]
    for k in range(spec.r):
        scales.append(scales[-1] * (1 - 2 * collars[k]) / 2)
    return collars, scales


def small_fiber_coverage(spec: TreeMapSpec, tau: float,
                         exact: bool = False) -> Union[float, Fraction]:
    """
    Volume of the points whose fibre is a cube boundary of side <= tau

    The collar at level k covers cube sides in [2 S_(k+1), S_k], the base
    level covers (0, S_r]. Skeletons and points have measure zero.
    """
    if tau < 0:
        raise ParameterError(f"Threshold must be >= 0, got {tau}")
    n = spec.n
    t = _exact(tau)
    collars, scales = _exact_scales(spec)
    total = Fraction(0)
    for k in range(spec.r):
        inner = scales[k] * (1 - 2 * collars[k])
        side = min(max(t, inner), scales[k])
        total += 2 ** (n * k) * (side ** n - inner ** n)
    total += 2 ** (n * spec.r) * min(t, scales[spec.r]) ** n
    return total if exact else float(total)


def exceptional_volume(spec: TreeMapSpec, exact: bool = False) -> Union[float, Fraction]:
    """Vol(X_exc): points whose fibre is not a cube boundary of side <= 2^-r"""
    value = 1 - small_fiber_coverage(spec, 2.0 ** -spec.r, exact=True)
    return value if exact else float(value)


def budget_bound(spec: TreeMapSpec) -> float:
    """delta_1 * 2n + 2^n * delta_2 * 2^-n, which equals delta"""
    return spec.collars[0] * 2 * spec.n + spec.budgets[0]


def level_budget_table(spec: TreeMapSpec) -> List[Dict]:
    """
    Per-level accounting of the exceptional volume

    relative_exceptional is the exceptional fraction of one level-k frame;
    it never exceeds relative_bound = 2n * delta_1^(k) + delta_2^(k).
    """
    n = spec.n
    threshold = Fraction(2.0 ** -spec.r)
    collars, scales = _exact_scales(spec)
    relative = [Fraction(0)] * (spec.r + 1)
    # base level frames hold only cube boundaries of side <= S_r <= 2^-r
    for k in range(spec.r - 1, -1, -1):
        inner = scales[k] * (1 - 2 * collars[k])
        small = min(max(threshold, inner), scales[k]) ** n - inner ** n
        collar_exc = (scales[k] ** n - inner ** n) - small
        relative[k] = collar_exc / scales[k] ** n + (inner / scales[k]) ** n * relative[k + 1]

    rows = []
    for k in range(spec.r + 1):
        frames = 2 ** (n * k)
        rows.append({
            'level': k,
            'frames': frames,
            'frame_side': float(scales[k]),
            'collar': spec.collars[k],
            'budget': spec.budgets[k],
            'relative_exceptional': float(relative[k]),
            'relative_bound': 2 * n * spec.collars[k] + spec.budgets[k],
            'absolute_exceptional': float(frames * scales[k] ** n * relative[k]),
        })
    return rows


def lipschitz_constant(spec: TreeMapSpec) -> float:
    """Bound on tree distance per unit Euclidean distance in I^n"""
    bounds = [1.0 / (spec.collars[k] * spec.scales[k]) for k in range(spec.r)]
    bounds.append(2.0 / spec.scales[spec.r])
    return max(bounds)


def classify_batch(spec: TreeMapSpec, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised descent

    Args:
        spec: Tree map
        points: (N, n) array in [0,1]^n

    Returns:
        (level, s, side) arrays; side is the fibre cube side (0 for points
        and skeletons, which have measure zero)
    """
    local = np.array(points, dtype=float, copy=True)
    count = len(local)
    level = np.full(count, spec.r, dtype=int)
    s_out = np.zeros(count)
    side = np.zeros(count)
    active = np.ones(count, dtype=bool)
    for k in range(spec.r + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        cur = local[idx]
        dist = np.minimum(cur.min(axis=1), (1.0 - cur).min(axis=1))
        if k == spec.r:
            s = np.minimum(2.0 * dist, 1.0)
            level[idx] = k
            s_out[idx] = s
            side[idx] = np.where(s < 1.0, spec.scales[k] * (1.0 - s), 0.0)
            break
        c1 = spec.collars[k]
        stop = dist <= c1
        stopped = idx[stop]
        s = dist[stop] / c1
        level[stopped] = k
        s_out[stopped] = s
        side[stopped] = np.where(s < 1.0, spec.scales[k] * (1.0 - 2.0 * s * c1), 0.0)
        active[stopped] = False
        go = idx[~stop]
        inner = (local[go] - c1) / (1.0 - 2.0 * c1)
        local[go] = np.clip(2.0 * inner - (inner > 0.5), 0.0, 1.0)
    return level, s_out, side


def exceptional_volume_mc(spec: TreeMapSpec, samples: int, seed: int = 0,
                          workers: int = 1) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of Vol(X_exc)

    Returns:
        (estimate, standard error)
    """
    if samples <= 0:
        raise ParameterError("samples must be positive")
    threshold = 2.0 ** -spec.r

    def run(job) -> int:
        size, rng = job
        _, _, side = classify_batch(spec, rng.random((size, spec.n)))
        # skeleton/point fibres report side 0 and occur with probability 0
        return int(np.count_nonzero(side > threshold * (1.0 + 1e-12)))

    hits = sum(chunked_map(run, sampled_chunks(samples, seed), workers))
    p = hits / samples
    return p, math.sqrt(p * (1.0 - p) / samples)


def frame_centre(spec: TreeMapSpec, path: Sequence[int]) -> np.ndarray:
    """Centre of the frame at `path`"""
    return spec.frame(path).to_global(np.full(spec.n, 0.5))


def tree_map_to_toml(spec: TreeMapSpec) -> Dict:
    """Minimal TOML document; the schedule is rebuilt from (n, r, delta)"""
    return {'schema': 'smallfibers.treemap/1', 'n': spec.n, 'r': spec.r, 'delta': spec.delta}


def tree_map_from_toml(data: Dict) -> TreeMapSpec:
    try:
        return build_tree_map(int(data['n']), int(data['r']), float(data['delta']))
    except KeyError as e:
        raise ParameterError(f"Tree map document is missing key {e}") from e
