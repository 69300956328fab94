"""
Straight-line tree embeddings in R^q and their thickenings.

Layout: the first coordinate is the vertex depth times level_gap, the
second places every vertex at the centre of the slab spanned by the leaves
below it, all other coordinates are 0. Slabs of vertices at the same depth
are disjoint, so edges never cross.

d is the minimum Euclidean distance between edges that share no endpoint.
The thickening puts a (q-1)-ball of radius d/4 around every point of the
embedded tree:

    phi(p, x) = pos(p) + (d/4) * (0, x / M),   |x| <= M
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .tree import Tree, TreePoint, canonical, max_degree
from ..errors import EmbeddingError, ParameterError

logger = logging.getLogger(__name__)

# Edge count up to which d is computed over all pairs
BRUTE_FORCE_LIMIT = 1500

# Relative tolerance on the thickening radius when inverting phi
INVERSION_TOL = 1e-7


@dataclass(frozen=True)
class LayoutParams:
    level_gap: float = 1.0
    leaf_gap: float = 1.0

    def __post_init__(self):
        if self.level_gap <= 0 or self.leaf_gap <= 0:
            raise ParameterError("Layout gaps must be positive")


@dataclass(frozen=True)
class EmbeddingSpec:
    """
    Straight-line embedding of a tree in R^q plus thickening data

    Positions are computed on demand from the tree arithmetic.
    """
    tree: Tree
    q: int
    M: float
    d: float
    layout: LayoutParams = field(default_factory=LayoutParams)

    # ------------------------------------------------------------------
    # Positions
    # ------------------------------------------------------------------

    def _slab(self, node_id: int) -> Tuple[int, int, int]:
        """(depth, first leaf index, leaf count) of the slab under a vertex"""
        tree = self.tree
        if node_id == tree.root:
            return 0, 0, tree.leaf_count
        branch, path = tree.edge_key(node_id - 1)
        depth = len(path) + 1
        width = tree.arity ** (tree.branches[branch] + 1 - depth)
        index = 0
        for j in path:
            index = index * tree.arity + j
        return depth, tree.leaf_offsets[branch] + index * width, width

    def position(self, node_id: int) -> np.ndarray:
        depth, first, width = self._slab(node_id)
        pos = np.zeros(self.q)
        pos[0] = self.layout.level_gap * depth
        if node_id != self.tree.root:
            # (2*first + width - total)/2 is exact in integers
            pos[1] = self.layout.leaf_gap * (2 * first + width - self.tree.leaf_count) / 2
        return pos

    def segment(self, edge_id: int) -> Tuple[np.ndarray, np.ndarray]:
        edge = self.tree.edge(edge_id)
        return self.position(edge.parent), self.position(edge.child)

    def point_position(self, point: TreePoint) -> np.ndarray:
        """phi(p, 0)"""
        start, end = self.segment(point.edge)
        return (1.0 - point.s) * start + point.s * end

    def positions(self) -> Dict[int, List[float]]:
        """Materialised vertex positions (small trees only)"""
        self.tree._check_materializable()
        return {node.id: self.position(node.id).tolist() for node in self.tree.iter_nodes()}

    def to_dict(self, materialize: Optional[bool] = None) -> Dict:
        data = {
            'q': self.q,
            'M': self.M,
            'd': self.d,
            'level_gap': self.layout.level_gap,
            'leaf_gap': self.layout.leaf_gap,
        }
        if materialize is None:
            materialize = self.tree.edge_count <= BRUTE_FORCE_LIMIT
        if materialize:
            data['positions'] = {str(k): v for k, v in self.positions().items()}
        return data


# ----------------------------------------------------------------------
# Segment distances
# ----------------------------------------------------------------------

def segment_distances(p0: np.ndarray, p1: np.ndarray,
                      q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """
    Vectorised closest distance between segments [p0, p1] and [q0, q1]

    All inputs have shape (..., q); segments must have positive length.
    """
    u = p1 - p0
    v = q1 - q0
    w = p0 - q0
    a = np.einsum('...i,...i->...', u, u)
    b = np.einsum('...i,...i->...', u, v)
    c = np.einsum('...i,...i->...', u, w)
    e = np.einsum('...i,...i->...', v, v)
    f = np.einsum('...i,...i->...', v, w)
    denom = a * e - b * b

    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.where(denom > 1e-14 * a * e, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0),
                     np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s))
    t = np.clip(t, 0.0, 1.0)
    diff = w + s[..., None] * u - t[..., None] * v
    return np.sqrt(np.einsum('...i,...i->...', diff, diff))


def _pairwise_disjoint_min(spec: EmbeddingSpec, edge_ids: Sequence[int]) -> float:
    """Minimum distance over pairs of the given edges that share no endpoint"""
    edge_ids = sorted(set(edge_ids))
    if len(edge_ids) < 2:
        return math.inf
    edges = [spec.tree.edge(e) for e in edge_ids]
    ends = np.array([[e.parent, e.child] for e in edges])
    starts = np.array([spec.position(e.parent) for e in edges])
    stops = np.array([spec.position(e.child) for e in edges])

    best = math.inf
    block = max(1, 2_000_000 // len(edges))
    for lo in range(0, len(edges), block):
        rows = np.arange(lo, min(lo + block, len(edges)))
        i, j = np.meshgrid(rows, np.arange(len(edges)), indexing='ij')
        keep = j > i
        i, j = i[keep], j[keep]
        shares = ((ends[i, 0] == ends[j, 0]) | (ends[i, 0] == ends[j, 1])
                  | (ends[i, 1] == ends[j, 0]) | (ends[i, 1] == ends[j, 1]))
        i, j = i[~shares], j[~shares]
        if len(i) == 0:
            continue
        dist = segment_distances(starts[i], stops[i], starts[j], stops[j])
        best = min(best, float(dist.min()))
    return best


def _window_edges(tree: Tree) -> Iterable[List[int]]:
    """
    Edge windows whose pairwise minima give d for a uniform tree

    The layout is periodic at every depth, and edges under vertices that are
    not neighbours, or two or more levels apart, are farther apart than the
    level gap. Each depth therefore contributes the edges below its first
    three vertices and their daughters.
    """
    b = tree.arity
    r = tree.branches[0]
    roots = tree.daughter_edges(tree.root)
    first_band = list(roots)
    for edge_id in roots:
        first_band.extend(tree.daughter_edges(edge_id + 1))
    yield first_band

    for depth in range(1, r + 1):
        per_branch = b ** (depth - 1)
        total = per_branch * len(tree.branches)
        window: List[int] = []
        for g in range(min(3, total)):
            branch, index = divmod(g, per_branch)
            path = []
            for _ in range(depth - 1):
                index, j = divmod(index, b)
                path.append(j)
            parent = tree.edge_id(branch, tuple(reversed(path))) + 1
            for daughter in tree.daughter_edges(parent):
                window.append(daughter)
                window.extend(tree.daughter_edges(daughter + 1))
        yield window


def min_disjoint_edge_distance(spec: EmbeddingSpec, method: str = 'auto') -> float:
    """
    d: minimum distance between embedded edges sharing no endpoint

    Args:
        spec: Embedding (its d field is ignored)
        method: 'brute' (all pairs), 'window' (periodic windows, uniform
            trees only) or 'auto'

    Returns:
        d, or inf when no such pair exists
    """
    tree = spec.tree
    if method == 'auto':
        if tree.edge_count <= BRUTE_FORCE_LIMIT:
            method = 'brute'
        elif tree.is_uniform:
            method = 'window'
        else:
            raise EmbeddingError(
                f"Cannot measure d for a non-uniform tree with {tree.edge_count} edges")

    if method == 'brute':
        return _pairwise_disjoint_min(spec, range(tree.edge_count))
    if method != 'window':
        raise ParameterError(f"Unknown method: {method}")
    if not tree.is_uniform:
        raise EmbeddingError("Windowed distance needs equal branch depths")

    best = math.inf
    for window in _window_edges(tree):
        best = min(best, _pairwise_disjoint_min(spec, window))
    if best > min(spec.layout.level_gap, spec.layout.leaf_gap):
        # windows only see the nearest neighbours; fall back if that assumption fails
        logger.warning("Windowed edge distance exceeds the layout gaps; using all pairs")
        return _pairwise_disjoint_min(spec, range(tree.edge_count))
    return best


def embed_tree(tree: Tree, q: int, M: float = 1.0,
               layout: Optional[LayoutParams] = None) -> EmbeddingSpec:
    """
    Embed a tree in R^q and measure d

    Args:
        tree: Tree (possibly glued)
        q: Target dimension, at least 2
        M: Radius of the (q-1)-ball that the thickening rescales to d/4
        layout: Vertex spacing

    Returns:
        EmbeddingSpec with d filled in
    """
    if q < 2:
        raise ParameterError(f"Embedding needs q >= 2, got q={q}")
    if M <= 0:
        raise ParameterError(f"Thickening radius M must be positive, got {M}")
    layout = layout or LayoutParams()
    provisional = EmbeddingSpec(tree=tree, q=q, M=M, d=math.nan, layout=layout)
    d = min_disjoint_edge_distance(provisional)
    if not math.isfinite(d):
        # a single edge (or a star of trunks) has no disjoint pairs
        d = min(layout.level_gap, layout.leaf_gap)
    if d <= 0:
        raise EmbeddingError("Embedded edges intersect")
    logger.debug(f"Embedded tree with {tree.edge_count} edges in R^{q}: d={d:.6g}")
    return EmbeddingSpec(tree=tree, q=q, M=M, d=d, layout=layout)


def max_edge_length(spec: EmbeddingSpec) -> float:
    """Longest embedded edge, i.e. the Lipschitz constant of p -> phi(p, 0) per unit s"""
    tree = spec.tree
    best = 0.0
    for branch, r in enumerate(tree.branches):
        parent = tree.root
        path: Tuple[int, ...] = ()
        for depth in range(r + 1):
            edges = [tree.edge_id(branch, path)] if depth == 0 else tree.daughter_edges(parent)
            for edge_id in (edges[0], edges[-1]):
                start, end = spec.segment(edge_id)
                best = max(best, float(np.linalg.norm(end - start)))
            parent = edges[0] + 1
            path = tree.edge_key(edges[0])[1]
    return best


# ----------------------------------------------------------------------
# Thickening
# ----------------------------------------------------------------------

def thicken_eval(spec: EmbeddingSpec, point: TreePoint, x: Sequence[float]) -> np.ndarray:
    """
    phi(p, x)

    Args:
        spec: Embedding
        point: Tree point
        x: Offset in the (q-1)-ball of radius M

    Returns:
        Point of R^q
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.q - 1,):
        raise ParameterError(f"Offset must have {spec.q - 1} coordinates, got shape {x.shape}")
    if np.linalg.norm(x) > spec.M * (1.0 + 1e-12):
        raise ParameterError(f"Offset norm {np.linalg.norm(x):.6g} exceeds M={spec.M:.6g}")
    y = spec.point_position(point)
    y[1:] += (spec.d / 4.0) * x / spec.M
    return y


def candidate_edges(spec: EmbeddingSpec, y: np.ndarray, radius: float) -> List[int]:
    """
    Edges whose embedded segment can pass within `radius` of y in the
    non-depth coordinates at depth coordinate y[0]
    """
    tree = spec.tree
    h = spec.layout.level_gap
    g = spec.layout.leaf_gap
    level = y[0] / h
    if level < 0 or level > tree.max_depth:
        return []
    bands = {min(int(math.floor(level)), tree.max_depth - 1)}
    if level == math.floor(level) and level >= 1:
        bands.add(int(level) - 1)

    # leaf units measured from the left end of the layout
    centre = y[1] / g + tree.leaf_count / 2
    reach = radius / g
    found: List[int] = []
    for band in sorted(bands):
        if band == 0:
            found.extend(tree.daughter_edges(tree.root))
            continue
        for branch, r in enumerate(tree.branches):
            if band > r:
                continue
            width = tree.arity ** (r + 1 - band)
            count = tree.arity ** (band - 1)
            offset = tree.leaf_offsets[branch]
            lo = max(0, math.floor((centre - reach - offset) / width))
            hi = min(count - 1, math.floor((centre + reach - offset) / width))
            for index in range(lo, hi + 1):
                path = []
                rest = index
                for _ in range(band - 1):
                    rest, j = divmod(rest, tree.arity)
                    path.append(j)
                parent = tree.edge_id(branch, tuple(reversed(path))) + 1
                found.extend(tree.daughter_edges(parent))
    return found


def invert_thickening(spec: EmbeddingSpec, y: Sequence[float]) -> List[Tuple[TreePoint, np.ndarray]]:
    """
    All (p, x) with phi(p, x) = y

    Returns:
        Canonical tree points with their offsets, sorted by edge id; the
        list has at most max_degree(tree) entries
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.q,):
        raise ParameterError(f"Point must have {spec.q} coordinates, got shape {y.shape}")
    slack = 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))
    radius = spec.d / 4.0 * (1.0 + INVERSION_TOL) + slack
    scale = 4.0 * spec.M / spec.d
    snap_dist = max(INVERSION_TOL * spec.d / 4.0, slack)

    results: Dict[TreePoint, np.ndarray] = {}
    for edge_id in candidate_edges(spec, y, radius):
        start, end = spec.segment(edge_id)
        # snapping s moves the base point by s_tol * length, at most snap_dist
        s_tol = snap_dist / float(np.linalg.norm(end - start))
        s = (y[0] - start[0]) / (end[0] - start[0])
        if s < -s_tol or s > 1.0 + s_tol:
            continue
        s = float(np.clip(s, 0.0, 1.0))
        if s < s_tol:
            s = 0.0
        elif s > 1.0 - s_tol:
            s = 1.0
        base = (1.0 - s) * start + s * end
        offset = (y[1:] - base[1:]) * scale
        norm = float(np.linalg.norm(offset))
        if norm > spec.M * (1.0 + INVERSION_TOL) + slack * scale:
            continue
        if norm > spec.M:
            offset = offset * (spec.M / norm)
        point = canonical(spec.tree, TreePoint(edge_id, s))
        results.setdefault(point, offset)

    preimages = sorted(results.items(), key=lambda item: (item[0].edge, item[0].s))
    if len(preimages) > max_degree(spec.tree):
        logger.warning(f"Point {y.tolist()} has {len(preimages)} preimages, "
                       f"more than the max degree {max_degree(spec.tree)}")
    return preimages
