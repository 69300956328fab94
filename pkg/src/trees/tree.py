"""
Rooted trees T_{n,r} and their gluings at the root.

T_{n,0} is a single edge. T_{n,r} is one trunk edge whose far endpoint carries
2^n copies of T_{n,r-1}. Gluing identifies the roots of several such trees.

Trees are stored implicitly as the list of branch depths hanging off the
root, because the depths used by real maps give billions of edges. Every
edge is addressed by (branch, path), where path lists the subcube index
chosen at each recursion level. Ids are assigned in depth-first order:

    edge id  = branch offset + local id(path)
    node id  = 0 for the root, edge id + 1 for the far endpoint of an edge

so ids can be converted to addresses and back arithmetically.
"""
import bisect
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from ..errors import ParameterError

logger = logging.getLogger(__name__)

# Largest tree that .graph / .to_dict() will materialise
MATERIALIZE_LIMIT = 250_000

Path = Tuple[int, ...]


@lru_cache(maxsize=None)
def subtree_edge_count(b: int, r: int) -> int:
    """E(r) = 1 + b*E(r-1), E(0) = 1"""
    if r < 0:
        return 0
    return 1 + b * subtree_edge_count(b, r - 1)


@dataclass(frozen=True)
class Node:
    id: int
    parent: Optional[int]
    depth: int


@dataclass(frozen=True)
class Edge:
    id: int
    parent: int
    child: int
    branch: int
    path: Path

    @property
    def level(self) -> int:
        """Recursion level: 0 for a trunk edge"""
        return len(self.path)


@dataclass(frozen=True, order=True)
class TreePoint:
    """A point on edge `edge` at parameter s (0 = parent endpoint)"""
    edge: int
    s: float

    def to_dict(self) -> dict:
        return {'edge': self.edge, 's': self.s}


@dataclass(frozen=True)
class Tree:
    """
    Root plus one T_{n, r_i} per branch.

    provenance[i] is the index of the input tree that branch i came from
    when the tree was produced by glue_at_roots.
    """
    n: int
    branches: Tuple[int, ...]
    provenance: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"Tree dimension must be >= 1, got n={self.n}")
        if not self.branches:
            raise ParameterError("A tree needs at least one branch")
        if any(r < 0 for r in self.branches):
            raise ParameterError(f"Branch depths must be >= 0: {self.branches}")
        if not self.provenance:
            object.__setattr__(self, 'provenance', tuple(0 for _ in self.branches))
        if len(self.provenance) != len(self.branches):
            raise ParameterError("provenance must list one input index per branch")

    # ------------------------------------------------------------------
    # Sizes
    # ------------------------------------------------------------------

    @property
    def arity(self) -> int:
        """b = 2^n, the daughter count of every internal non-root vertex"""
        return 2 ** self.n

    @property
    def root(self) -> int:
        return 0

    @property
    def is_uniform(self) -> bool:
        return len(set(self.branches)) == 1

    @cached_property
    def branch_offsets(self) -> Tuple[int, ...]:
        offsets = [0]
        for r in self.branches:
            offsets.append(offsets[-1] + subtree_edge_count(self.arity, r))
        return tuple(offsets)

    @cached_property
    def leaf_offsets(self) -> Tuple[int, ...]:
        """Leaf count before each branch, in depth-first order"""
        offsets = [0]
        for r in self.branches:
            offsets.append(offsets[-1] + self.arity ** r)
        return tuple(offsets)

    @property
    def edge_count(self) -> int:
        return self.branch_offsets[-1]

    @property
    def node_count(self) -> int:
        return self.edge_count + 1

    @property
    def leaf_count(self) -> int:
        return self.leaf_offsets[-1]

    @property
    def max_depth(self) -> int:
        """Depth of the deepest node (root = 0)"""
        return max(self.branches) + 1

    # ------------------------------------------------------------------
    # Addressing
    # ------------------------------------------------------------------

    def edge_id(self, branch: int, path: Sequence[int]) -> int:
        r = self.branches[branch]
        if len(path) > r:
            raise ParameterError(f"Path {tuple(path)} is deeper than branch depth {r}")
        b = self.arity
        local = 0
        for level, j in enumerate(path):
            if not 0 <= j < b:
                raise ParameterError(f"Subcube index {j} outside [0, {b})")
            local += 1 + j * subtree_edge_count(b, r - 1 - level)
        return self.branch_offsets[branch] + local

    def edge_key(self, edge_id: int) -> Tuple[int, Path]:
        """(branch, path) of an edge id"""
        if not 0 <= edge_id < self.edge_count:
            raise ParameterError(f"Edge id {edge_id} outside [0, {self.edge_count})")
        branch = bisect.bisect_right(self.branch_offsets, edge_id) - 1
        r = self.branches[branch]
        local = edge_id - self.branch_offsets[branch]
        path: List[int] = []
        while local > 0:
            local -= 1
            size = subtree_edge_count(self.arity, r - 1 - len(path))
            j, local = divmod(local, size)
            path.append(j)
        return branch, tuple(path)

    def edge(self, edge_id: int) -> Edge:
        branch, path = self.edge_key(edge_id)
        if path:
            parent = self.edge_id(branch, path[:-1]) + 1
        else:
            parent = self.root
        return Edge(id=edge_id, parent=parent, child=edge_id + 1, branch=branch, path=path)

    def node(self, node_id: int) -> Node:
        if node_id == self.root:
            return Node(id=0, parent=None, depth=0)
        edge = self.edge(node_id - 1)
        return Node(id=node_id, parent=edge.parent, depth=edge.level + 1)

    def incoming_edge(self, node_id: int) -> Optional[int]:
        return None if node_id == self.root else node_id - 1

    def daughter_edges(self, node_id: int) -> List[int]:
        """Edge ids leaving a node, in depth-first order"""
        if node_id == self.root:
            return list(self.branch_offsets[:-1])
        branch, path = self.edge_key(node_id - 1)
        if len(path) >= self.branches[branch]:
            return []
        return [self.edge_id(branch, path + (j,)) for j in range(self.arity)]

    def degree(self, node_id: int) -> int:
        return len(self.daughter_edges(node_id)) + (0 if node_id == self.root else 1)

    def iter_edges(self) -> Iterator[Edge]:
        for edge_id in range(self.edge_count):
            yield self.edge(edge_id)

    def iter_nodes(self) -> Iterator[Node]:
        for node_id in range(self.node_count):
            yield self.node(node_id)

    # ------------------------------------------------------------------
    # Materialisation
    # ------------------------------------------------------------------

    def _check_materializable(self) -> None:
        if self.edge_count > MATERIALIZE_LIMIT:
            raise ParameterError(
                f"Tree has {self.edge_count} edges; refusing to materialise more than {MATERIALIZE_LIMIT}")

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Frozen networkx view (parent -> child) for small trees"""
        self._check_materializable()
        g = nx.DiGraph()
        g.add_node(self.root, depth=0)
        for edge in self.iter_edges():
            g.add_node(edge.child, depth=edge.level + 1)
            g.add_edge(edge.parent, edge.child, id=edge.id, branch=edge.branch,
                       provenance=self.provenance[edge.branch])
        return nx.freeze(g)

    def to_dict(self, materialize: Optional[bool] = None) -> Dict:
        """
        JSON document with "nodes", "edges", "root" and provenance

        Args:
            materialize: Include node/edge lists (default: only when small)
        """
        if materialize is None:
            materialize = self.edge_count <= MATERIALIZE_LIMIT
        data = {
            'n': self.n,
            'branches': list(self.branches),
            'provenance': list(self.provenance),
            'root': self.root,
            'edge_count': self.edge_count,
        }
        if materialize:
            self._check_materializable()
            data['nodes'] = [{'id': nd.id, 'parent': nd.parent, 'depth': nd.depth}
                             for nd in self.iter_nodes()]
            data['edges'] = [{'id': e.id, 'parent': e.parent, 'child': e.child,
                              'branch': e.branch, 'provenance': self.provenance[e.branch],
                              'path': list(e.path)}
                             for e in self.iter_edges()]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'Tree':
        return cls(n=int(data['n']), branches=tuple(data['branches']),
                   provenance=tuple(data.get('provenance', ())))


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------

def build_tree(n: int, r: int) -> Tree:
    """
    Build T_{n,r}

    Args:
        n: Cube dimension (arity 2^n)
        r: Recursion depth

    Returns:
        The tree; E(r) = 1 + 2^n E(r-1) edges and 2^{nr} leaves
    """
    if r < 0:
        raise ParameterError(f"Depth must be >= 0, got r={r}")
    return Tree(n=n, branches=(r,))


def glue_at_roots(trees: Sequence[Tree]) -> Tree:
    """
    Identify the roots of several trees

    Args:
        trees: Trees of a common dimension n

    Returns:
        Tree whose branches are the branches of the inputs, in order, with
        provenance pointing at the input each branch came from
    """
    if not trees:
        raise ParameterError("glue_at_roots needs at least one tree")
    n = trees[0].n
    if any(t.n != n for t in trees):
        raise ParameterError("Only trees of equal dimension can be glued")

    branches: List[int] = []
    provenance: List[int] = []
    for index, tree in enumerate(trees):
        branches.extend(tree.branches)
        provenance.extend([index] * len(tree.branches))
    return Tree(n=n, branches=tuple(branches), provenance=tuple(provenance))


def max_degree(tree: Tree) -> int:
    """
    Maximum over vertices of daughters (+1 for the parent of non-root vertices)

    The root has one daughter per branch; a trunk end or deeper internal
    vertex has 2^n daughters and a parent; leaves have degree 1.
    """
    internal = tree.arity + 1 if any(r >= 1 for r in tree.branches) else 1
    return max(len(tree.branches), internal)


# ----------------------------------------------------------------------
# Points on the tree
# ----------------------------------------------------------------------

def node_point(tree: Tree, node_id: int) -> TreePoint:
    """Canonical TreePoint of a vertex: root -> (edge 0, 0), others -> (incoming edge, 1)"""
    if node_id == tree.root:
        return TreePoint(0, 0.0)
    return TreePoint(node_id - 1, 1.0)


def canonical(tree: Tree, point: TreePoint) -> TreePoint:
    """
    Canonical form of a TreePoint

    A junction is represented by its parent edge at s=1, the root by edge 0
    at s=0, everything else is unchanged.
    """
    if not 0.0 <= point.s <= 1.0:
        raise ParameterError(f"Tree point parameter outside [0, 1]: {point.s}")
    if point.s == 0.0:
        return node_point(tree, tree.edge(point.edge).parent)
    if point.s == 1.0:
        return TreePoint(point.edge, 1.0)
    return TreePoint(point.edge, float(point.s))


def is_root(tree: Tree, point: TreePoint) -> bool:
    return canonical(tree, point) == node_point(tree, tree.root)


def tree_point_height(tree: Tree, point: TreePoint) -> float:
    """Tree-metric distance from the root (unit edge length)"""
    _, path = tree.edge_key(point.edge)
    return len(path) + point.s


def tree_distance(tree: Tree, a: TreePoint, b: TreePoint) -> float:
    """
    Path-metric distance between two tree points, every edge having length 1
    """
    branch_a, path_a = tree.edge_key(a.edge)
    branch_b, path_b = tree.edge_key(b.edge)
    height_a = tree_point_height(tree, a)
    height_b = tree_point_height(tree, b)

    if branch_a != branch_b:
        return height_a + height_b

    common = 0
    for ja, jb in zip(path_a, path_b):
        if ja != jb:
            break
        common += 1

    if common == len(path_a) == len(path_b):
        return abs(a.s - b.s)
    if common == len(path_a):
        # a's edge lies on the root path of b
        return abs(height_b - height_a)
    if common == len(path_b):
        return abs(height_a - height_b)
    fork = common + 1
    return (height_a - fork) + (height_b - fork)
