"""
Linear projections p(x) = (v_1 . x, ..., v_{q-1} . x) with the transversality check.

The vectors are accepted only if {e_i, e_j, v_1, ..., v_{q-1}} is linearly
independent for every pair i < j, which makes every transverse section of a
codimension-2 coordinate plane have the expected dimension.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import ParameterError, ProjectionError

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 16


@dataclass(frozen=True)
class ProjectionSpec:
    vectors: Tuple[Tuple[float, ...], ...]
    M: float
    resamples: int = 0

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.vectors, dtype=float)

    @property
    def ambient_dim(self) -> int:
        return len(self.vectors[0])

    @property
    def n(self) -> int:
        return self.ambient_dim - 1

    @property
    def q(self) -> int:
        return len(self.vectors) + 1

    def project(self, ambient: Sequence[float]) -> np.ndarray:
        return self.matrix @ np.asarray(ambient, dtype=float)

    def to_dict(self) -> dict:
        return {'v': [list(v) for v in self.vectors], 'M': self.M, 'resamples': self.resamples}


def pair_matrix(vectors: np.ndarray, i: int, j: int) -> np.ndarray:
    """Columns e_i, e_j, v_1, ..., v_{q-1}"""
    dim = vectors.shape[1]
    eye = np.eye(dim)
    return np.column_stack([eye[i], eye[j], *vectors])


def is_transverse(vectors: np.ndarray) -> bool:
    """Exact rank check over every coordinate pair"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = vectors.shape[1]
    need = vectors.shape[0] + 2
    if need > dim:
        return False
    for i, j in itertools.combinations(range(dim), 2):
        if np.linalg.matrix_rank(pair_matrix(vectors, i, j)) < need:
            return False
    return True


def min_singular_value(columns: np.ndarray) -> float:
    """Smallest singular value after normalising every column"""
    columns = np.asarray(columns, dtype=float)
    norms = np.linalg.norm(columns, axis=0)
    if np.any(norms == 0):
        return 0.0
    return float(np.linalg.svd(columns / norms, compute_uv=False).min())


def transversality_margin(spec: ProjectionSpec) -> float:
    """Minimum over i < j of the smallest singular value of [e_i e_j v_1 ... v_{q-1}]"""
    vectors = spec.matrix
    return min(min_singular_value(pair_matrix(vectors, i, j))
               for i, j in itertools.combinations(range(spec.ambient_dim), 2))


def vertex_radius(vectors: np.ndarray) -> float:
    """M: max over vertices w of {0,1}^{n+1} of |V w|"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    vertices = np.array(list(itertools.product((0.0, 1.0), repeat=vectors.shape[1])))
    return float(np.linalg.norm(vertices @ vectors.T, axis=1).max())


def make_projection(vectors: Sequence[Sequence[float]], resamples: int = 0) -> ProjectionSpec:
    """
    Validate explicit projection vectors

    Raises:
        ProjectionError: if the transversality condition fails
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if not is_transverse(vectors):
        raise ProjectionError(f"Projection vectors {vectors.tolist()} are not transverse to "
                              f"every pair of coordinate directions")
    return ProjectionSpec(vectors=tuple(tuple(float(c) for c in v) for v in vectors),
                          M=vertex_radius(vectors), resamples=resamples)


def build_projection(n: int, q: int, seed: int = 0,
                     vectors: Optional[Sequence[Sequence[float]]] = None,
                     max_resamples: int = MAX_RESAMPLES) -> ProjectionSpec:
    """
    Draw (or accept) q-1 projection vectors in R^{n+1}

    Args:
        n: Sphere dimension
        q: Target dimension
        seed: Seed for the Gaussian draws
        vectors: Injected vectors; checked, never resampled
        max_resamples: Draws allowed before giving up

    Returns:
        ProjectionSpec with M the exact vertex maximum
    """
    # q = n still leaves q + 1 <= n + 1 columns in every rank check
    if not n >= q > 1:
        raise ParameterError(f"Projection needs n >= q > 1, got n={n}, q={q}")
    if vectors is not None:
        spec = make_projection(vectors)
        if spec.matrix.shape != (q - 1, n + 1):
            raise ParameterError(f"Expected {q - 1} vectors in R^{n + 1}, got shape {spec.matrix.shape}")
        return spec

    rng = np.random.default_rng(seed)
    for attempt in range(max_resamples + 1):
        draw = rng.standard_normal((q - 1, n + 1))
        if is_transverse(draw):
            if attempt:
                logger.warning(f"Projection accepted after {attempt} resample(s)")
            return make_projection(draw, resamples=attempt)
        logger.warning(f"Projection draw {attempt} failed the transversality check")
    raise ProjectionError(f"No transverse projection after {max_resamples} resamples (seed={seed})")
