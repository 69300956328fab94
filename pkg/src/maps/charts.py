"""
Face charts of the cube boundary and the radial map to the sphere.

Face f of I^{n+1} has axis f // 2 and side f % 2. Its chart maps I^n into
the face by inserting the coordinate `side` at position `axis`.

The sphere is centred on the cube centre c = (1/2, ..., 1/2):

    psi(x) = c + x / (2 max_i |x_i|)        S^n -> boundary of I^{n+1}
    psi^-1(y) = (y - c) / |y - c|
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import ParameterError

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the cube boundary in chart form"""
    face: int
    local: Tuple[float, ...]

    @property
    def axis(self) -> int:
        return self.face // 2

    @property
    def side(self) -> int:
        return self.face % 2

    @property
    def n(self) -> int:
        return len(self.local)

    @property
    def ambient(self) -> np.ndarray:
        return face_chart(self.face, self.local)

    def to_dict(self) -> dict:
        return {'face': self.face, 'local': list(self.local)}


def face_count(n: int) -> int:
    return 2 * (n + 1)


def face_chart(face: int, local: Sequence[float]) -> np.ndarray:
    """Ambient coordinates of a chart point"""
    local = np.asarray(local, dtype=float)
    n = len(local)
    if not 0 <= face < face_count(n):
        raise ParameterError(f"Face index {face} outside [0, {face_count(n)})")
    return np.insert(local, face // 2, float(face % 2))


def cube_point(y: Sequence[float], tol: float = UNIT_TOL) -> BoundaryPoint:
    """
    Chart form of an ambient boundary point

    Points on several faces go to the face with the lowest axis, side 0
    before side 1.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < -tol) or np.any(y > 1 + tol):
        raise ParameterError(f"Point {y.tolist()} lies outside the unit cube")
    for axis in range(len(y)):
        for side in (0, 1):
            if abs(y[axis] - side) <= tol:
                local = np.clip(np.delete(y, axis), 0.0, 1.0)
                return BoundaryPoint(2 * axis + side, tuple(local.tolist()))
    raise ParameterError(f"Point {y.tolist()} is not on the cube boundary")


def containing_faces(y: Sequence[float], tol: float = UNIT_TOL) -> Tuple[BoundaryPoint, ...]:
    """Every chart representation of an ambient boundary point"""
    y = np.asarray(y, dtype=float)
    reps = []
    for axis in range(len(y)):
        for side in (0, 1):
            if abs(y[axis] - side) <= tol:
                local = np.clip(np.delete(y, axis), 0.0, 1.0)
                reps.append(BoundaryPoint(2 * axis + side, tuple(local.tolist())))
    return tuple(reps)


def sphere_to_cube(x: Sequence[float]) -> BoundaryPoint:
    """
    psi: unit sphere -> cube boundary

    Args:
        x: Unit vector in R^{n+1}

    Returns:
        BoundaryPoint on the face of the largest |x_i| (lowest axis on ties)
    """
    x = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(x))
    if norm == 0.0 or abs(norm - 1.0) > UNIT_TOL * max(1, len(x)):
        raise ParameterError(f"Expected a unit vector, got norm {norm:.17g}")
    axis = int(np.argmax(np.abs(x)))
    peak = abs(x[axis])
    side = 1 if x[axis] > 0 else 0
    local = np.clip(0.5 + np.delete(x, axis) / (2.0 * peak), 0.0, 1.0)
    return BoundaryPoint(2 * axis + side, tuple(local.tolist()))


def cube_to_sphere(point: Union[BoundaryPoint, Sequence[float]]) -> np.ndarray:
    """psi^-1: cube boundary -> unit sphere"""
    if isinstance(point, BoundaryPoint):
        y = point.ambient
    else:
        y = np.asarray(point, dtype=float)
        cube_point(y)  # validates the point is on the boundary
    centred = y - 0.5
    return centred / np.linalg.norm(centred)


def sample_boundary(n: int, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniform samples of the boundary of I^{n+1}

    Faces are congruent, so a uniform face index and uniform chart
    coordinates give the uniform surface measure.

    Returns:
        (faces, locals) with shapes (count,) and (count, n)
    """
    faces = rng.integers(0, face_count(n), size=count)
    local = rng.random((count, n))
    return faces, local


def sample_sphere(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of S^n as rows of a (count, n+1) array"""
    g = rng.standard_normal((count, n + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
