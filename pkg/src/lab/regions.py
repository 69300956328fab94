"""
Region oracles on S^n: membership and geodesic distance.

Points are rows of an (N, n+1) array of unit vectors. Analytic regions
(caps, bands around great subspheres, level sets of height functions)
compute exact geodesic distances; level sets of arbitrary scalar maps are
approximated by a point cloud traced along random great circles, with the
cloud's resolution recorded.
"""
import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from ..errors import ParameterError

logger = logging.getLogger(__name__)

MEMBER_TOL = 1e-12


def _angles(points: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(points @ axis, -1.0, 1.0))


def _unit(vector: Sequence[float]) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ParameterError("Direction vector must be nonzero")
    return vector / norm


class RegionOracle(ABC):
    """A closed subset of S^n"""

    name: str = 'region'
    resolution: float = 0.0

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError(f"Sphere dimension must be >= 1, got {n}")
        self.n = n

    @abstractmethod
    def distance(self, points: np.ndarray) -> np.ndarray:
        """Geodesic distance from every point to the region"""

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.distance(points) <= MEMBER_TOL

    def intersect(self, other: 'RegionOracle') -> Optional['RegionOracle']:
        """Exact intersection oracle when one is known, else None"""
        return None

    def describe(self) -> dict:
        return {'name': self.name, 'n': self.n, 'resolution': self.resolution}


class WholeSphere(RegionOracle):
    name = 'sphere'

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))

    def intersect(self, other: RegionOracle) -> Optional[RegionOracle]:
        return other


class AngularBand(RegionOracle):
    """
    {x : theta_min <= angle(x, axis) <= theta_max}

    Caps (theta_min = 0), great hyperspheres (both pi/2) and level sets of
    height functions are all bands.
    """
    name = 'band'

    def __init__(self, axis: Sequence[float], theta_min: float, theta_max: float, name: str = ''):
        axis = _unit(axis)
        super().__init__(len(axis) - 1)
        if not 0.0 <= theta_min <= theta_max <= math.pi:
            raise ParameterError(f"Band angles must satisfy 0 <= {theta_min} <= {theta_max} <= pi")
        self.axis = axis
        self.theta_min = float(theta_min)
        self.theta_max = float(theta_max)
        if name:
            self.name = name

    def distance(self, points: np.ndarray) -> np.ndarray:
        theta = _angles(points, self.axis)
        return np.maximum(0.0, np.maximum(self.theta_min - theta, theta - self.theta_max))

    def intersect(self, other: RegionOracle) -> Optional[RegionOracle]:
        if isinstance(other, WholeSphere):
            return self
        if isinstance(other, AngularBand):
            if np.allclose(other.axis, self.axis, atol=1e-15):
                other_min, other_max = other.theta_min, other.theta_max
            elif np.allclose(other.axis, -self.axis, atol=1e-15):
                other_min, other_max = math.pi - other.theta_max, math.pi - other.theta_min
            else:
                return None
            lo = max(self.theta_min, other_min)
            hi = min(self.theta_max, other_max)
            if 0 < lo - hi <= 1e-12:
                lo = hi = 0.5 * (lo + hi)
            if lo <= hi:
                return AngularBand(self.axis, lo, hi, name=f"{self.name}&{other.name}")
        return None

    def describe(self) -> dict:
        data = super().describe()
        data.update({'axis': self.axis.tolist(), 'theta_min': self.theta_min,
                     'theta_max': self.theta_max})
        return data


class Cap(AngularBand):
    """Closed geodesic ball"""

    def __init__(self, centre: Sequence[float], radius: float):
        if not 0.0 <= radius <= math.pi:
            raise ParameterError(f"Cap radius must lie in [0, pi], got {radius}")
        super().__init__(centre, 0.0, radius, name='cap')

    @property
    def radius(self) -> float:
        return self.theta_max


class GreatSphere(RegionOracle):
    """Totally geodesic S^k = S^n intersected with a (k+1)-dimensional subspace"""
    name = 'great_sphere'

    def __init__(self, basis: Sequence[Sequence[float]]):
        basis = np.atleast_2d(np.asarray(basis, dtype=float))
        super().__init__(basis.shape[1] - 1)
        q, _ = np.linalg.qr(basis.T)
        self.basis = q.T
        self.k = self.basis.shape[0] - 1

    @classmethod
    def equatorial(cls, n: int, k: int) -> 'GreatSphere':
        """S^k spanned by the last k+1 coordinates of R^{n+1}"""
        if not 0 <= k <= n:
            raise ParameterError(f"Need 0 <= k <= n, got k={k}, n={n}")
        return cls(np.eye(n + 1)[n - k:])

    def distance(self, points: np.ndarray) -> np.ndarray:
        proj = np.linalg.norm(points @ self.basis.T, axis=1)
        return np.arccos(np.clip(proj, -1.0, 1.0))

    def describe(self) -> dict:
        data = super().describe()
        data['k'] = self.k
        return data


class Band(RegionOracle):
    """Closed w-neighbourhood of a great subsphere"""
    name = 'tube'

    def __init__(self, core: GreatSphere, width: float):
        super().__init__(core.n)
        self.core = core
        self.width = float(width)

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(0.0, self.core.distance(points) - self.width)


class PointSet(RegionOracle):
    name = 'points'

    def __init__(self, points: Sequence[Sequence[float]]):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        super().__init__(pts.shape[1] - 1)
        self.points = pts / np.linalg.norm(pts, axis=1, keepdims=True)

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.arccos(np.clip(points @ self.points.T, -1.0, 1.0)).min(axis=1)


class Union(RegionOracle):
    name = 'union'

    def __init__(self, parts: Sequence[RegionOracle]):
        if not parts:
            raise ParameterError("Union needs at least one region")
        super().__init__(parts[0].n)
        self.parts = list(parts)
        self.resolution = max(p.resolution for p in self.parts)

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.min([p.distance(points) for p in self.parts], axis=0)

    def describe(self) -> dict:
        data = super().describe()
        data['parts'] = [p.describe() for p in self.parts]
        return data


# ----------------------------------------------------------------------
# Scalar maps and their level sets
# ----------------------------------------------------------------------

class ScalarMap:
    """A continuous function on S^n evaluated on rows of unit vectors"""

    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray], name: str = 'f'):
        self.n = n
        self.fn = fn
        self.name = name

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.atleast_2d(points)), dtype=float)

    def level_set(self, t: float, circles: int = 4000, seed: int = 0) -> RegionOracle:
        return CloudLevelSet(self, t, circles=circles, seed=seed)

    def sublevel_set(self, t: float, circles: int = 4000, seed: int = 0) -> RegionOracle:
        return CloudThresholdSet(self, t, below=True, circles=circles, seed=seed)

    def superlevel_set(self, t: float, circles: int = 4000, seed: int = 0) -> RegionOracle:
        return CloudThresholdSet(self, t, below=False, circles=circles, seed=seed)


class HeightMap(ScalarMap):
    """
    f(x) = g(w . x) with g continuous and nondecreasing

    Level sets are angular bands around w, computed exactly; g may have
    plateaus, which turn level sets into thick bands.
    """

    def __init__(self, direction: Sequence[float], transform: Callable[[np.ndarray], np.ndarray] = None,
                 name: str = 'height'):
        direction = np.asarray(direction, dtype=float)
        self.direction = direction
        self.length = float(np.linalg.norm(direction))
        if self.length == 0:
            raise ParameterError("Height direction must be nonzero")
        self.transform = transform or (lambda h: h)
        super().__init__(len(direction) - 1, lambda pts: self.transform(pts @ self.direction), name)

    def _g(self, h: float) -> float:
        return float(self.transform(np.array([h]))[0])

    def height_interval(self, t: float) -> Tuple[float, float]:
        """
        [inf {h : g(h) >= t}, sup {h : g(h) <= t}] within [-|w|, |w|]

        Empty level sets return lo > hi.
        """
        a, b = -self.length, self.length
        ga, gb = self._g(a), self._g(b)
        if t <= ga:
            lo = a
        elif t > gb:
            lo = b + 1.0
        else:
            lo = self._bisect(lambda h: self._g(h) >= t, a, b)
        if t >= gb:
            hi = b
        elif t < ga:
            hi = a - 1.0
        else:
            hi = self._bisect(lambda h: self._g(h) > t, a, b)
        return lo, hi

    @staticmethod
    def _bisect(pred: Callable[[float], bool], a: float, b: float, steps: int = 200) -> float:
        """Smallest h in [a, b] with pred(h), pred monotone"""
        for _ in range(steps):
            mid = 0.5 * (a + b)
            if pred(mid):
                b = mid
            else:
                a = mid
            if b - a <= 1e-15 * max(1.0, abs(a)):
                break
        return b

    def _theta(self, h: float) -> float:
        return math.acos(max(-1.0, min(1.0, h / self.length)))

    def level_set(self, t: float, **_) -> RegionOracle:
        lo, hi = self.height_interval(t)
        if lo > hi or lo > self.length or hi < -self.length:
            raise ParameterError(f"Level {t} is not attained by {self.name}")
        return AngularBand(self.direction, self._theta(hi), self._theta(lo), name=f"{self.name}={t:g}")

    def sublevel_set(self, t: float, **_) -> RegionOracle:
        _, hi = self.height_interval(t)
        if hi < -self.length:
            raise ParameterError(f"Sublevel set {self.name} <= {t} is empty")
        return AngularBand(self.direction, self._theta(hi), math.pi, name=f"{self.name}<={t:g}")

    def superlevel_set(self, t: float, **_) -> RegionOracle:
        lo, _ = self.height_interval(t)
        if lo > self.length:
            raise ParameterError(f"Superlevel set {self.name} >= {t} is empty")
        return AngularBand(self.direction, 0.0, self._theta(lo), name=f"{self.name}>={t:g}")

    def sublevel_volume_fraction(self, t: float, strict: bool = True) -> float:
        """Exact fraction of S^n where f < t (strict) or f <= t"""
        from .volumes import cap_volume, sphere_volume
        lo, hi = self.height_interval(t)
        h = lo if strict else hi
        h = max(-self.length, min(self.length, h))
        return cap_volume(self.n, math.pi - self._theta(h)) / sphere_volume(self.n)


def trace_level_points(fn: ScalarMap, t: float, circles: int, seed: int,
                       steps: int = 256) -> np.ndarray:
    """
    Points of {f = t} found on random great circles

    Each circle is sampled at `steps` angles; sign changes of f - t are
    refined with brentq.
    """
    rng = np.random.default_rng(seed)
    dim = fn.n + 1
    angles = np.linspace(0.0, 2 * math.pi, steps + 1)
    found: List[np.ndarray] = []
    for _ in range(circles):
        frame, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
        u, v = frame[:, 0], frame[:, 1]
        ring = np.outer(np.cos(angles), u) + np.outer(np.sin(angles), v)
        values = fn(ring) - t
        for i in np.flatnonzero(values[:-1] * values[1:] <= 0):
            a, b = angles[i], angles[i + 1]
            if values[i] == 0:
                root = a
            elif values[i + 1] == 0:
                continue
            else:
                root = brentq(lambda s: float(fn(np.cos(s) * u + np.sin(s) * v)[0]) - t, a, b,
                              xtol=1e-12)
            found.append(np.cos(root) * u + np.sin(root) * v)
    if not found:
        raise ParameterError(f"No points of the level set {fn.name} = {t} were found")
    return np.array(found)


class CloudLevelSet(RegionOracle):
    """Level set {f = t} as a point cloud with KD-tree distances"""
    name = 'cloud_level_set'

    def __init__(self, fn: ScalarMap, t: float, circles: int = 4000, seed: int = 0):
        super().__init__(fn.n)
        self.name = f"{fn.name}={t:g}"
        self.fn = fn
        self.t = float(t)
        self.points = trace_level_points(fn, t, circles, seed)
        self.tree = cKDTree(self.points)
        # Hausdorff distance from an independent probe cloud
        probes = trace_level_points(fn, t, max(1, circles // 4), seed + 1)
        self.resolution = float(self.distance(probes).max())
        logger.debug(f"Level set {fn.name}={t:g}: {len(self.points)} points, "
                     f"resolution {self.resolution:.3g}")

    def distance(self, points: np.ndarray) -> np.ndarray:
        chord, _ = self.tree.query(points)
        return 2 * np.arcsin(np.minimum(1.0, chord / 2))

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.abs(self.fn(points) - self.t) <= MEMBER_TOL

    def describe(self) -> dict:
        data = super().describe()
        data.update({'t': self.t, 'points': len(self.points)})
        return data


class CloudThresholdSet(RegionOracle):
    """{f <= t} (below) or {f >= t}; distance via the cloud of {f = t}"""
    name = 'cloud_threshold_set'

    def __init__(self, fn: ScalarMap, t: float, below: bool, circles: int = 4000, seed: int = 0,
                 boundary: Optional[CloudLevelSet] = None):
        super().__init__(fn.n)
        self.fn = fn
        self.t = float(t)
        self.below = below
        self.name = f"{fn.name}{'<=' if below else '>='}{t:g}"
        self.boundary = boundary or CloudLevelSet(fn, t, circles=circles, seed=seed)
        self.resolution = self.boundary.resolution

    def contains(self, points: np.ndarray) -> np.ndarray:
        values = self.fn(points)
        return values <= self.t if self.below else values >= self.t

    def distance(self, points: np.ndarray) -> np.ndarray:
        inside = self.contains(points)
        return np.where(inside, 0.0, self.boundary.distance(points))

    def intersect(self, other: RegionOracle) -> Optional[RegionOracle]:
        if (isinstance(other, CloudThresholdSet) and other.fn is self.fn
                and other.t == self.t and other.below != self.below):
            return self.boundary
        return None


def split_at(fn: ScalarMap, t: float, circles: int = 4000,
             seed: int = 0) -> Tuple[RegionOracle, RegionOracle]:
    """({f <= t}, {f >= t}) sharing one boundary cloud, so they intersect exactly in it"""
    if isinstance(fn, HeightMap):
        return fn.sublevel_set(t), fn.superlevel_set(t)
    boundary = CloudLevelSet(fn, t, circles=circles, seed=seed)
    return (CloudThresholdSet(fn, t, below=True, boundary=boundary),
            CloudThresholdSet(fn, t, below=False, boundary=boundary))
