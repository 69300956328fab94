"""
Volumes on S^n: closed forms, quadrature and Monte-Carlo neighbourhoods.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from .regions import RegionOracle
from ..errors import ParameterError
from ..maps.charts import sample_sphere
from ..utils.parallel import chunked_map, sampled_chunks

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-12
MIN_SAMPLES = 1_000

# Clouds coarser than this fraction of epsilon raise the resolution flag
RESOLUTION_RATIO = 0.1


def sphere_volume(n: int) -> float:
    """Vol_n(S^n) = 2 pi^((n+1)/2) / Gamma((n+1)/2); S^0 has two points"""
    if n < 0:
        raise ParameterError(f"Sphere dimension must be >= 0, got {n}")
    return float(2 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2))


def _integrate(fn, upper: float) -> float:
    value, _ = quad(fn, 0.0, upper, epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
    return float(value)


def cap_volume(n: int, radius: float) -> float:
    """
    Volume of a closed geodesic ball of S^n

    Vol(S^{n-1}) * integral_0^radius sin^{n-1}(t) dt
    """
    if n < 1:
        raise ParameterError(f"Sphere dimension must be >= 1, got {n}")
    if not 0.0 <= radius <= math.pi:
        raise ParameterError(f"Cap radius must lie in [0, pi], got {radius}")
    if radius == math.pi:
        return sphere_volume(n)
    return sphere_volume(n - 1) * _integrate(lambda t: math.sin(t) ** (n - 1), radius)


def equator_tube_volume(n: int, q: int, epsilon: float) -> float:
    """
    Volume of the epsilon-tube around an equatorial S^{n-q} in S^n

    Vol(S^{n-q}) Vol(S^{q-1}) * integral_0^eps cos^{n-q}(t) sin^{q-1}(t) dt
    """
    if not 1 <= q <= n:
        raise ParameterError(f"Need 1 <= q <= n, got n={n}, q={q}")
    if not 0.0 < epsilon <= math.pi / 2:
        raise ParameterError(f"Tube radius must lie in (0, pi/2], got {epsilon}")
    integral = _integrate(lambda t: math.cos(t) ** (n - q) * math.sin(t) ** (q - 1), epsilon)
    return sphere_volume(n - q) * sphere_volume(q - 1) * integral


def cap_radius_for_volume(n: int, volume: float) -> float:
    """Inverse of cap_volume on [0, pi]"""
    total = sphere_volume(n)
    if not 0.0 <= volume <= total:
        raise ParameterError(f"Cap volume {volume} is outside [0, {total}]")
    if volume == 0.0:
        return 0.0
    if volume == total:
        return math.pi
    return brentq(lambda rho: cap_volume(n, rho) - volume, 0.0, math.pi, xtol=1e-14)


def band_volume(n: int, theta_min: float, theta_max: float) -> float:
    """Volume of {theta_min <= angle(x, axis) <= theta_max}"""
    return cap_volume(n, theta_max) - cap_volume(n, theta_min)


def band_neighbourhood_volume(n: int, theta_min: float, theta_max: float, epsilon: float) -> float:
    """Volume of the epsilon-neighbourhood of an angular band"""
    return band_volume(n, max(0.0, theta_min - epsilon), min(math.pi, theta_max + epsilon))


@dataclass
class NeighborhoodEstimate:
    """Monte-Carlo estimate of Vol_n(E_epsilon)"""
    epsilon: float
    samples: int
    hits: int
    total: float
    resolution: float = 0.0
    coarse: bool = False

    @property
    def fraction(self) -> float:
        return self.hits / self.samples

    @property
    def estimate(self) -> float:
        return self.fraction * self.total

    @property
    def stderr(self) -> float:
        p = self.fraction
        return math.sqrt(p * (1 - p) / self.samples) * self.total

    def to_dict(self) -> Dict:
        return {
            'epsilon': self.epsilon,
            'samples': self.samples,
            'fraction': self.fraction,
            'estimate': self.estimate,
            'stderr': self.stderr,
            'resolution': self.resolution,
            'coarse': self.coarse,
        }


@dataclass
class SampleBlock:
    """Shared uniform sample of S^n, reused across regions and radii"""
    n: int
    points: np.ndarray
    seed: int
    _distances: Dict[int, tuple] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def distances(self, region: RegionOracle, workers: int = 1) -> np.ndarray:
        key = id(region)
        cached = self._distances.get(key)
        if cached is None or cached[0] is not region:
            chunks = np.array_split(self.points, max(1, math.ceil(self.size / 65_536)))
            parts = chunked_map(region.distance, chunks, workers)
            cached = (region, np.concatenate(parts))
            self._distances[key] = cached
        return cached[1]

    def members(self, region: RegionOracle) -> np.ndarray:
        return region.contains(self.points)


def draw_sample(n: int, samples: int, seed: int = 0, workers: int = 1) -> SampleBlock:
    """Uniform sample of S^n built from fixed-size seeded chunks"""
    if samples < MIN_SAMPLES:
        raise ParameterError(f"At least {MIN_SAMPLES} samples are required, got {samples}")
    parts = chunked_map(lambda job: sample_sphere(n, job[0], job[1]),
                        sampled_chunks(samples, seed), workers)
    return SampleBlock(n=n, points=np.vstack(parts), seed=seed)


def _estimate(region: RegionOracle, block: SampleBlock, epsilon: float, workers: int) -> NeighborhoodEstimate:
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    hits = int(np.count_nonzero(block.distances(region, workers) <= epsilon))
    coarse = region.resolution > RESOLUTION_RATIO * epsilon
    if coarse:
        logger.warning(f"Region {region.name}: cloud resolution {region.resolution:.3g} is coarser "
                       f"than epsilon/10 = {epsilon / 10:.3g}")
    return NeighborhoodEstimate(epsilon=epsilon, samples=block.size, hits=hits,
                                total=sphere_volume(block.n), resolution=region.resolution,
                                coarse=coarse)


def nbhd_volume_mc(region: RegionOracle, epsilon: float, samples: int, seed: int = 0,
                   workers: int = 1, block: Optional[SampleBlock] = None) -> NeighborhoodEstimate:
    """
    Estimate Vol_n of the closed epsilon-neighbourhood of a region

    Args:
        region: Region oracle on S^n
        epsilon: Geodesic radius, > 0
        samples: Uniform sphere samples, >= 1000
        seed: Master seed
        workers: Threads
        block: Reuse an existing sample (common random numbers)

    Returns:
        NeighborhoodEstimate; coarse is set when the region's cloud
        resolution exceeds epsilon/10
    """
    block = block or draw_sample(region.n, samples, seed, workers)
    return _estimate(region, block, epsilon, workers)


def nbhd_profile(region: RegionOracle, epsilons: Sequence[float], samples: int, seed: int = 0,
                 workers: int = 1, block: Optional[SampleBlock] = None) -> List[NeighborhoodEstimate]:
    """nbhd_volume_mc over a grid of radii on one shared sample"""
    if not epsilons:
        raise ParameterError("The epsilon grid is empty")
    block = block or draw_sample(region.n, samples, seed, workers)
    return [_estimate(region, block, eps, workers) for eps in epsilons]


def region_volume_mc(region: RegionOracle, block: SampleBlock) -> NeighborhoodEstimate:
    """Vol_n(E) itself, i.e. the zero-radius neighbourhood"""
    hits = int(np.count_nonzero(block.members(region)))
    return NeighborhoodEstimate(epsilon=0.0, samples=block.size, hits=hits,
                                total=sphere_volume(block.n), resolution=region.resolution)


def exact_volume(region: RegionOracle) -> Optional[float]:
    """Vol_n(E) in closed form for analytic regions, None otherwise"""
    from .regions import AngularBand, GreatSphere, PointSet, WholeSphere
    if isinstance(region, WholeSphere):
        return sphere_volume(region.n)
    if isinstance(region, AngularBand):
        return band_volume(region.n, region.theta_min, region.theta_max)
    if isinstance(region, PointSet):
        return 0.0
    if isinstance(region, GreatSphere) and region.k < region.n:
        return 0.0
    return None
