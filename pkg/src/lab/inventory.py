"""
Shipped test inventory for the sphere checks

Four suites, each a list of named instances:
  tubes           equatorial tube quadrature vs Monte-Carlo neighbourhoods
  isoperimetric   cap comparisons (A >=nbd B for B a ball of equal volume)
  decomposition   the disjoint-union identity on covering pairs
  codim1          level-set comparisons against the linear height
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from .checks import DEFAULT_EPSILONS, SIGMAS, check_codim1, check_decomposition, geqnbd_compare
from .regions import (AngularBand, Cap, GreatSphere, HeightMap, PointSet, ScalarMap, Union,
                      WholeSphere, split_at)
from .volumes import (cap_radius_for_volume, cap_volume, draw_sample, equator_tube_volume,
                      nbhd_profile)
from ..errors import ParameterError

logger = logging.getLogger(__name__)

TUBE_CASES = ((2, 1), (3, 1), (3, 2))
TUBE_EPSILONS = (0.1, 0.3, 0.6)
CODIM1_LEVEL = 0.25


@dataclass
class InstanceResult:
    instance: str
    consistent: bool
    verdict: str
    report: Dict

    def to_dict(self) -> Dict:
        return {'instance': self.instance, 'consistent': self.consistent,
                'verdict': self.verdict, 'report': self.report}


@dataclass
class SuiteReport:
    suite: str
    samples: int
    seed: int
    instances: List[InstanceResult] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(item.consistent for item in self.instances)

    @property
    def failing(self) -> List[str]:
        return [item.instance for item in self.instances if not item.consistent]

    def to_dict(self) -> Dict:
        return {
            'suite': self.suite,
            'samples': self.samples,
            'seed': self.seed,
            'consistent': self.consistent,
            'failing': self.failing,
            'instances': [item.to_dict() for item in self.instances],
        }


def _north(n: int) -> np.ndarray:
    return np.eye(n + 1)[0]


# ----------------------------------------------------------------------
# Test maps
# ----------------------------------------------------------------------

def smooth_map(n: int, seed: int = 0, scale: float = 0.3) -> ScalarMap:
    """f(x) = a.x + scale * x^T B x with Gaussian a and symmetric B"""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n + 1)
    b = rng.standard_normal((n + 1, n + 1))
    b = scale * (b + b.T) / 2

    def fn(points: np.ndarray) -> np.ndarray:
        return points @ a + np.einsum('ij,jk,ik->i', points, b, points)

    return ScalarMap(n, fn, name=f'smooth{seed}')


def codim1_maps(n: int = 2) -> List[ScalarMap]:
    """The comparison height itself, a reparameterisation, and three perturbations"""
    north = _north(n)
    tilted = north.copy()
    tilted[1] = 0.2
    return [
        HeightMap(north, lambda h: (1.0 + h) / 2.0, name='p'),
        HeightMap(north, lambda h: ((1.0 + h) / 2.0) ** 3, name='p_cubed'),
        HeightMap(tilted, name='tilted_height'),
        HeightMap(north, lambda h: np.maximum((1.0 + h) / 2.0, 0.4), name='clamped_p'),
        HeightMap(tilted, lambda h: np.maximum(h, -0.3), name='clamped_tilted'),
    ]


# ----------------------------------------------------------------------
# Suites
# ----------------------------------------------------------------------

def tubes_suite(samples: int, seed: int = 0, workers: int = 1) -> SuiteReport:
    report = SuiteReport('tubes', samples, seed)
    for index, (n, q) in enumerate(TUBE_CASES):
        block = draw_sample(n, samples, seed + index, workers)
        core = GreatSphere.equatorial(n, n - q)
        rows = []
        ok = True
        for estimate in nbhd_profile(core, TUBE_EPSILONS, samples, block=block, workers=workers):
            exact = equator_tube_volume(n, q, estimate.epsilon)
            row_ok = abs(estimate.estimate - exact) <= SIGMAS * estimate.stderr
            ok = ok and row_ok
            rows.append({**estimate.to_dict(), 'exact': exact, 'ok': row_ok})
        verdict = ('consistent with' if ok else 'inconsistent with') + ' the tube formula'
        report.instances.append(InstanceResult(f"tube n={n} q={q}", ok, verdict, {'rows': rows}))
    return report


def isoperimetric_suite(samples: int, seed: int = 0, workers: int = 1) -> SuiteReport:
    report = SuiteReport('isoperimetric', samples, seed)
    cases = []
    for n in (2, 3):
        north = _north(n)
        two_caps = Union([Cap(north, 0.4), Cap(-north, 0.4)])
        equal_cap = Cap(north, cap_radius_for_volume(n, 2 * cap_volume(n, 0.4)))
        cases.append((f"two caps vs ball n={n}", two_caps, equal_cap))

        band = AngularBand(north, math.pi / 2 - 0.3, math.pi / 2 + 0.3, name='band')
        band_cap = Cap(north, cap_radius_for_volume(n, cap_volume(n, math.pi / 2 + 0.3)
                                                    - cap_volume(n, math.pi / 2 - 0.3)))
        cases.append((f"band vs ball n={n}", band, band_cap))

        cases.append((f"equator vs point n={n}", GreatSphere.equatorial(n, n - 1), PointSet([north])))
        cases.append((f"hemisphere vs hemisphere n={n}", Cap(north, math.pi / 2), Cap(-north, math.pi / 2)))

    for index, (name, larger, smaller) in enumerate(cases):
        comparison = geqnbd_compare(larger, smaller, DEFAULT_EPSILONS, samples,
                                    seed=seed + index, workers=workers)
        report.instances.append(InstanceResult(name, comparison.consistent, comparison.verdict,
                                               comparison.to_dict()))
    return report


def decomposition_suite(samples: int, seed: int = 0, workers: int = 1,
                        epsilon: float = 0.1) -> SuiteReport:
    report = SuiteReport('decomposition', samples, seed)
    north2 = _north(2)
    north3 = _north(3)
    pairs = [
        ('hemispheres n=2', AngularBand(north2, 0.0, math.pi / 2, name='north'),
         AngularBand(north2, math.pi / 2, math.pi, name='south')),
        ('sphere and point n=2', WholeSphere(2), PointSet([north2])),
        ('height split n=3', *split_at(HeightMap(north3 + 0.5 * np.eye(4)[1], name='h'), 0.3)),
        ('smooth split n=2', *split_at(smooth_map(2, seed), 0.0, seed=seed)),
    ]
    for index, (name, x, y) in enumerate(pairs):
        result = check_decomposition(x, y, epsilon, samples, seed=seed + index, workers=workers)
        report.instances.append(InstanceResult(name, result.consistent, result.verdict,
                                               result.to_dict()))
    return report


def codim1_suite(samples: int, seed: int = 0, workers: int = 1) -> SuiteReport:
    report = SuiteReport('codim1', samples, seed)
    block = draw_sample(2, samples, seed, workers)
    for fn in codim1_maps(2):
        result = check_codim1(fn, CODIM1_LEVEL, samples, seed=seed, workers=workers, block=block)
        report.instances.append(InstanceResult(fn.name, result.consistent, result.verdict,
                                               result.to_dict()))
    return report


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    'tubes': tubes_suite,
    'isoperimetric': isoperimetric_suite,
    'decomposition': decomposition_suite,
    'codim1': codim1_suite,
}


def run_suite(name: str, samples: int, seed: int = 0, workers: int = 1) -> SuiteReport:
    """
    Run one named suite

    Args:
        name: One of SUITES
        samples: Sphere samples per instance
        seed: Master seed
        workers: Threads

    Returns:
        SuiteReport
    """
    if name not in SUITES:
        raise ParameterError(f"Unknown suite '{name}'; choose from {', '.join(SUITES)}")
    logger.info("=" * 60)
    logger.info(f"Suite {name}: {samples} samples, seed {seed}")
    logger.info("=" * 60)
    report = SUITES[name](samples, seed=seed, workers=workers)
    for item in report.instances:
        level = logging.INFO if item.consistent else logging.WARNING
        logger.log(level, f"  {item.instance}: {item.verdict}")
    return report
