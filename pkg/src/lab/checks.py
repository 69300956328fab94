"""
Statistical checks of the neighbourhood-volume statements on S^n.

Every verdict compares Monte-Carlo estimates on a shared sample against a
3-standard-error band and is phrased as "consistent with"; nothing here
proves an inequality.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .regions import AngularBand, HeightMap, RegionOracle, ScalarMap
from .volumes import (SampleBlock, cap_radius_for_volume, cap_volume, draw_sample, exact_volume,
                      nbhd_profile, region_volume_mc, sphere_volume)
from ..errors import CoverageError, ParameterError

logger = logging.getLogger(__name__)

SIGMAS = 3.0
DEFAULT_EPSILONS = (0.05, 0.1, 0.2)

# Bisection for alpha/beta stops once the bracketing volumes differ by this
# fraction of Vol(S^n)
VOLUME_TOL = 1e-3

# Extra equality slack on top of the 3-sigma band for the codim-1 margin
EQUALITY_SLACK = 2e-3

# The sample is evaluated in this many chunks; each chunk gives an independent
# sublevel estimate at its own level
MONOTONE_CHUNKS = 8


# ----------------------------------------------------------------------
# Larger-in-neighbourhood comparison
# ----------------------------------------------------------------------

@dataclass
class ComparisonRow:
    epsilon: float
    larger: float
    larger_stderr: float
    smaller: float
    smaller_stderr: float
    coarse: bool = False

    @property
    def tolerance(self) -> float:
        return SIGMAS * math.hypot(self.larger_stderr, self.smaller_stderr)

    @property
    def difference(self) -> float:
        return self.larger - self.smaller

    @property
    def ok(self) -> bool:
        return self.difference >= -self.tolerance

    def to_dict(self) -> Dict:
        return {
            'epsilon': self.epsilon,
            'E': self.larger,
            'E_stderr': self.larger_stderr,
            'F': self.smaller,
            'F_stderr': self.smaller_stderr,
            'difference': self.difference,
            'tolerance': self.tolerance,
            'ok': self.ok,
            'coarse': self.coarse,
        }


@dataclass
class ComparisonReport:
    larger: str
    smaller: str
    samples: int
    rows: List[ComparisonRow] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def coarse(self) -> bool:
        return any(row.coarse for row in self.rows)

    @property
    def verdict(self) -> str:
        relation = f"{self.larger} >=nbd {self.smaller}"
        if self.consistent:
            return f"consistent with {relation}"
        failing = ', '.join(f"{row.epsilon:g}" for row in self.rows if not row.ok)
        return f"inconsistent with {relation} at epsilon = {failing}"

    def to_dict(self) -> Dict:
        return {
            'E': self.larger,
            'F': self.smaller,
            'samples': self.samples,
            'verdict': self.verdict,
            'consistent': self.consistent,
            'coarse': self.coarse,
            'rows': [row.to_dict() for row in self.rows],
        }


def geqnbd_compare(larger: RegionOracle, smaller: RegionOracle, epsilons: Sequence[float],
                   samples: int, seed: int = 0, workers: int = 1,
                   block: Optional[SampleBlock] = None) -> ComparisonReport:
    """
    Test E >=nbd F on a finite grid of radii

    Args:
        larger: E
        smaller: F
        epsilons: Radii, nonempty
        samples: Sphere samples (ignored when block is given)
        seed: Master seed
        workers: Threads
        block: Shared sample

    Returns:
        ComparisonReport; consistent iff est(E_eps) >= est(F_eps) - 3 sigma
        for every grid radius
    """
    if larger.n != smaller.n:
        raise ParameterError(f"Regions live on S^{larger.n} and S^{smaller.n}")
    if not epsilons:
        raise ParameterError("The epsilon grid is empty")
    block = block if block is not None else draw_sample(larger.n, samples, seed, workers)
    e_profile = nbhd_profile(larger, epsilons, samples, block=block, workers=workers)
    f_profile = nbhd_profile(smaller, epsilons, samples, block=block, workers=workers)
    report = ComparisonReport(larger=larger.name, smaller=smaller.name, samples=block.size)
    for e_est, f_est in zip(e_profile, f_profile):
        report.rows.append(ComparisonRow(e_est.epsilon, e_est.estimate, e_est.stderr,
                                         f_est.estimate, f_est.stderr, e_est.coarse or f_est.coarse))
    logger.debug(f"geqnbd {larger.name} vs {smaller.name}: {report.verdict}")
    return report


# ----------------------------------------------------------------------
# Disjoint-union decomposition
# ----------------------------------------------------------------------

@dataclass
class Term:
    value: float
    stderr: float

    def to_dict(self) -> Dict:
        return {'value': self.value, 'stderr': self.stderr}


@dataclass
class DecompositionReport:
    x: str
    y: str
    epsilon: float
    samples: int
    terms: Dict[str, Term]
    pointwise_mismatches: int
    antipodal: Optional[ComparisonReport] = None

    @property
    def lhs(self) -> float:
        return self.terms['(X&Y)_eps'].value

    @property
    def rhs(self) -> float:
        t = self.terms
        return (t['X_eps'].value - t['X'].value + t['Y_eps'].value - t['Y'].value
                + t['X&Y'].value)

    @property
    def tolerance(self) -> float:
        return SIGMAS * math.sqrt(sum(term.stderr ** 2 for term in self.terms.values()))

    @property
    def consistent(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.tolerance

    @property
    def verdict(self) -> str:
        state = 'consistent with' if self.consistent else 'inconsistent with'
        return f"{state} the decomposition identity for X={self.x}, Y={self.y}"

    def to_dict(self) -> Dict:
        return {
            'X': self.x,
            'Y': self.y,
            'epsilon': self.epsilon,
            'samples': self.samples,
            'terms': {name: term.to_dict() for name, term in self.terms.items()},
            'lhs': self.lhs,
            'rhs': self.rhs,
            'tolerance': self.tolerance,
            'pointwise_mismatches': self.pointwise_mismatches,
            'verdict': self.verdict,
            'consistent': self.consistent,
            'antipodal': self.antipodal.to_dict() if self.antipodal else None,
        }


def _term(indicator: np.ndarray, total: float) -> Term:
    p = float(np.mean(indicator))
    return Term(p * total, math.sqrt(p * (1 - p) / len(indicator)) * total)


def antipodal_band(n: int, x_volume: float, y_volume: float) -> RegionOracle:
    """
    B^X intersected with B^Y: a ball of volume Vol(X) at the north pole and
    one of volume Vol(Y) at the south pole
    """
    north = np.eye(n + 1)[0]
    total = sphere_volume(n)
    rx = cap_radius_for_volume(n, min(total, x_volume))
    ry = cap_radius_for_volume(n, min(total, y_volume))
    lo = max(0.0, math.pi - ry)
    if lo > rx:
        # balls of total volume < Vol(S^n) only after rounding; they touch
        lo = rx = 0.5 * (lo + rx)
    return AngularBand(north, lo, rx, name='antipodal_band')


def check_decomposition(x: RegionOracle, y: RegionOracle, epsilon: float, samples: int,
                        seed: int = 0, workers: int = 1, epsilons: Sequence[float] = DEFAULT_EPSILONS,
                        block: Optional[SampleBlock] = None) -> DecompositionReport:
    """
    Check Vol((X&Y)_eps) = Vol(X_eps) - Vol(X) + Vol(Y_eps) - Vol(Y) + Vol(X&Y)

    X_eps minus X and Y_eps minus Y are disjoint and their union is
    (X&Y)_eps minus X&Y when X and Y cover S^n. Also compares X&Y with the
    band between antipodal balls of volumes Vol(X), Vol(Y) on `epsilons`.

    Raises:
        CoverageError: if a sample point lies in neither region
        ParameterError: if no intersection oracle is known for X and Y
    """
    if x.n != y.n:
        raise ParameterError(f"Regions live on S^{x.n} and S^{y.n}")
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    block = block if block is not None else draw_sample(x.n, samples, seed, workers)

    in_x = block.members(x)
    in_y = block.members(y)
    uncovered = int(np.count_nonzero(~(in_x | in_y)))
    if uncovered:
        raise CoverageError(f"{uncovered} of {block.size} sample points lie in neither "
                            f"{x.name} nor {y.name}")

    both = x.intersect(y) or y.intersect(x)
    if both is None:
        raise ParameterError(f"No intersection oracle for {x.name} and {y.name}")

    total = sphere_volume(x.n)
    near_x = block.distances(x, workers) <= epsilon
    near_y = block.distances(y, workers) <= epsilon
    near_both = block.distances(both, workers) <= epsilon
    in_both = block.members(both)

    rhs = near_x.astype(int) - in_x + near_y.astype(int) - in_y + in_both
    mismatches = int(np.count_nonzero(rhs != near_both))
    if mismatches:
        logger.warning(f"Decomposition {x.name}/{y.name}: {mismatches} pointwise mismatches")

    terms = {
        '(X&Y)_eps': _term(near_both, total),
        'X_eps': _term(near_x, total),
        'X': _term(in_x, total),
        'Y_eps': _term(near_y, total),
        'Y': _term(in_y, total),
        'X&Y': _term(in_both, total),
    }
    x_volume = exact_volume(x)
    y_volume = exact_volume(y)
    band = antipodal_band(x.n,
                          region_volume_mc(x, block).estimate if x_volume is None else x_volume,
                          region_volume_mc(y, block).estimate if y_volume is None else y_volume)
    antipodal = geqnbd_compare(both, band, epsilons, block.size, block=block, workers=workers)

    report = DecompositionReport(x=x.name, y=y.name, epsilon=epsilon, samples=block.size,
                                 terms=terms, pointwise_mismatches=mismatches, antipodal=antipodal)
    logger.info(f"Decomposition {x.name}/{y.name} at eps={epsilon:g}: lhs={report.lhs:.6g} "
                f"rhs={report.rhs:.6g} ({report.verdict})")
    return report


# ----------------------------------------------------------------------
# Codimension-one comparison with a linear height
# ----------------------------------------------------------------------

def comparison_height(n: int) -> HeightMap:
    """p(x) = (1 + x_0) / 2, so p(S^n) = [0, 1]"""
    return HeightMap(np.eye(n + 1)[0], lambda h: (1.0 + h) / 2.0, name='p')


@dataclass
class Codim1Report:
    name: str
    y: float
    samples: int
    alpha: float
    beta: float
    target: float
    middle: float
    middle_stderr: float
    middle_target: float
    total: float
    flags: List[str] = field(default_factory=list)
    comparisons: List[ComparisonReport] = field(default_factory=list)
    levels: List[float] = field(default_factory=list)

    @property
    def margin(self) -> float:
        return self.middle - self.middle_target

    @property
    def tolerance(self) -> float:
        return SIGMAS * self.middle_stderr + EQUALITY_SLACK * self.total

    @property
    def volume_ok(self) -> bool:
        return self.margin >= -self.tolerance

    @property
    def equality(self) -> bool:
        return abs(self.margin) <= self.tolerance

    @property
    def consistent(self) -> bool:
        return (self.volume_ok and all(c.consistent for c in self.comparisons)
                and 'non_monotone' not in self.flags)

    @property
    def verdict(self) -> str:
        if not self.consistent:
            return f"inconsistent: {self.name} fails the codim-1 comparison at y={self.y:g}"
        kind = 'equality' if self.equality else f"margin {self.margin:.4g}"
        return f"consistent with the codim-1 comparison ({kind})"

    def to_dict(self) -> Dict:
        return {
            'map': self.name,
            'y': self.y,
            'samples': self.samples,
            'alpha': self.alpha,
            'beta': self.beta,
            'target_tail_volume': self.target,
            'middle_volume': self.middle,
            'middle_stderr': self.middle_stderr,
            'middle_target': self.middle_target,
            'margin': self.margin,
            'tolerance': self.tolerance,
            'equality': self.equality,
            'flags': list(self.flags),
            'levels': list(self.levels),
            'comparisons': [c.to_dict() for c in self.comparisons],
            'verdict': self.verdict,
            'consistent': self.consistent,
        }


def _bisect_threshold(count, lo: float, hi: float, limit: int, tol_count: float,
                      keep_low: bool) -> float:
    """
    Boundary of {t : count(t) <= limit} for a monotone count

    keep_low: the satisfying side is below the boundary (return the last
    satisfying lower end); otherwise above (return the upper end).
    """
    for _ in range(200):
        c_lo, c_hi = count(lo), count(hi)
        if abs(c_hi - c_lo) <= tol_count or hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if (count(mid) <= limit) == keep_low:
            lo = mid
        else:
            hi = mid
    return lo if keep_low else hi


def _non_monotone(parts: List[np.ndarray], ordered: np.ndarray) -> bool:
    """
    Chunk i estimates Vol f^-1(-inf, t_i) at the i-th of increasing levels;
    true when an estimate drops below an earlier one by more than 3 sigma
    """
    levels = np.quantile(ordered, (np.arange(len(parts)) + 0.5) / len(parts))
    estimates = []
    for values, t in zip(parts, levels):
        if len(values) == 0:
            continue
        frac = float(np.count_nonzero(values < t)) / len(values)
        variance = max(frac * (1 - frac), 1.0 / len(values)) / len(values)
        estimates.append((frac, variance))
    for i, (earlier, var_i) in enumerate(estimates):
        for later, var_j in estimates[i + 1:]:
            if earlier - later > SIGMAS * math.sqrt(var_i + var_j):
                return True
    return False


def check_codim1(f: ScalarMap, y: float, samples: int, seed: int = 0, workers: int = 1,
                 epsilons: Sequence[float] = DEFAULT_EPSILONS,
                 block: Optional[SampleBlock] = None) -> Codim1Report:
    """
    Compare a scalar map with the linear height p(x) = (1 + x_0)/2

    alpha = sup {t : Vol f^-1(-inf, t) <= Vol p^-1[0, y]} and
    beta = inf {t : Vol f^-1(t, inf) <= Vol p^-1[1-y, 1]} are located by
    bisection on one sample; then Vol f^-1[alpha, beta] is compared with
    Vol p^-1[y, 1-y], and level sets f^-1(t) for t in {alpha, mid, beta}
    are compared with p^-1(y) on the epsilon grid.

    Args:
        f: Continuous map on S^n
        y: Level of p, 0 < y <= 1/2
        samples: Sphere samples
        seed: Master seed
        workers: Threads
        epsilons: Radii for the neighbourhood comparisons
        block: Shared sample

    Returns:
        Codim1Report
    """
    if not 0.0 < y <= 0.5:
        raise ParameterError(f"y must lie in (0, 1/2], got {y}")
    n = f.n
    p = comparison_height(n)
    block = block if block is not None else draw_sample(n, samples, seed, workers)
    total = sphere_volume(n)
    tail = cap_volume(n, math.acos(1.0 - 2.0 * y))
    middle_target = total - 2.0 * tail

    flags: List[str] = []
    parts = [f(chunk) for chunk in np.array_split(block.points, MONOTONE_CHUNKS)]
    values = np.concatenate(parts)
    bad = ~np.isfinite(values)
    if bad.any():
        flags.append('nan_values')
        logger.warning(f"{f.name}: {int(bad.sum())} non-finite values dropped")
        values = values[~bad]
        parts = [part[np.isfinite(part)] for part in parts]
    ordered = np.sort(values)
    size = len(ordered)
    limit = int(math.floor(tail / total * size))
    tol_count = VOLUME_TOL * size
    span = max(1.0, float(ordered[-1] - ordered[0]))

    def below(t: float) -> int:
        return int(np.searchsorted(ordered, t, side='left'))

    def above(t: float) -> int:
        return size - int(np.searchsorted(ordered, t, side='right'))

    alpha = _bisect_threshold(below, float(ordered[0]), float(ordered[-1]) + 1e-9 * span,
                              limit, tol_count, keep_low=True)
    beta = _bisect_threshold(above, float(ordered[0]) - 1e-9 * span, float(ordered[-1]),
                             limit, tol_count, keep_low=False)
    if _non_monotone(parts, ordered):
        flags.append('non_monotone')
        logger.warning(f"{f.name}: sublevel volume estimates are not monotone")

    if alpha > beta:
        flags.append('empty_interval')
        inside = 0
    else:
        inside = int(np.count_nonzero((ordered >= alpha) & (ordered <= beta)))
    fraction = inside / size
    report = Codim1Report(
        name=f.name, y=y, samples=size, alpha=alpha, beta=beta, target=tail,
        middle=fraction * total, middle_stderr=math.sqrt(fraction * (1 - fraction) / size) * total,
        middle_target=middle_target, total=total, flags=flags,
    )

    reference = p.level_set(y)
    levels = [alpha, 0.5 * (alpha + beta), beta] if alpha <= beta else []
    for t in levels:
        level = f.level_set(t, seed=seed)
        report.levels.append(t)
        report.comparisons.append(geqnbd_compare(level, reference, epsilons, size,
                                                 block=block, workers=workers))

    logger.info(f"codim1 {f.name} y={y:g}: alpha={alpha:.5g} beta={beta:.5g} "
                f"margin={report.margin:.4g} ({report.verdict})")
    return report
