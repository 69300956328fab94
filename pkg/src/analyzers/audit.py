"""
Small-fibre audit pipeline

Orchestrates the epsilon-coverage audit of an assembled map:
  1. Sample points uniformly on the boundary of I^{n+1}
  2. Evaluate f and extract every fibre through the image point
  3. Slice the fibres with the projection hyperplanes
  4. Aggregate coverage, maxima, multiplicities and a histogram
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import ParameterError
from ..maps.charts import BoundaryPoint, sample_boundary
from ..maps.small_fiber_map import SmallFiberMap, eval_f, fiber_of_f, lift_point
from ..slicing.cross_sections import certified_fiber_bound, fiber_total_volume
from ..trees.embedding import invert_thickening
from ..trees.tree import max_degree, tree_distance
from ..trees.tree_map import eval_tree_map, exceptional_volume
from ..utils.parallel import chunked_map, sampled_chunks

logger = logging.getLogger(__name__)

AUDIT_SCHEMA = 'smallfibers.audit/1'
AUDIT_CHUNK = 1_024

# Samples with a degenerate slice above this fraction flag the report
DEGENERACY_LIMIT = 0.01

# A sampled point counts as found when a component lies this close on the tree
MATCH_TOL = 1e-6


@dataclass
class SampleRecord:
    face: int
    volume: float
    cardinality: int
    components: int
    degenerate: bool
    found: bool


@dataclass
class AuditReport:
    """
    Outcome of an epsilon-coverage audit

    Fractions are of the sampled surface measure; max_observed is checked
    against the certified bound.
    """
    identity: Dict
    samples: int
    seed: int
    small_fraction: float
    small_stderr: float
    max_observed: float
    certified_vmax: float
    certified_bound: float
    max_components: int
    multiplicity_violations: int
    bound_violations: int
    degenerate_fraction: float
    missed_components: int
    exact_face_exceptional: float
    runtime: float
    histogram: List[Dict] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    @property
    def exceed_fraction(self) -> float:
        return 1.0 - self.small_fraction

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    @property
    def within_budget(self) -> bool:
        """Exceeding fraction <= epsilon + 3 sigma"""
        return self.exceed_fraction <= self.identity['epsilon'] + 3 * self.small_stderr

    def to_dict(self) -> Dict:
        return {
            'schema': AUDIT_SCHEMA,
            'map': self.identity,
            'samples': self.samples,
            'seed': self.seed,
            'small_fraction': self.small_fraction,
            'exceed_fraction': self.exceed_fraction,
            'stderr': self.small_stderr,
            'within_budget': self.within_budget,
            'max_observed': self.max_observed,
            'certified_vmax': self.certified_vmax,
            'certified_bound': self.certified_bound,
            'max_components': self.max_components,
            'multiplicity_violations': self.multiplicity_violations,
            'bound_violations': self.bound_violations,
            'degenerate_fraction': self.degenerate_fraction,
            'missed_components': self.missed_components,
            'exact_face_exceptional': self.exact_face_exceptional,
            'runtime_seconds': round(self.runtime, 3),
            'histogram': self.histogram,
            'flags': list(self.flags),
        }


def map_identity(fiber_map: SmallFiberMap) -> Dict:
    return {
        'n': fiber_map.n,
        'q': fiber_map.q,
        'epsilon': fiber_map.epsilon,
        'seed': fiber_map.seed,
        'r': fiber_map.r,
        'delta': fiber_map.delta,
    }


def audit_point(fiber_map: SmallFiberMap, point: BoundaryPoint) -> SampleRecord:
    """Fibre of f through one boundary point"""
    own = lift_point(fiber_map, point.face, eval_tree_map(fiber_map.face_map, point.local))
    components = fiber_of_f(fiber_map, eval_f(fiber_map, point))
    measured = fiber_total_volume(components, fiber_map.projection)
    found = any(tree_distance(fiber_map.tree, own, c.point) <= MATCH_TOL for c in components)
    return SampleRecord(face=point.face, volume=measured.volume, cardinality=measured.cardinality,
                        components=len(components), degenerate=measured.degenerate > 0,
                        found=found)


def _audit_chunk(fiber_map: SmallFiberMap, job) -> List[SampleRecord]:
    size, rng = job
    faces, local = sample_boundary(fiber_map.n, size, rng)
    return [audit_point(fiber_map, BoundaryPoint(int(f), tuple(float(c) for c in row)))
            for f, row in zip(faces, local)]


def histogram(volumes: Sequence[float], epsilon: float, bound: float) -> List[Dict]:
    """Counts of fibre volumes per threshold bucket"""
    edges = sorted({0.0, epsilon / 4, epsilon / 2, epsilon, 2 * epsilon, 4 * epsilon})
    top = max(bound, float(max(volumes, default=0.0)), edges[-1]) * (1 + 1e-12) + 1e-300
    edges.append(top)
    binned = pd.cut(pd.Series(volumes, dtype=float), bins=edges, include_lowest=True, right=True)
    counts = binned.value_counts(sort=False)
    total = max(len(volumes), 1)
    return [{'upper': float(interval.right) if i < len(edges) - 2 else None,
             'count': int(count), 'fraction': float(count) / total}
            for i, (interval, count) in enumerate(counts.items())]


def run_audit(fiber_map: SmallFiberMap, samples: int, seed: int = 0,
              workers: int = 1) -> AuditReport:
    """
    Run the epsilon-coverage audit

    Args:
        fiber_map: Assembled map
        samples: Boundary samples
        seed: Audit seed (independent of the map seed)
        workers: Threads

    Returns:
        AuditReport
    """
    if samples <= 0:
        raise ParameterError(f"samples must be positive, got {samples}")
    start = time.perf_counter()
    identity = map_identity(fiber_map)
    logger.info("=" * 60)
    logger.info(f"Audit n={fiber_map.n} q={fiber_map.q} epsilon={fiber_map.epsilon} "
                f"r={fiber_map.r}: {samples} samples")
    logger.info("=" * 60)

    chunks = sampled_chunks(samples, seed, chunk_size=AUDIT_CHUNK)
    records = [rec for part in chunked_map(lambda job: _audit_chunk(fiber_map, job), chunks, workers)
               for rec in part]

    frame = pd.DataFrame([rec.__dict__ for rec in records])
    epsilon = fiber_map.epsilon
    bound = certified_fiber_bound(fiber_map)
    limit = max_degree(fiber_map.tree)

    small = float((frame['volume'] <= epsilon).mean()) if len(frame) else 1.0
    report = AuditReport(
        identity=identity,
        samples=len(frame),
        seed=seed,
        small_fraction=small,
        small_stderr=math.sqrt(small * (1 - small) / max(len(frame), 1)),
        max_observed=float(frame['volume'].max()) if len(frame) else 0.0,
        certified_vmax=fiber_map.vmax.value,
        certified_bound=bound,
        max_components=int(frame['components'].max()) if len(frame) else 0,
        multiplicity_violations=int((frame['components'] > limit).sum()) if len(frame) else 0,
        bound_violations=int((frame['volume'] > bound).sum()) if len(frame) else 0,
        degenerate_fraction=float(frame['degenerate'].mean()) if len(frame) else 0.0,
        missed_components=int((~frame['found']).sum()) if len(frame) else 0,
        exact_face_exceptional=float(exceptional_volume(fiber_map.face_map)),
        runtime=time.perf_counter() - start,
        histogram=histogram(frame['volume'].tolist() if len(frame) else [], epsilon, bound),
    )

    if report.degenerate_fraction > DEGENERACY_LIMIT:
        report.flags.append('degenerate_slices')
        logger.warning(f"{report.degenerate_fraction:.2%} of samples hit degenerate slices")
    if report.bound_violations:
        report.flags.append('bound_violations')
        logger.warning(f"{report.bound_violations} fibres exceed the certified bound {bound:.6g}")
    if report.multiplicity_violations:
        report.flags.append('multiplicity_violations')
        logger.warning(f"{report.multiplicity_violations} points have more than {limit} preimages")
    if report.missed_components:
        report.flags.append('missed_components')
        logger.warning(f"{report.missed_components} sampled points were missing from their own fibre")

    logger.info("=" * 60)
    logger.info("AUDIT COMPLETE")
    logger.info("=" * 60)
    logger.info(f"Fibres with volume <= {epsilon}: {report.small_fraction:.4f} "
                f"(stderr {report.small_stderr:.4f})")
    logger.info(f"Max observed fibre volume: {report.max_observed:.6g} (bound {bound:.6g})")
    logger.info(f"Max components: {report.max_components} (max degree {limit})")
    logger.info(f"Time: {report.runtime:.1f}s")
    return report


def multiplicity_survey(fiber_map: SmallFiberMap, count: int, seed: int = 0,
                        box_fraction: Optional[float] = 0.5) -> Dict:
    """
    Preimage counts of phi at random points of R^q

    Half the points (box_fraction) are uniform in the bounding box of the
    thickened embedding, the rest are images f(x) of boundary samples.
    """
    rng = np.random.default_rng(seed)
    spec = fiber_map.embedding
    in_box = int(count * box_fraction)
    tree = fiber_map.tree
    half_width = spec.layout.leaf_gap * tree.leaf_count / 2
    hi = np.full(spec.q, spec.d / 4)
    hi[0] = spec.layout.level_gap * tree.max_depth
    hi[1] += half_width
    lo = -hi
    lo[0] = 0.0
    targets = [lo + rng.random(spec.q) * (hi - lo) for _ in range(in_box)]
    faces, local = sample_boundary(fiber_map.n, count - in_box, rng)
    targets += [eval_f(fiber_map, BoundaryPoint(int(f), tuple(row))) for f, row in zip(faces, local)]

    limit = max_degree(tree)
    counts = np.array([len(invert_thickening(spec, y)) for y in targets], dtype=int)
    return {
        'points': count,
        'max_degree': limit,
        'max_preimages': int(counts.max()) if len(counts) else 0,
        'violations': int((counts > limit).sum()),
        'distribution': {int(k): int(v) for k, v in zip(*np.unique(counts, return_counts=True))},
    }
