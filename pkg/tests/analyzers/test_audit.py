import pytest

from src.analyzers.audit import AUDIT_SCHEMA, histogram, multiplicity_survey, run_audit
from src.errors import ParameterError
from src.maps.small_fiber_map import build_small_fiber_map
from src.trees.tree import max_degree


@pytest.fixture(scope='module')
def report(small_map):
    return run_audit(small_map, 48, seed=3)


def test_audit_counts(report):
    assert report.samples == 48
    assert sum(row['count'] for row in report.histogram) == 48
    assert 0.0 <= report.small_fraction <= 1.0


def test_fibres_respect_the_certified_bound(report):
    assert report.bound_violations == 0
    assert report.max_observed <= report.certified_bound
    assert report.multiplicity_violations == 0
    assert report.missed_components == 0
    assert 'bound_violations' not in report.flags


def test_audit_dict(report):
    data = report.to_dict()
    assert data['schema'] == AUDIT_SCHEMA
    assert data['map']['n'] == 3 and data['map']['q'] == 2
    assert data['exceed_fraction'] == pytest.approx(1.0 - data['small_fraction'])
    assert data['histogram'][-1]['upper'] is None


def test_audit_is_reproducible(small_map, report):
    again = run_audit(small_map, 48, seed=3, workers=3).to_dict()
    first = report.to_dict()
    first.pop('runtime_seconds')
    again.pop('runtime_seconds')
    assert first == again


def test_audit_needs_samples(small_map):
    with pytest.raises(ParameterError):
        run_audit(small_map, 0)


def test_histogram_buckets():
    rows = histogram([0.0, 0.01, 0.5, 2.0], epsilon=0.1, bound=1.0)
    assert [row['count'] for row in rows] == [2, 0, 0, 0, 0, 2]
    assert [row['upper'] for row in rows[:5]] == pytest.approx([0.025, 0.05, 0.1, 0.2, 0.4])
    assert rows[-1]['upper'] is None
    assert sum(row['fraction'] for row in rows) == pytest.approx(1.0)


def test_empty_histogram():
    rows = histogram([], epsilon=0.1, bound=1.0)
    assert all(row['count'] == 0 for row in rows)


def test_multiplicity_survey(small_map):
    survey = multiplicity_survey(small_map, 20, seed=1)
    assert survey['points'] == 20
    assert survey['violations'] == 0
    assert survey['max_preimages'] <= max_degree(small_map.tree) == survey['max_degree']
    assert sum(survey['distribution'].values()) == 20


@pytest.fixture(scope='module')
def desk_map():
    return build_small_fiber_map(3, 2, 0.1, seed=0)


@pytest.mark.slow
def test_desk_scale_audit(desk_map):
    report = run_audit(desk_map, 10_000, seed=0)
    assert report.samples == 10_000
    assert report.within_budget
    assert report.bound_violations == 0
    assert report.max_observed <= report.certified_bound
    assert report.missed_components == 0
    assert report.multiplicity_violations == 0


@pytest.mark.slow
def test_desk_scale_multiplicity(desk_map):
    survey = multiplicity_survey(desk_map, 10_000, seed=0)
    assert survey['max_degree'] == 2 ** 3 + 1
    assert survey['violations'] == 0
    assert survey['max_preimages'] <= survey['max_degree']
