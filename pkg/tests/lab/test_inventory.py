import pytest

from src.errors import ParameterError
from src.lab.inventory import SUITES, codim1_maps, run_suite, smooth_map


def test_suite_names():
    assert set(SUITES) == {'tubes', 'isoperimetric', 'decomposition', 'codim1'}


def test_unknown_suite_rejected():
    with pytest.raises(ParameterError):
        run_suite('moments', 1000)


def test_codim1_maps_are_named():
    names = [fn.name for fn in codim1_maps(2)]
    assert names == ['p', 'p_cubed', 'tilted_height', 'clamped_p', 'clamped_tilted']


def test_smooth_map_is_seeded():
    a = smooth_map(2, seed=4)
    b = smooth_map(2, seed=4)
    points = [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]]
    assert a(points).tolist() == b(points).tolist()


@pytest.mark.slow
def test_tubes_suite_matches_quadrature():
    report = run_suite('tubes', 50_000, seed=0)
    assert len(report.instances) == 3
    for item in report.instances:
        for row in item.report['rows']:
            assert abs(row['estimate'] - row['exact']) <= 5 * row['stderr']


@pytest.mark.slow
def test_isoperimetric_suite():
    report = run_suite('isoperimetric', 50_000, seed=0)
    assert len(report.instances) == 8
    assert report.consistent, report.failing


@pytest.mark.slow
def test_decomposition_suite():
    report = run_suite('decomposition', 20_000, seed=0)
    assert [item.instance for item in report.instances][0] == 'hemispheres n=2'
    for item in report.instances:
        assert item.report['pointwise_mismatches'] == 0 or item.instance.startswith('smooth')


@pytest.mark.slow
def test_codim1_suite_reports_every_map():
    report = run_suite('codim1', 50_000, seed=0)
    data = report.to_dict()
    assert data['suite'] == 'codim1'
    assert [item['instance'] for item in data['instances']] == [fn.name for fn in codim1_maps(2)]
    p = data['instances'][0]['report']
    assert p['equality']


@pytest.mark.slow
def test_codim1_suite_at_a_million_samples():
    report = run_suite('codim1', 1_000_000, seed=0)
    assert report.consistent, report.failing
    results = {item.instance: item.report for item in report.instances}
    assert results['p']['equality']
    for name in ('clamped_p', 'clamped_tilted'):
        assert results[name]['margin'] > results[name]['tolerance'] > 0
        assert 'non_monotone' not in results[name]['flags']
