import json

from src.analyzers.output import (SCHEDULE_SCHEMA, command_document, emit, schedule_document,
                                  schedule_markdown, suite_markdown, write_markdown)
from src.analyzers.plots import plot_suite
from src.trees.tree_map import build_tree_map


def test_command_document_keeps_its_own_schema():
    document = command_document('smallfibers.x/1', {'seed': 1, 'n': 2}, {'schema': 'other', 'value': 3})
    assert document['schema'] == 'smallfibers.x/1'
    assert list(document['args']) == ['n', 'seed']
    assert document['value'] == 3


def test_emit_to_file(tmp_path):
    target = tmp_path / 'out' / 'doc.json'
    text = emit({'b': 1, 'a': [1, 2]}, target)
    assert json.loads(target.read_text(encoding='utf-8')) == {'a': [1, 2], 'b': 1}
    assert json.loads(text) == {'a': [1, 2], 'b': 1}


def test_schedule_document_and_markdown():
    spec = build_tree_map(2, 1, 0.05)
    document = schedule_document(spec)
    assert document['schema'] == SCHEDULE_SCHEMA
    assert document['exceptional_volume'] <= 0.05
    assert len(document['budget_table']) == 2
    text = schedule_markdown(spec)
    assert text.startswith('# Tree map t(2, 1, 0.05)')
    assert text.count('\n| ') == 3


def test_suite_markdown(tmp_path):
    suite = {'suite': 'tubes', 'samples': 1000, 'seed': 0, 'consistent': True,
             'instances': [{'instance': 'tube n=2 q=1', 'verdict': 'consistent with the tube formula'}]}
    path = write_markdown(suite_markdown(suite), tmp_path / 'suite.md')
    assert '| tube n=2 q=1 | consistent with the tube formula |' in path.read_text(encoding='utf-8')


def _row(epsilon, value):
    return {'epsilon': epsilon, 'E': value, 'E_stderr': 0.01, 'F': value / 2, 'F_stderr': 0.01}


def test_plots_for_tube_and_comparison_suites(tmp_path):
    tubes = {'suite': 'tubes', 'instances': [
        {'instance': 'tube n=2 q=1', 'report': {'rows': [
            {'epsilon': e, 'estimate': e, 'exact': e, 'stderr': 0.01} for e in (0.1, 0.3)]}}]}
    written = plot_suite(tubes, tmp_path)
    assert [p.name for p in written] == ['tubes_tube_n_2_q_1.svg']

    comparisons = {'suite': 'isoperimetric', 'instances': [
        {'instance': 'equator vs point n=2',
         'report': {'E': 'great_sphere', 'F': 'points', 'rows': [_row(0.1, 1.0), _row(0.2, 2.0)]}}]}
    written = plot_suite(comparisons, tmp_path / 'charts')
    assert len(written) == 1
    assert '<svg' in written[0].read_text(encoding='utf-8')
