"""
Analyzers over assembled maps and suite reports: coverage audits, the
planar SVG figure, volume charts and JSON/markdown output.
"""
from .audit import AuditReport, histogram, multiplicity_survey, run_audit
from .output import command_document, emit, schedule_document, schedule_markdown
from .svg_builder import build_figure, figure_summary, render_tree_map_svg

__all__ = [
    'AuditReport', 'histogram', 'multiplicity_survey', 'run_audit',
    'command_document', 'emit', 'schedule_document', 'schedule_markdown',
    'build_figure', 'figure_summary', 'render_tree_map_svg',
]
