"""
Output generators for command results.

Generates:
  1. JSON documents (schema tag + argument echo + payload), written atomically
  2. Markdown synopses of tree-map schedules, audits and suite verdicts
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..trees.tree_map import TreeMapSpec, budget_bound, exceptional_volume, level_budget_table
from ..utils.file_helpers import dumps_json, save_json, save_text

logger = logging.getLogger(__name__)

SCHEDULE_SCHEMA = 'smallfibers.schedule/1'
SUITE_SCHEMA = 'smallfibers.suite/1'


def command_document(schema: str, args: Dict[str, Any], payload: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a payload with its schema tag and the full argument echo"""
    document = {'schema': schema, 'args': dict(sorted(args.items()))}
    document.update({k: v for k, v in payload.items() if k != 'schema'})
    return document


def emit(document: Dict[str, Any], output_path: Optional[Path] = None) -> str:
    """
    Write a JSON document to a file (atomically) or return it for stdout

    Returns:
        The JSON text
    """
    text = dumps_json(document)
    if output_path is not None:
        save_json(document, Path(output_path))
        logger.info(f"Wrote {output_path}")
    return text


def schedule_document(spec: TreeMapSpec) -> Dict[str, Any]:
    """Per-level schedule with the exact budget accounting"""
    return {
        'schema': SCHEDULE_SCHEMA,
        **spec.to_dict(),
        'exceptional_volume': float(exceptional_volume(spec)),
        'budget_bound': budget_bound(spec),
        'budget_table': level_budget_table(spec),
    }


def schedule_markdown(spec: TreeMapSpec) -> str:
    """
    Schedule synopsis.

    Generates a markdown table with one row per recursion level:
    frames, frame side, collar width, budget, exceptional fractions.
    """
    lines: List[str] = []
    lines.append(f"# Tree map t({spec.n}, {spec.r}, {spec.delta})")
    lines.append("")
    lines.append(f"**Exceptional volume:** {float(exceptional_volume(spec)):.6g} | "
                 f"**Budget:** {spec.delta}")
    lines.append("")
    lines.append("| Level | Frames | Frame side | Collar | Budget | Exceptional (relative) | Bound |")
    lines.append("|---|---|---|---|---|---|---|")
    for row in level_budget_table(spec):
        lines.append(f"| {row['level']} | {row['frames']} | {row['frame_side']:.6g} | "
                     f"{row['collar']:.6g} | {row['budget']:.6g} | "
                     f"{row['relative_exceptional']:.6g} | {row['relative_bound']:.6g} |")
    lines.append("")
    return '\n'.join(lines)


def audit_markdown(report: Dict[str, Any]) -> str:
    """Audit synopsis from an AuditReport dict"""
    identity = report['map']
    lines: List[str] = []
    lines.append(f"# Audit n={identity['n']} q={identity['q']} epsilon={identity['epsilon']} "
                 f"seed={identity['seed']}")
    lines.append("")
    lines.append(f"**Samples:** {report['samples']} | **r:** {identity['r']} | "
                 f"**delta:** {identity['delta']:.6g}")
    lines.append("")
    lines.append(f"- **Fibres with volume <= epsilon:** {report['small_fraction']:.4f} "
                 f"(stderr {report['stderr']:.4f})")
    lines.append(f"- **Max observed fibre volume:** {report['max_observed']:.6g}")
    lines.append(f"- **Certified bound:** {report['certified_bound']:.6g} "
                 f"(V_max {report['certified_vmax']:.6g})")
    lines.append(f"- **Max components:** {report['max_components']}")
    if report['flags']:
        lines.append(f"- **Flags:** {', '.join(report['flags'])}")
    lines.append("")
    lines.append("## Histogram")
    lines.append("")
    lines.append("| Volume up to | Count | Fraction |")
    lines.append("|---|---|---|")
    for row in report['histogram']:
        upper = 'max' if row['upper'] is None else f"{row['upper']:.4g}"
        lines.append(f"| {upper} | {row['count']} | {row['fraction']:.4f} |")
    lines.append("")
    return '\n'.join(lines)


def suite_markdown(suite: Dict[str, Any]) -> str:
    """One line per instance with its verdict"""
    lines = [f"# Suite {suite['suite']}", "",
             f"**Samples:** {suite['samples']} | **Seed:** {suite['seed']} | "
             f"**All consistent:** {suite['consistent']}", "",
             "| Instance | Verdict |", "|---|---|"]
    for item in suite['instances']:
        lines.append(f"| {item['instance']} | {item['verdict']} |")
    lines.append("")
    return '\n'.join(lines)


def write_markdown(text: str, output_path: Path) -> Path:
    return save_text(text, Path(output_path))
