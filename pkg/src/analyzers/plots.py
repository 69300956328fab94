"""
Volume-versus-epsilon line charts (matplotlib, SVG backend)
"""
import logging
import re
from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from ..utils.file_helpers import ensure_dir

logger = logging.getLogger(__name__)

# Fixed metadata keeps the SVG output byte-stable between runs
SVG_METADATA = {'Date': None, 'Creator': None}


def _slug(text: str) -> str:
    return re.sub(r'[^A-Za-z0-9]+', '_', text).strip('_').lower() or 'chart'


def _series(rows: List[Dict], key: str) -> List[float]:
    return [row[key] for row in rows]


def plot_rows(title: str, rows: List[Dict], series: Dict[str, str], output_path: Path,
              errors: Dict[str, str] = None) -> Path:
    """
    One line per series over the rows' epsilon values

    Args:
        title: Chart title
        rows: Dicts with an 'epsilon' key
        series: Legend label -> row key
        output_path: Target .svg
        errors: Legend label -> row key of a standard error (drawn as 3 sigma bars)

    Returns:
        The written path
    """
    errors = errors or {}
    epsilons = _series(rows, 'epsilon')
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        for label, key in series.items():
            values = _series(rows, key)
            if label in errors:
                yerr = [3 * e for e in _series(rows, errors[label])]
                ax.errorbar(epsilons, values, yerr=yerr, marker='o', capsize=3, label=label)
            else:
                ax.plot(epsilons, values, marker='s', linestyle='--', label=label)
        ax.set_xlabel('epsilon')
        ax.set_ylabel('volume')
        ax.set_title(title)
        ax.legend()
        ax.grid(True, alpha=0.3)
        ensure_dir(Path(output_path).parent)
        fig.savefig(output_path, format='svg', metadata=SVG_METADATA)
    finally:
        plt.close(fig)
    logger.debug(f"Chart written to {output_path}")
    return Path(output_path)


def plot_suite(suite: Dict, output_dir: Path) -> List[Path]:
    """
    Charts for every instance of a suite report (its to_dict form)

    Tube instances plot the estimate against the exact tube volume;
    comparisons plot E and F; codim-1 instances plot each level comparison;
    decomposition instances plot their antipodal-band comparison.
    """
    output_dir = ensure_dir(Path(output_dir))
    written: List[Path] = []
    for item in suite['instances']:
        name = item['instance']
        report = item['report']
        base = f"{suite['suite']}_{_slug(name)}"
        if suite['suite'] == 'tubes':
            written.append(plot_rows(name, report['rows'],
                                     {'Monte-Carlo': 'estimate', 'tube formula': 'exact'},
                                     output_dir / f"{base}.svg", errors={'Monte-Carlo': 'stderr'}))
            continue
        comparisons = []
        if 'rows' in report:
            comparisons = [(name, report)]
        elif report.get('comparisons'):
            comparisons = [(f"{name} t={t:.4g}", c) for t, c in zip(report['levels'], report['comparisons'])]
        elif report.get('antipodal'):
            comparisons = [(f"{name} vs antipodal band", report['antipodal'])]
        for index, (title, comparison) in enumerate(comparisons):
            e_label = f"E: {comparison['E']}"
            f_label = f"F: {comparison['F']}"
            written.append(plot_rows(title, comparison['rows'], {e_label: 'E', f_label: 'F'},
                                     output_dir / f"{base}_{index}.svg",
                                     errors={e_label: 'E_stderr', f_label: 'F_stderr'}))
    logger.info(f"Wrote {len(written)} charts to {output_dir}")
    return written
