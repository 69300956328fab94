"""
SVG Figure Builder

Draws every fibre class of a planar tree map t_{2,r,delta} over the unit
square: concentric square boundaries in each collar, the skeleton walls
where a collar meets its four subsquares, and the nested squares of the
deepest level shrinking to their centre points. Strokes are coloured by
fibre length bucket.

The SVG template is stored as a string constant in this module.
"""
import itertools
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from jinja2 import Environment

from ..errors import ParameterError
from ..trees.tree_map import (TreeMapSpec, build_tree_map, fiber_of, fiber_volume,
                              small_fiber_coverage)
from ..trees.tree import TreePoint
from ..utils.file_helpers import save_text

logger = logging.getLogger(__name__)

CANVAS = 640
MARGIN = 20
LEGEND_HEIGHT = 90
MAX_RENDER_DEPTH = 6
LARGE_LIMIT = 6.0

COLOURS = {
    'small': '#2b8cbe',
    'medium': '#f0a30a',
    'large': '#d7301f',
    'skeleton': '#333333',
}


def length_thresholds(r: int) -> List[float]:
    """Fibre-length bucket bounds: 4 * 2^-r and 6"""
    return [4.0 * 2.0 ** -r, LARGE_LIMIT]


def bucket(length: float, thresholds: List[float]) -> str:
    if length <= thresholds[0] + 1e-12:
        return 'small'
    if length <= thresholds[1] + 1e-12:
        return 'medium'
    return 'large'


def figure_summary(spec: TreeMapSpec) -> Dict:
    """
    Exact facts the figure illustrates

    max_length: longest fibre over all classes. Every frame of a level has
    the same side, so one path per level covers that level's collar fibres
    (up to the frame boundary, 4 * side) and its skeleton. small_fraction:
    area of points on fibres of length <= 4 * 2^-r.
    """
    if spec.n != 2:
        raise ParameterError(f"Figures are drawn for n = 2 only, got n = {spec.n}")
    level_lengths = []
    for k in range(spec.r + 1):
        edge = spec.collar_edge((0,) * k)
        collar = 4.0 * spec.scales[k]
        level_lengths.append(max(collar, fiber_volume(fiber_of(spec, TreePoint(edge, 1.0)))))
    threshold = length_thresholds(spec.r)[0]
    small: Fraction = small_fiber_coverage(spec, threshold / 4.0, exact=True)
    return {
        'n': spec.n,
        'r': spec.r,
        'delta': spec.delta,
        'thresholds': length_thresholds(spec.r),
        'level_max_lengths': level_lengths,
        'max_length': max(level_lengths),
        'small_fraction': float(small),
        'small_fraction_bound': 1.0 - spec.delta,
    }


def _square(x0: float, y0: float, side: float, cls: str) -> Dict:
    return {'x': x0, 'y': y0, 'w': side, 'h': side, 'cls': cls}


def figure_elements(spec: TreeMapSpec, rings: int = 4) -> Dict[str, List[Dict]]:
    """
    Geometry of the figure in unit-square coordinates

    Returns:
        {'squares': [...], 'walls': [...], 'points': [...]}
    """
    if spec.n != 2:
        raise ParameterError(f"Figures are drawn for n = 2 only, got n = {spec.n}")
    if spec.r > MAX_RENDER_DEPTH:
        raise ParameterError(f"Rendering is limited to r <= {MAX_RENDER_DEPTH}, got r = {spec.r}")
    if rings < 1:
        raise ParameterError("rings must be >= 1")

    thresholds = length_thresholds(spec.r)
    squares: List[Dict] = []
    walls: List[Dict] = []
    points: List[Dict] = []

    for level in range(spec.r + 1):
        c1 = spec.collars[level]
        for path in itertools.product(range(4), repeat=level):
            frame = spec.frame(path)
            ox, oy = frame.offset
            scale = frame.scale
            if level < spec.r:
                for i in range(rings):
                    s = i / rings
                    side = scale * (1.0 - 2.0 * s * c1)
                    depth = (scale - side) / 2
                    squares.append(_square(ox + depth, oy + depth, side,
                                           bucket(4 * side, thresholds)))
                inner = scale * (1.0 - 2.0 * c1)
                x0, y0 = ox + scale * c1, oy + scale * c1
                walls.append(_square(x0, y0, inner, 'skeleton'))
                walls.append({'x1': x0 + inner / 2, 'y1': y0, 'x2': x0 + inner / 2, 'y2': y0 + inner,
                              'cls': 'skeleton'})
                walls.append({'x1': x0, 'y1': y0 + inner / 2, 'x2': x0 + inner, 'y2': y0 + inner / 2,
                              'cls': 'skeleton'})
            else:
                for i in range(rings):
                    s = i / rings
                    side = scale * (1.0 - s)
                    depth = (scale - side) / 2
                    squares.append(_square(ox + depth, oy + depth, side,
                                           bucket(4 * side, thresholds)))
                points.append({'x': ox + scale / 2, 'y': oy + scale / 2, 'cls': 'small'})

    return {'squares': squares, 'walls': walls, 'points': points}


SVG_TEMPLATE = """<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{{ width }}" height="{{ height }}" viewBox="0 0 {{ width }} {{ height }}">
  <title>Fibres of t_(2,{{ summary.r }},{{ summary.delta }})</title>
  <style>
    .small { stroke: {{ colours.small }}; }
    .medium { stroke: {{ colours.medium }}; }
    .large { stroke: {{ colours.large }}; }
    .skeleton { stroke: {{ colours.skeleton }}; stroke-width: 1.5; }
    rect, line { fill: none; stroke-width: 0.6; }
    text { font-family: sans-serif; font-size: 12px; }
  </style>
  <rect x="{{ margin }}" y="{{ margin }}" width="{{ size }}" height="{{ size }}" class="large" style="stroke: #000000;"/>
  <g id="collars">
{%- for sq in squares %}
    <rect x="{{ '%.4f' % sq.x }}" y="{{ '%.4f' % sq.y }}" width="{{ '%.4f' % sq.w }}" height="{{ '%.4f' % sq.h }}" class="{{ sq.cls }}"/>
{%- endfor %}
  </g>
  <g id="skeletons">
{%- for wall in walls %}
{%- if wall.w is defined %}
    <rect x="{{ '%.4f' % wall.x }}" y="{{ '%.4f' % wall.y }}" width="{{ '%.4f' % wall.w }}" height="{{ '%.4f' % wall.h }}" class="skeleton"/>
{%- else %}
    <line x1="{{ '%.4f' % wall.x1 }}" y1="{{ '%.4f' % wall.y1 }}" x2="{{ '%.4f' % wall.x2 }}" y2="{{ '%.4f' % wall.y2 }}" class="skeleton"/>
{%- endif %}
{%- endfor %}
  </g>
  <g id="points">
{%- for pt in points %}
    <circle cx="{{ '%.4f' % pt.x }}" cy="{{ '%.4f' % pt.y }}" r="1.5" fill="{{ colours.small }}"/>
{%- endfor %}
  </g>
  <g id="legend" transform="translate({{ margin }}, {{ margin + size + 20 }})">
    <line x1="0" y1="0" x2="24" y2="0" class="small" style="stroke-width: 3;"/>
    <text x="30" y="4">length &lt;= {{ '%g' % summary.thresholds[0] }}</text>
    <line x1="0" y1="20" x2="24" y2="20" class="medium" style="stroke-width: 3;"/>
    <text x="30" y="24">length &lt;= {{ '%g' % summary.thresholds[1] }}</text>
    <line x1="0" y1="40" x2="24" y2="40" class="skeleton" style="stroke-width: 3;"/>
    <text x="30" y="44">skeleton fibres</text>
    <text x="220" y="4">max fibre length {{ '%.6g' % summary.max_length }}</text>
    <text x="220" y="24">area on short fibres {{ '%.6g' % summary.small_fraction }} (&gt;= {{ '%g' % summary.small_fraction_bound }})</text>
  </g>
</svg>
"""

_ENV = Environment(autoescape=False, trim_blocks=False, lstrip_blocks=False)


def _to_canvas(elements: Dict[str, List[Dict]], size: float) -> Dict[str, List[Dict]]:
    """Unit square -> SVG pixels, y pointing down"""
    def px(x: float) -> float:
        return MARGIN + x * size

    def py(y: float) -> float:
        return MARGIN + (1.0 - y) * size

    squares = [{**sq, 'x': px(sq['x']), 'y': py(sq['y'] + sq['h']), 'w': sq['w'] * size,
                'h': sq['h'] * size} for sq in elements['squares']]
    walls = []
    for wall in elements['walls']:
        if 'w' in wall:
            walls.append({**wall, 'x': px(wall['x']), 'y': py(wall['y'] + wall['h']),
                          'w': wall['w'] * size, 'h': wall['h'] * size})
        else:
            walls.append({**wall, 'x1': px(wall['x1']), 'y1': py(wall['y1']),
                          'x2': px(wall['x2']), 'y2': py(wall['y2'])})
    points = [{**pt, 'x': px(pt['x']), 'y': py(pt['y'])} for pt in elements['points']]
    return {'squares': squares, 'walls': walls, 'points': points}


def render_tree_map_svg(spec: TreeMapSpec, rings: int = 4) -> str:
    """
    SVG 1.1 document for a planar tree map

    Args:
        spec: Tree map with n = 2
        rings: Collar fibres drawn per frame

    Returns:
        SVG text
    """
    summary = figure_summary(spec)
    size = CANVAS - 2 * MARGIN
    canvas = _to_canvas(figure_elements(spec, rings), size)
    template = _ENV.from_string(SVG_TEMPLATE)
    return template.render(width=CANVAS, height=CANVAS + LEGEND_HEIGHT, margin=MARGIN, size=size,
                           colours=COLOURS, summary=summary, **canvas)


def build_figure(r: int, delta: float, output_path: Optional[Path] = None, rings: int = 4) -> Dict:
    """
    Render t_{2,r,delta} and optionally write it

    Returns:
        figure_summary plus the element counts and the output path
    """
    spec = build_tree_map(2, r, delta)
    svg = render_tree_map_svg(spec, rings)
    result = figure_summary(spec)
    elements = figure_elements(spec, rings)
    result.update({key: len(value) for key, value in elements.items()})
    if output_path is not None:
        save_text(svg, Path(output_path))
        logger.info(f"Figure written to {output_path} ({len(svg) / 1024:.0f} KB)")
        result['output'] = str(output_path)
    return result
