"""
Example Usage of Small-Fibre Maps
Demonstrates how to use the library programmatically
"""
from pathlib import Path

import numpy as np

from src.analyzers.audit import run_audit
from src.analyzers.svg_builder import build_figure
from src.lab.checks import check_codim1
from src.lab.inventory import codim1_maps, run_suite
from src.maps.charts import sphere_to_cube
from src.maps.small_fiber_map import build_small_fiber_map, eval_f, fiber_of_f
from src.slicing.cross_sections import certified_fiber_bound, fiber_total_volume
from src.trees.tree_map import build_tree_map, eval_tree_map, exceptional_volume, fiber_of, fiber_volume
from src.utils.file_helpers import save_json
from src.utils.logging_config import setup_logging


def example_tree_map():
    """Example: the planar tree map and one of its fibres"""

    setup_logging(log_level='INFO')

    spec = build_tree_map(2, 2, 0.05)
    point = eval_tree_map(spec, [0.3, 0.7])
    fibre = fiber_of(spec, point)

    print(f"t(0.3, 0.7) = {point}")
    print(f"Fibre length: {fiber_volume(fibre):.4f}")
    print(f"Exceptional area: {float(exceptional_volume(spec)):.6f} (budget {spec.delta})")

    return spec


def example_build_and_audit():
    """Example: build S^3 -> R^2 and audit the fibre volumes"""

    setup_logging(log_level='INFO')

    fiber_map = build_small_fiber_map(3, 2, 0.1, seed=0, resolution=32, workers=4)
    save_json(fiber_map.to_bundle(), Path('output') / 'example_map.json')

    x = np.array([0.0, 0.6, 0.8, 0.0])
    y = eval_f(fiber_map, x)
    components = fiber_of_f(fiber_map, y)
    measured = fiber_total_volume(components, fiber_map.projection)
    print(f"f({x.tolist()}) = {y.tolist()}")
    print(f"Fibre: {measured.components} components, volume {measured.volume:.4g} "
          f"(certified bound {certified_fiber_bound(fiber_map):.4g})")
    print(f"Face chart of x: {sphere_to_cube(x)}")

    report = run_audit(fiber_map, 2000, seed=1, workers=4)
    print(f"Fibres with volume <= epsilon: {report.small_fraction:.4f}")

    return report


def example_sphere_checks():
    """Example: codim-1 comparison and a full suite"""

    setup_logging(log_level='INFO')

    for fn in codim1_maps(2):
        report = check_codim1(fn, 0.25, 50_000, seed=0)
        print(f"{fn.name}: {report.verdict}")

    suite = run_suite('tubes', 50_000, seed=0)
    print(f"Tubes suite consistent: {suite.consistent}")

    return suite


def example_figure():
    """Example: write the planar figure"""

    setup_logging(log_level='INFO')

    summary = build_figure(2, 0.05, Path('output') / 'planar_figure.svg')
    print(f"Max fibre length: {summary['max_length']:.4f}")
    print(f"Area on short fibres: {summary['small_fraction']:.4f}")

    return summary


if __name__ == '__main__':
    print("=" * 60)
    print("Small-Fibre Maps - Examples")
    print("=" * 60)
    print()
    print("1. Tree map")
    print("2. Build and audit a map")
    print("3. Sphere checks")
    print("4. Planar figure")
    print()

    choice = input("Select example (1-4): ").strip()

    if choice == '1':
        example_tree_map()
    elif choice == '2':
        example_build_and_audit()
    elif choice == '3':
        example_sphere_checks()
    elif choice == '4':
        example_figure()
    else:
        print("Invalid choice")
