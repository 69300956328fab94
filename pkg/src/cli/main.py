"""
Small-fibre maps command line

Builds and persists maps, evaluates points, extracts fibres, audits
coverage, renders the planar figure and runs the sphere-check suites.

Exit codes: 0 success, 1 usage, 2 numerical degeneracy, 3 verdict failure.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..analyzers import output
from ..analyzers.audit import multiplicity_survey, run_audit
from ..analyzers.plots import plot_suite
from ..analyzers.svg_builder import build_figure
from ..errors import (CoverageError, DegeneracyError, EmbeddingError, ParameterError,
                      SmallFiberError, VerdictFailure)
from ..lab.inventory import SUITES, run_suite
from ..maps.charts import cube_point
from ..maps.small_fiber_map import (BUNDLE_SCHEMA, build_small_fiber_map, eval_f, fiber_of_f,
                                    from_bundle, tree_part)
from ..slicing.cross_sections import certified_fiber_bound, fiber_total_volume
from ..trees.tree_map import build_tree_map, tree_map_to_toml
from ..utils.config import RunConfig, load_run_config
from ..utils.file_helpers import load_json, save_toml
from ..utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2
EXIT_VERDICT = 3


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_list(text: str) -> List:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"not valid JSON: {e}") from e
    if not isinstance(value, list):
        raise argparse.ArgumentTypeError("expected a JSON list")
    return value


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def _require(cfg: RunConfig, *names: str):
    missing = [f"--{name}" for name in names if getattr(cfg, name) is None]
    if missing:
        raise ParameterError(f"Missing required option(s): {', '.join(missing)}")


def _load_map(cfg: RunConfig):
    _require(cfg, 'bundle')
    return from_bundle(load_json(Path(cfg.bundle)))


def cmd_schedule(cfg: RunConfig, echo: Dict) -> int:
    """Tree-map-only build: TOML spec (.toml --out) or JSON schedule"""
    _require(cfg, 'n', 'r', 'delta')
    spec = build_tree_map(cfg.n, cfg.r, cfg.delta)
    document = output.command_document(output.SCHEDULE_SCHEMA, echo, output.schedule_document(spec))
    if cfg.out and Path(cfg.out).suffix.lower() == '.toml':
        save_toml(tree_map_to_toml(spec), Path(cfg.out))
        output.write_markdown(output.schedule_markdown(spec), Path(cfg.out).with_suffix('.md'))
        logger.info(f"Wrote {cfg.out}")
        sys.stdout.write(output.emit(document))
        return EXIT_OK
    text = output.emit(document, Path(cfg.out) if cfg.out else None)
    if not cfg.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_build(cfg: RunConfig, echo: Dict) -> int:
    """Assemble f for S^n -> R^q and write its bundle"""
    if cfg.q is None:
        return cmd_schedule(cfg, echo)
    _require(cfg, 'n', 'q', 'epsilon')
    fiber_map = build_small_fiber_map(cfg.n, cfg.q, cfg.epsilon, seed=cfg.seed,
                                      resolution=cfg.resolution, workers=cfg.workers)
    document = output.command_document(BUNDLE_SCHEMA, echo, fiber_map.to_bundle())
    text = output.emit(document, Path(cfg.out) if cfg.out else None)
    if not cfg.out:
        sys.stdout.write(text)
    logger.info(f"Bundle: {len(fiber_map.tree.branches)} branches, r={fiber_map.r}, "
                f"delta={fiber_map.delta:.6g}")
    return EXIT_OK


def cmd_audit(cfg: RunConfig, echo: Dict) -> int:
    """epsilon-coverage audit of a bundle"""
    fiber_map = _load_map(cfg)
    report = run_audit(fiber_map, cfg.samples, seed=cfg.seed, workers=cfg.workers)
    payload = report.to_dict()
    if cfg.survey:
        payload['multiplicity_survey'] = multiplicity_survey(fiber_map, cfg.survey, seed=cfg.seed)
    document = output.command_document(payload['schema'], echo, payload)
    text = output.emit(document, Path(cfg.out) if cfg.out else None)
    if cfg.out:
        output.write_markdown(output.audit_markdown(payload), Path(cfg.out).with_suffix('.md'))
    else:
        sys.stdout.write(text)
    return EXIT_DEGENERATE if report.flagged else EXIT_OK


def _points(cfg: RunConfig) -> List:
    if not cfg.points:
        raise ParameterError("No points given (--points)")
    return cfg.points


def _as_input(fiber_map, point: Sequence[float], cube: bool):
    if cube:
        return cube_point(point)
    x = np.asarray(point, dtype=float)
    norm = np.linalg.norm(x)
    if x.shape != (fiber_map.n + 1,) or not np.isclose(norm, 1.0, atol=1e-9):
        raise ParameterError(f"Point {list(point)} is not a unit vector of R^{fiber_map.n + 1}")
    return x


def cmd_eval(cfg: RunConfig, echo: Dict) -> int:
    """f at sphere points (or cube-boundary points with --cube)"""
    fiber_map = _load_map(cfg)
    rows = []
    for point in _points(cfg):
        value = _as_input(fiber_map, point, cfg.cube)
        rows.append({'point': list(point), 'tree_point': tree_part(fiber_map, value).to_dict(),
                     'image': eval_f(fiber_map, value).tolist()})
    text = output.emit(output.command_document('smallfibers.eval/1', echo, {'results': rows}),
                       Path(cfg.out) if cfg.out else None)
    if not cfg.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fiber(cfg: RunConfig, echo: Dict) -> int:
    """Fibre of f through an image point (--y) or through f(x) for --points"""
    fiber_map = _load_map(cfg)
    targets = []
    if cfg.y is not None:
        targets.append(np.asarray(cfg.y, dtype=float))
    for point in cfg.points:
        targets.append(eval_f(fiber_map, _as_input(fiber_map, point, cfg.cube)))
    if not targets:
        raise ParameterError("Give an image point (--y) or source points (--points)")

    bound = certified_fiber_bound(fiber_map)
    fibers = []
    for y in targets:
        components = fiber_of_f(fiber_map, y)
        measured = fiber_total_volume(components, fiber_map.projection)
        fibers.append({'y': y.tolist(), 'components': [c.to_dict() for c in components],
                       'measure': measured.to_dict(), 'certified_bound': bound})
        if measured.degenerate:
            logger.warning(f"Fibre over {y.tolist()} has {measured.degenerate} degenerate slices")
    text = output.emit(output.command_document('smallfibers.fiber/1', echo, {'fibers': fibers}),
                       Path(cfg.out) if cfg.out else None)
    if not cfg.out:
        sys.stdout.write(text)
    degenerate = any(f['measure']['degenerate'] for f in fibers)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_render_svg(cfg: RunConfig, echo: Dict) -> int:
    """Planar figure of t_{2,r,delta}"""
    n = 2 if cfg.n is None else cfg.n
    if n != 2:
        raise ParameterError(f"render-svg draws n = 2 only, got --n {n}")
    _require(cfg, 'r', 'delta', 'out')
    rings = max(2, cfg.resolution // 16)
    summary = build_figure(cfg.r, cfg.delta, Path(cfg.out), rings=rings)
    sys.stdout.write(output.emit(output.command_document('smallfibers.figure/1', echo, summary)))
    return EXIT_OK


def cmd_verify_appendix(cfg: RunConfig, echo: Dict) -> int:
    """Run a sphere-check suite; nonzero exit when any verdict is inconsistent"""
    _require(cfg, 'suite')
    report = run_suite(cfg.suite, cfg.samples, seed=cfg.seed, workers=cfg.workers)
    payload = report.to_dict()
    text = output.emit(output.command_document(output.SUITE_SCHEMA, echo, payload),
                       Path(cfg.out) if cfg.out else None)
    if cfg.out:
        output.write_markdown(output.suite_markdown(payload), Path(cfg.out).with_suffix('.md'))
    else:
        sys.stdout.write(text)
    if cfg.plots:
        plot_suite(payload, Path(cfg.plots))
    if not report.consistent:
        raise VerdictFailure(', '.join(report.failing), f"suite {cfg.suite} has inconsistent verdicts")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, Dict], int]] = {
    'build': cmd_build,
    'schedule': cmd_schedule,
    'audit': cmd_audit,
    'eval': cmd_eval,
    'fiber': cmd_fiber,
    'render-svg': cmd_render_svg,
    'verify-appendix': cmd_verify_appendix,
}


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='TOML or YAML file whose keys mirror the flags')
    common.add_argument('--n', type=int, help='Sphere dimension')
    common.add_argument('--q', type=int, help='Target dimension')
    common.add_argument('--epsilon', type=float, help='Volume budget in (0, 1)')
    common.add_argument('--delta', type=float, help='Tree-map budget in (0, 1)')
    common.add_argument('--r', type=int, help='Recursion depth')
    common.add_argument('--seed', type=int, help='Seed (projection for build, sampling otherwise)')
    common.add_argument('--samples', type=int, help='Monte-Carlo samples')
    common.add_argument('--out', help='Output file')
    common.add_argument('--suite', choices=sorted(SUITES), help='Sphere-check suite')
    common.add_argument('--resolution', type=int, help='V_max grid cells per offset axis')
    common.add_argument('--workers', type=int, help='Worker threads')
    common.add_argument('--bundle', help='Map bundle (JSON) to load')
    common.add_argument('--points', type=_json_list, help='JSON list of points')
    common.add_argument('--log-level', dest='log_level', type=str.upper,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level')
    common.add_argument('--log-dir', dest='log_dir', help='Directory for a timestamped log file')
    return common


def build_parser() -> CliParser:
    common = _common_options()
    parser = CliParser(
        prog='smallfibers',
        description='Small-fibre maps S^n -> R^q: build, audit, render and verify',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Build a map and audit it
  smallfibers build --n 3 --q 2 --epsilon 0.1 --seed 0 --out map.json
  smallfibers audit --bundle map.json --samples 10000 --seed 1 --out audit.json

  # Tree-map schedule and the planar figure
  smallfibers schedule --n 3 --r 2 --delta 0.1 --out schedule.toml
  smallfibers render-svg --r 2 --delta 0.05 --out figure.svg

  # Sphere checks
  smallfibers verify-appendix --suite tubes --samples 100000 --plots charts/
        """,
    )
    sub = parser.add_subparsers(dest='command', parser_class=CliParser, metavar='COMMAND')
    sub.required = True
    sub.add_parser('build', parents=[common], help='Build and persist a map bundle')
    sub.add_parser('schedule', parents=[common], help='Tree-map schedule (TOML or JSON)')
    audit = sub.add_parser('audit', parents=[common], help='epsilon-coverage audit of a bundle')
    audit.add_argument('--survey', type=int,
                       help='Also count phi-preimages at this many random points')
    for name in ('eval', 'fiber'):
        cmd = sub.add_parser(name, parents=[common],
                             help='Evaluate f' if name == 'eval' else 'Extract fibres of f')
        cmd.add_argument('--cube', action='store_true', default=None,
                         help='Points are on the boundary of I^{n+1} instead of S^n')
        if name == 'fiber':
            cmd.add_argument('--y', type=_json_list, help='Image point in R^q (JSON list)')
    sub.add_parser('render-svg', parents=[common], help='Draw the fibres of t_{2,r,delta}')
    verify = sub.add_parser('verify-appendix', parents=[common], help='Run a sphere-check suite')
    verify.add_argument('--plots', help='Directory for SVG volume-vs-epsilon charts')
    return parser


def _settings(args: argparse.Namespace) -> RunConfig:
    cli_values = {k: v for k, v in vars(args).items() if k not in ('command', 'config')}
    return load_run_config(args.config, cli_values)


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line interface"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = _settings(args)
    except (SmallFiberError, OSError, ValueError) as e:
        print(f"FAIL: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(Path(cfg.log_dir) if cfg.log_dir else None, cfg.log_level)

    echo: Dict[str, Any] = {'command': args.command, **cfg.to_dict()}

    try:
        return COMMANDS[args.command](cfg, echo)
    except ParameterError as e:
        logger.error(f"Invalid parameters: {e}")
        return EXIT_USAGE
    except (DegeneracyError, EmbeddingError) as e:
        logger.error(f"Numerical degeneracy: {e}", exc_info=True)
        return EXIT_DEGENERATE
    except (VerdictFailure, CoverageError) as e:
        logger.error(f"Verdict failure: {e}")
        return EXIT_VERDICT
    except SmallFiberError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(f"File not found: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("\n\nCancelled.", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
