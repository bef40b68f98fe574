"""
Geodesic Growth Toolkit - Command Line

Subcommands:
    ball         sphere sizes of the Cayley graph ball
    fft          falsification by fellow traveller sweep (or delta scan)
    automaton    geodesic automaton: build, minimize, cross-validate, export
    growth       corrected growth series and rational closed form
    polytope     translation polytope, hemisphere checks, good sets, cone languages
    cannon-demo  Myhill-Nerode witnesses for the Cannon group

Usage:
    python -m src.cli ball --group z2 --radius 5
    python -m src.cli growth --group z1 --delta 1 --terms 12 --format json
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import cannon, fellow_travel, geodesic_fsa, growth, polytopes
from .config import LIMITS, PROCESSING, ensure_paths_exist
from .errors import ConfigError, GeoGrowthError, PreconditionError, ValidationDisagreement
from .group_files import GroupDefinition, definition_to_document, load_group, load_points, load_triangulation
from .groups import KIND_VA, CayleyOracle, LengthTable
from .reports import FORMAT_JSON, FORMAT_TEXT, Report, emit
from .utils import canonical_digest, load_cached, parse_int_range, setup_logger, store_cached

logger = setup_logger("cli")

EXIT_OK = 0


def _oracle(definition: GroupDefinition, radius: int, cap: Optional[int]) -> CayleyOracle:
    """Oracle whose table comes from the cache when one is configured."""
    key = canonical_digest({"group": definition.document, "radius": radius})
    cached = load_cached("ball", key)
    if cached is not None:
        logger.debug(f"Ball cache hit for {definition.name} radius {radius}")
        table = LengthTable.from_json(cached, definition.pres)
        return CayleyOracle(definition.gens, definition.pres, radius, cap, table=table)
    oracle = CayleyOracle(definition.gens, definition.pres, radius, cap)
    store_cached("ball", key, oracle.table.to_json())
    return oracle


def _automaton(definition: GroupDefinition, delta: int, oracle: CayleyOracle, state_cap: Optional[int]):
    key = canonical_digest({"group": definition.document, "delta": delta})
    cached = load_cached("automaton", key)
    if cached is not None:
        logger.debug(f"Automaton cache hit for {definition.name} delta {delta}")
        return geodesic_fsa.automaton_from_document(cached, oracle)
    aut = geodesic_fsa.build(delta, oracle, state_cap)
    store_cached("automaton", key, geodesic_fsa.automaton_to_document(aut))
    return aut


def cmd_ball(args, definition: GroupDefinition, report: Report) -> int:
    with report.stage("ball"):
        oracle = _oracle(definition, args.radius, args.ball_cap)
    spheres = oracle.table.sphere_sizes()
    report.add("radius", args.radius)
    report.add("spheres", spheres)
    report.add("elements", len(oracle.table))
    return EXIT_OK


def cmd_fft(args, definition: GroupDefinition, report: Report) -> int:
    oracle = _oracle(definition, args.radius, args.ball_cap)
    if args.scan_delta:
        try:
            lo, hi = parse_int_range(args.scan_delta)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        with report.stage("scan"):
            reports = fellow_travel.scan_fft(args.radius, range(lo, hi + 1), oracle, args.workers)
        found = reports[-1].delta if reports and reports[-1].holds else None
        report.add("min_delta", found)
        report.add("scans", [r.to_dict() for r in reports])
        return EXIT_OK

    if args.delta is None:
        raise ConfigError("fft needs --delta or --scan-delta")
    with report.stage("verify"):
        result = fellow_travel.verify_fft(args.delta, args.radius, oracle, args.workers)
    report.add("fft", result.to_dict())
    return EXIT_OK


def cmd_automaton(args, definition: GroupDefinition, report: Report) -> int:
    oracle = _oracle(definition, max(args.delta, 1), args.ball_cap)
    with report.stage("build"):
        aut = _automaton(definition, args.delta, oracle, args.state_cap)
    with report.stage("minimize"):
        small = geodesic_fsa.minimize(aut)
    report.add("automaton", aut.stats())
    report.add("minimized_states", small.live_count)

    status = EXIT_OK
    if args.validate:
        with report.stage("validate"):
            validation = geodesic_fsa.cross_validate(small, args.validate, oracle)
            same = geodesic_fsa.equivalent(aut, small)
        report.add("validation", validation.to_dict())
        report.add("minimization_preserves_language", same is None)
        if not validation.agree:
            status = ValidationDisagreement.exit_code

    if args.dot:
        Path(args.dot).write_text(geodesic_fsa.export_dot(small, args.include_fail), encoding="utf-8")
        report.add("dot", str(args.dot))
    if args.save:
        geodesic_fsa.save_automaton(small, Path(args.save))
        report.add("saved", str(args.save))
    return status


def cmd_growth(args, definition: GroupDefinition, report: Report) -> int:
    oracle = _oracle(definition, max(args.terms - 1, 1), args.ball_cap)
    delta = args.delta
    if delta is None:
        with report.stage("delta"):
            delta = fellow_travel.min_fft_delta(args.fft_radius, args.delta_max, oracle, args.workers)
        if delta is None:
            raise GeoGrowthError(
                f"FFT not verified for any delta <= {args.delta_max} at radius {args.fft_radius}; pass --delta"
            )
        report.add("verified_delta", delta)

    with report.stage("growth"):
        aut = _automaton(definition, delta, oracle, args.state_cap)
        result = growth.analyze_growth(oracle, delta, args.terms, aut=aut)
    report.add("growth", result.to_dict())
    return EXIT_OK if result.validated else ValidationDisagreement.exit_code


def cmd_polytope(args, definition: GroupDefinition, report: Report) -> int:
    pres, gens = definition.pres, definition.gens
    with report.stage("polytope"):
        c_a = polytopes.translation_polytope(gens, pres)
    rays = polytopes.boundary_rays(c_a)
    report.add("polytope", c_a.to_dict())
    report.add("boundary_rays", [list(r.direction) for r in rays])
    report.add("rays_in_hemisphere", polytopes.hemisphere_check(rays))
    report.add("symmetric_rays_in_hemisphere", polytopes.symmetric_hemisphere_check(rays))
    report.add("f_invariant_rays", [list(r.direction) for r in polytopes.f_invariant_core(rays, pres)])
    with report.stage("translation_lengths"):
        oracle = CayleyOracle(gens, pres, 0, args.ball_cap)
        samples = polytopes.translation_samples([r.direction for r in rays], gens, pres, oracle=oracle)
        report.add("translation_samples", [s.to_dict() for s in samples])
        if args.gauge_box:
            report.add("gauge_exceptions", [list(v) for v in polytopes.gauge_exceptions(gens, pres, args.gauge_box)])

    if args.goodify:
        points = load_points(args.goodify)
        q = polytopes.convex_hull(points, pres.rank)
        with report.stage("goodify"):
            good = polytopes.good_generating_set(gens, q, pres, symmetric=args.symmetric)
            enlarged = polytopes.translation_polytope(good.gens, pres)
        name = f"{definition.name}_good"
        document = definition_to_document(name, pres, good.gens, definition.infinite)
        report.add("good_set", {
            "scale": good.scale,
            "letters": len(good.gens),
            "added": good.added,
            "polytope_matches": enlarged.vertex_set() == good.polytope.vertex_set(),
            "is_good": polytopes.is_good(good.gens, pres, args.fft_radius),
            "document": document,
        })
        with report.stage("goodify_fft"):
            oracle = CayleyOracle(good.gens, pres, args.fft_radius, args.ball_cap)
            delta = fellow_travel.min_fft_delta(args.fft_radius, args.delta_max, oracle, args.workers)
        report.add("good_set_fft_delta", delta)
        if args.save_group:
            path = Path(args.save_group)
            path.write_text(
                json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            report.add("saved_group", str(path))

    if args.cone:
        tri = load_triangulation(args.cone)
        with report.stage("cone"):
            language = polytopes.cone_language(tri, gens, pres, scale=args.scale, check_radius=args.check_radius)
        report.add("cone_language", language.to_dict(gens))
        report.add("uncovered_points", [list(p) for p in tri.check_cover(args.cover_radius)])
    return EXIT_OK


def cmd_cannon_demo(args, definition: GroupDefinition, report: Report) -> int:
    oracle = CayleyOracle(definition.gens, definition.pres, 0, args.ball_cap)
    with report.stage("nerode"):
        table = cannon.nerode_separation(args.n_max, oracle)
    report.add("nerode", table.to_dict())
    report.add("explanation", cannon.EXPLANATION)
    return EXIT_OK


COMMANDS = {
    "ball": cmd_ball,
    "fft": cmd_fft,
    "automaton": cmd_automaton,
    "growth": cmd_growth,
    "polytope": cmd_polytope,
    "cannon-demo": cmd_cannon_demo,
}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", required=True, help="Bundled group name or path to a group file")
    common.add_argument("--format", choices=[FORMAT_TEXT, FORMAT_JSON], default=FORMAT_TEXT,
                        help="Report format (default: text)")
    common.add_argument("--output", type=Path, default=None, help="Write the report here instead of stdout")
    common.add_argument("--ball-cap", type=_positive, default=None,
                        help=f"Max ball entries (default: {LIMITS['BALL_CAP']})")
    common.add_argument("--state-cap", type=_positive, default=None,
                        help=f"Max automaton states (default: {LIMITS['STATE_CAP']})")
    common.add_argument("--workers", type=_positive, default=None,
                        help=f"Worker processes for word sweeps (default: {PROCESSING['WORKERS']})")

    parser = argparse.ArgumentParser(
        prog="geogrowth",
        description="Geodesic automata and rational growth for Cayley graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ball", parents=[common], help="Sphere sizes of a Cayley graph ball")
    p.add_argument("--radius", type=_nonnegative, required=True)

    p = sub.add_parser("fft", parents=[common], help="Verify FFT or scan for the least delta")
    p.add_argument("--delta", type=_nonnegative, default=None)
    p.add_argument("--radius", type=_positive, default=PROCESSING["FFT_SCAN_RADIUS"])
    p.add_argument("--scan-delta", default=None, help="Inclusive delta range, e.g. 0..3")

    p = sub.add_parser("automaton", parents=[common], help="Build the geodesic automaton")
    p.add_argument("--delta", type=_nonnegative, required=True)
    p.add_argument("--validate", type=_positive, default=None, help="Cross-validate to this radius")
    p.add_argument("--dot", type=Path, default=None, help="Write the minimized automaton as DOT")
    p.add_argument("--include-fail", action="store_true", help="Show the fail state in DOT output")
    p.add_argument("--save", type=Path, default=None, help="Save the minimized automaton as JSON")

    p = sub.add_parser("growth", parents=[common], help="Growth series and rational closed form")
    p.add_argument("--delta", type=_nonnegative, default=None,
                   help="Fellow-travel constant (default: least verified by an FFT scan)")
    p.add_argument("--terms", type=_positive, default=12)
    p.add_argument("--fft-radius", type=_positive, default=PROCESSING["FFT_SCAN_RADIUS"])
    p.add_argument("--delta-max", type=_nonnegative, default=6)

    p = sub.add_parser("polytope", parents=[common], help="Translation polytope and cone languages")
    p.add_argument("--goodify", default=None, help="Polytope point file Q for a good generating set")
    p.add_argument("--symmetric", action="store_true", help="Require an inverse-closed good set")
    p.add_argument("--save-group", type=Path, default=None, help="Write the good set as a group file")
    p.add_argument("--fft-radius", type=_positive, default=4)
    p.add_argument("--delta-max", type=_nonnegative, default=6)
    p.add_argument("--cone", default=None, help="Triangulation file for a cone language")
    p.add_argument("--scale", type=_positive, default=None, help="Scale N (default: least that works)")
    p.add_argument("--check-radius", type=_positive, default=None)
    p.add_argument("--cover-radius", type=_positive, default=3)
    p.add_argument("--gauge-box", type=_nonnegative, default=6,
                   help="Check tau(v) <= 1 against C(A) on this integer box (0 skips)")

    p = sub.add_parser("cannon-demo", parents=[common], help="Non-regularity witnesses for the Cannon group")
    p.add_argument("--n-max", type=_positive, default=5)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ensure_paths_exist()

    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())}
    report = Report(args.command, config)
    try:
        definition = load_group(args.group)
        if args.command == "polytope" and definition.pres.kind != KIND_VA:
            raise PreconditionError("polytope needs a virtually abelian group")
        status = COMMANDS[args.command](args, definition, report)
    except GeoGrowthError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"{args.command} failed unexpectedly: {e}", exc_info=True)
        return 1

    text = emit(report, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
