#!/usr/bin/env python3
"""
Acceptance Sweep

Runs the full-radius acceptance checks against the bundled groups:
1. Automaton vs oracle on every word in range
2. Corrected growth series vs BFS sphere sizes
3. Closed forms for Z and Z^2, psl2z closed form re-verified
4. FFT holds for good sets and fails for the Cannon base set
5. Myhill-Nerode separation for the Cannon prefixes
6. Gauge identity and translation length convergence
7. Good generating set round trip for the Cannon group
8. Hemisphere predicate vs brute force
9. Quadrant cone language surjectivity
10. Minimization preserves every language

Usage:
    python -m scripts.run_acceptance
    python -m scripts.run_acceptance --quick
    python -m scripts.run_acceptance --only 3 --only 5
    python -m scripts.run_acceptance --workers 4
"""

import argparse
import itertools
import sys
import time
from datetime import datetime
from pathlib import Path

# Allow running as `python -m scripts.run_acceptance` from repo root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cannon import nerode_separation
from src.errors import GeoGrowthError
from src.fellow_travel import falsify, min_fft_delta, verify_fft
from src.geodesic_fsa import build, cross_validate, equivalent, minimize
from src.group_files import load_group, load_points, load_triangulation
from src.groups import CayleyOracle, GeneratingSet, GroupPresentation, Letter, VAElement
from src.growth import RationalGF, analyze_growth
from src.polytopes import (
    Ray,
    cone_language,
    convex_hull,
    gauge_exceptions,
    good_generating_set,
    hemisphere_check,
    translation_polytope,
    translation_samples,
)

FIXED_DELTAS = {"z1": 1, "z2": 2, "z3": 2, "cannon": 2}


class AcceptanceRun:
    """Run the acceptance checks and report pass/fail per check."""

    def __init__(self, quick: bool = False, only: list[int] = None, workers: int = 1):
        self.quick = quick
        self.only = set(only or [])
        self.workers = workers
        self.validation_radius = 6 if quick else 8
        self.terms = 9 if quick else 13
        self.fft_radius = 6 if quick else 8
        self.cannon_radius = 10 if quick else 12
        self.groups = {}
        self.oracles = {}
        self.deltas = dict(FIXED_DELTAS)
        self.results: dict[int, bool] = {}

    def log(self, msg: str, level: str = "INFO"):
        """Print timestamped log message."""
        ts = datetime.now().strftime("%H:%M:%S")
        prefix = {"INFO": "[*]", "OK": "[+]", "FAIL": "[-]", "WARN": "[!]"}
        print(f"{ts} {prefix.get(level, '[*]')} {msg}", flush=True)

    def group(self, name: str):
        if name not in self.groups:
            self.groups[name] = load_group(name)
        return self.groups[name]

    def oracle(self, name: str) -> CayleyOracle:
        if name not in self.oracles:
            definition = self.group(name)
            self.oracles[name] = CayleyOracle(definition.gens, definition.pres)
        return self.oracles[name]

    def delta(self, name: str) -> int:
        """Fixed delta for the small groups, least verified delta otherwise."""
        if name not in self.deltas:
            found = min_fft_delta(self.fft_radius, 6, self.oracle(name), self.workers)
            if found is None:
                raise GeoGrowthError(f"No delta <= 6 verified for {name} at radius {self.fft_radius}")
            self.log(f"{name}: least verified delta {found}")
            self.deltas[name] = max(found, self.oracle(name).asym_constant(6))
        return self.deltas[name]

    def check_automaton_oracle(self) -> bool:
        ok = True
        for name, radius in [("z1", 12), ("z2", 8), ("cannon_enlarged", 8), ("psl2z", 8)]:
            radius = min(radius, self.validation_radius) if self.quick else radius
            delta = self.delta(name)
            aut = minimize(build(delta, self.oracle(name)))
            report = cross_validate(aut, radius, self.oracle(name))
            if report.agree:
                self.log(f"{name}: {aut.live_count} states, {report.words_checked} words agree to radius {radius}", "OK")
            else:
                self.log(f"{name}: disagreement on {report.disagreement.text}", "FAIL")
                ok = False
        return ok

    def check_growth_identity(self) -> bool:
        ok = True
        for name in ["z1", "z2", "cannon_enlarged", "psl2z"]:
            result = analyze_growth(self.oracle(name), self.delta(name), self.terms)
            if result.validated and result.corrected.is_integral():
                self.log(f"{name}: {result.corrected.as_integers()} matches BFS", "OK")
            else:
                self.log(f"{name}: series {result.corrected.coefficients} vs spheres {result.spheres}", "FAIL")
                ok = False
        return ok

    def check_closed_forms(self) -> bool:
        expected = {"z1": RationalGF((1, 1), (1, -1)), "z2": RationalGF((1, 2, 1), (1, -2, 1))}
        ok = True
        for name, gf in expected.items():
            result = analyze_growth(self.oracle(name), self.delta(name), 8)
            oracle = self.oracle(name)
            oracle.ensure(19)
            spheres = oracle.table.restrict(19).sphere_sizes()
            if result.closed_form == gf and gf.taylor(20) == spheres:
                self.log(f"{name}: {gf}, 20 terms confirmed", "OK")
            else:
                self.log(f"{name}: got {result.closed_form}, expected {gf}", "FAIL")
                ok = False

        result = analyze_growth(self.oracle("psl2z"), self.delta("psl2z"), 10)
        self.log(f"psl2z closed form: {result.closed_form}")
        if result.validated and result.closed_form.taylor(10) == result.corrected.coefficients:
            self.log("psl2z: closed form re-verified against 10 BFS terms", "OK")
        else:
            self.log("psl2z: closed form does not match BFS", "FAIL")
            ok = False
        return ok

    def check_fft_dichotomy(self) -> bool:
        ok = True
        for name in ["z1", "z2", "cannon_enlarged"]:
            report = verify_fft(self.delta(name), self.fft_radius, self.oracle(name), self.workers)
            if report.holds:
                self.log(f"{name}: FFT holds at delta={report.delta}, {report.words_checked} words", "OK")
            else:
                self.log(f"{name}: counterexample {report.counterexample.text}", "FAIL")
                ok = False

        cannon = self.group("cannon")
        oracle = self.oracle("cannon")
        for delta in range(4):
            report = verify_fft(delta, self.cannon_radius, oracle, self.workers)
            if report.holds:
                self.log(f"cannon: FFT unexpectedly holds at delta={delta}", "FAIL")
                ok = False
                continue
            self.log(f"cannon: delta={delta} sweep fails first on {report.counterexample.text}")
            # t c^n t c^n: the shortcut d^2n leaves the corridor once n > delta
            family = None
            for n in range(1, self.cannon_radius // 2):
                word = cannon.gens.parse_word(f"t c^{n} t c^{n}")
                if falsify(word, delta, oracle) is None:
                    family = n
                    break
            if family is not None:
                self.log(f"cannon: delta={delta} defeated by t c^{family} t c^{family}", "OK")
            else:
                self.log(f"cannon: no t c^n t c^n word within radius {self.cannon_radius} defeats delta={delta}", "FAIL")
                ok = False
        return ok

    def check_nerode(self) -> bool:
        table = nerode_separation(5, self.oracle("cannon"))
        ok = table.separated == len(table.witnesses) == 10
        self.log(f"{table.separated}/{len(table.witnesses)} prefix pairs separated", "OK" if ok else "FAIL")
        return ok

    def check_gauge(self) -> bool:
        z2 = self.group("z2")
        plane = GroupPresentation.free_abelian(2)
        skew = GeneratingSet(tuple(
            Letter(name, VAElement(v, 0), 1) for name, v in [("a", (1, 0)), ("b", (0, 1)), ("c", (-1, -1))]
        ))
        ok = True
        for label, gens, pres in [("z2", z2.gens, z2.pres), ("skew", skew, plane)]:
            bad = gauge_exceptions(gens, pres, 6)
            if bad:
                self.log(f"{label}: gauge identity fails at {bad[:5]}", "FAIL")
                ok = False
            samples = translation_samples([(1, 0), (1, 1), (2, 1), (-1, 2)], gens, pres)
            worst = max(s.deviation(n) * n for s in samples for n in s.lengths)
            if worst > 2:
                self.log(f"{label}: |l(nv)/n - tau(v)| exceeds 2/n (scaled {worst})", "FAIL")
                ok = False
            else:
                self.log(f"{label}: gauge identity exact on [-6,6]^2, scaled deviation <= {worst}", "OK")
        return ok

    def check_good_set(self) -> bool:
        cannon = self.group("cannon")
        q = convex_hull(load_points("q_square"), 2)
        good = good_generating_set(cannon.gens, q, cannon.pres)
        matches = translation_polytope(good.gens, cannon.pres).vertex_set() == good.polytope.vertex_set()
        oracle = CayleyOracle(good.gens, cannon.pres)
        delta = min_fft_delta(self.fft_radius, 6, oracle, self.workers)
        ok = matches and delta is not None
        self.log(
            f"N={good.scale}, {len(good.gens)} letters, C(A)=N·Q: {matches}, FFT delta: {delta}",
            "OK" if ok else "FAIL",
        )
        return ok

    def check_hemisphere(self) -> bool:
        pool = [Ray.of(v) for v in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)]]
        normals = [u for u in itertools.product(range(-2, 3), repeat=2) if any(u)]
        cases = mismatches = 0
        for size in range(1, len(pool) + 1):
            for subset in itertools.combinations(pool, size):
                cases += 1
                brute = any(all(u[0] * r.direction[0] + u[1] * r.direction[1] >= 0 for r in subset) for u in normals)
                if hemisphere_check(list(subset)) != brute:
                    mismatches += 1
                    self.log(f"mismatch on {[str(r) for r in subset]}", "WARN")
        ok = mismatches == 0 and cases == 63
        self.log(f"{cases} ray sets, {mismatches} mismatches", "OK" if ok else "FAIL")
        return ok

    def check_cone_language(self) -> bool:
        z2 = self.group("z2")
        language = cone_language(load_triangulation("quadrants"), z2.gens, z2.pres, check_radius=10)
        ok = language.surjective and language.cone_words_geodesic
        self.log(
            f"N={language.scale}, {language.elements_checked} elements reached, "
            f"geodesic: {language.cone_words_geodesic}",
            "OK" if ok else "FAIL",
        )
        return ok

    def check_minimization(self) -> bool:
        ok = True
        for name in ["z1", "z2", "z3", "cannon", "cannon_enlarged", "psl2z"]:
            aut = build(self.delta(name), self.oracle(name))
            small = minimize(aut)
            same = equivalent(aut, small) is None
            stable = minimize(small).live_count == small.live_count
            self.log(
                f"{name}: {aut.live_count} -> {small.live_count} states",
                "OK" if same and stable else "FAIL",
            )
            ok = ok and same and stable
        return ok

    def run(self) -> bool:
        """
        Run the selected checks.

        Returns:
            True if every check passed
        """
        checks = [
            (1, "Automaton vs oracle", self.check_automaton_oracle),
            (2, "Corrected growth identity", self.check_growth_identity),
            (3, "Closed forms", self.check_closed_forms),
            (4, "FFT dichotomy", self.check_fft_dichotomy),
            (5, "Non-regularity witnesses", self.check_nerode),
            (6, "Gauge identity", self.check_gauge),
            (7, "Good-set round trip", self.check_good_set),
            (8, "Hemisphere predicate", self.check_hemisphere),
            (9, "Cone language", self.check_cone_language),
            (10, "Minimization safety", self.check_minimization),
        ]
        self.log("=" * 60)
        self.log(f"Acceptance Sweep{' [QUICK]' if self.quick else ''}")
        self.log("=" * 60)

        started = time.monotonic()
        for number, title, check in checks:
            if self.only and number not in self.only:
                continue
            self.log(f"Check {number}: {title}")
            t0 = time.monotonic()
            try:
                self.results[number] = check()
            except GeoGrowthError as e:
                self.log(f"Check {number} raised {type(e).__name__}: {e}", "FAIL")
                self.results[number] = False
            self.log(f"Check {number} took {time.monotonic() - t0:.1f}s")
            print(flush=True)

        failed = [n for n, passed in self.results.items() if not passed]
        self.log("=" * 60)
        self.log(f"{len(self.results) - len(failed)}/{len(self.results)} checks passed in {time.monotonic() - started:.0f}s")
        if failed:
            self.log(f"Failed: {', '.join(str(n) for n in failed)}", "FAIL")
            return False
        self.log("All checks passed", "OK")
        return True


def main():
    parser = argparse.ArgumentParser(
        description="Run the acceptance sweep over the bundled groups"
    )
    parser.add_argument(
        "--quick",
        action="store_true",
        help="Smaller radii and fewer terms (for a fast smoke run)",
    )
    parser.add_argument(
        "--only",
        type=int,
        action="append",
        default=None,
        help="Run only this check number (repeatable)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Worker processes for FFT sweeps (default: 1)",
    )

    args = parser.parse_args()

    run = AcceptanceRun(quick=args.quick, only=args.only, workers=args.workers)
    success = run.run()
    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
