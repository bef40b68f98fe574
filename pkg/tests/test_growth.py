"""Transition matrices, parent counts, growth series and closed forms."""

from fractions import Fraction

import pytest

from src.errors import PreconditionError
from src.geodesic_fsa import build, minimize
from src.groups import CayleyOracle, ball, geodesic_layers
from src.growth import (
    GrowthSeries,
    RationalGF,
    TransitionMatrix,
    analyze_growth,
    berlekamp_massey,
    corrected_matrix,
    parent_count,
    parent_counts,
    rational_form,
    rational_form_by_determinant,
    series,
    transition_matrix,
    validate_growth,
)


def fractions(*values):
    return [Fraction(v) for v in values]


@pytest.fixture(scope="module")
def z1_pipeline(z1):
    oracle = CayleyOracle(z1.gens, z1.pres, 10)
    aut = build(1, oracle)
    small = minimize(aut, labels=parent_counts(aut))
    return oracle, small


@pytest.fixture(scope="module")
def z2_pipeline(z2):
    oracle = CayleyOracle(z2.gens, z2.pres, 8)
    aut = build(2, oracle)
    small = minimize(aut, labels=parent_counts(aut))
    return oracle, small


class TestTransitionMatrix:
    def test_z1_matrix(self, z1_pipeline):
        _, aut = z1_pipeline
        mx = transition_matrix(aut)
        assert mx.size == 3
        assert mx.dense() == [fractions(0, 1, 1), fractions(0, 1, 0), fractions(0, 0, 1)]
        assert mx.v1 == fractions(1, 0, 0)

    def test_weight_layers(self, line, z1_letters):
        gens = z1_letters(("a", 1, 1), ("A", -1, 1), ("b", 2, 2))
        mx = transition_matrix(build(2, CayleyOracle(gens, line, 8)))
        assert set(mx.layers) == {1, 2}
        assert mx.max_weight == 2


class TestParentCounts:
    def test_z2_corner_has_two_parents(self, z2, z2_pipeline):
        _, aut = z2_pipeline
        state = aut.states[aut.run(z2.gens.parse_word("a b"))]
        assert parent_count(state, aut.ball) == 2
        axis = aut.states[aut.run(z2.gens.parse_word("a a"))]
        assert parent_count(axis, aut.ball) == 1

    def test_start_state_counts_one(self, z2_pipeline):
        _, aut = z2_pipeline
        assert parent_counts(aut)[aut.start] == 1

    def test_delta_below_k_rejected(self, line, z1_letters):
        gens = z1_letters(("a", 1, 1), ("b", -2, 1))
        aut = build(1, CayleyOracle(gens, line))
        assert aut.k == 2
        with pytest.raises(PreconditionError, match="delta >= k"):
            parent_counts(aut)

    def test_corrected_matrix_needs_positive_counts(self, z1_pipeline):
        _, aut = z1_pipeline
        with pytest.raises(PreconditionError):
            corrected_matrix(transition_matrix(aut), [1, 0, 1])


class TestSeries:
    def test_z1(self, z1_pipeline):
        _, aut = z1_pipeline
        mx = corrected_matrix(transition_matrix(aut), parent_counts(aut))
        assert series(mx, 6).as_integers() == [1, 2, 2, 2, 2, 2]

    def test_z2_corrected_and_uncorrected(self, z2_pipeline):
        _, aut = z2_pipeline
        mx = transition_matrix(aut)
        assert series(mx, 5).as_integers() == [1, 4, 12, 28, 60]
        corrected = corrected_matrix(mx, parent_counts(aut))
        assert series(corrected, 6).as_integers() == [1, 4, 8, 12, 16, 20]

    def test_single_loop(self):
        mx = TransitionMatrix(size=1, layers={1: {(0, 0): Fraction(1)}}, v1=fractions(1), v2=fractions(1))
        assert series(mx, 4).as_integers() == [1, 1, 1, 1]
        assert rational_form(mx) == RationalGF((1,), (1, -1))

    def test_needs_a_term(self, z1_pipeline):
        _, aut = z1_pipeline
        with pytest.raises(PreconditionError):
            series(transition_matrix(aut), 0)


class TestBerlekampMassey:
    def test_fibonacci(self):
        c, length = berlekamp_massey(fractions(1, 1, 2, 3, 5, 8, 13, 21))
        assert length == 2
        assert c == fractions(1, -1, -1)

    def test_geometric(self):
        c, length = berlekamp_massey(fractions(1, 3, 9, 27, 81))
        assert length == 1
        assert c == fractions(1, -3)

    def test_zero_sequence(self):
        assert berlekamp_massey(fractions(0, 0, 0)) == ([Fraction(1)], 0)


class TestRationalForm:
    def test_z1_closed_form(self, z1_pipeline):
        _, aut = z1_pipeline
        gf = rational_form(corrected_matrix(transition_matrix(aut), parent_counts(aut)))
        assert gf == RationalGF((1, 1), (1, -1))
        assert str(gf) == "(1 + t) / (1 - t)"

    def test_z2_closed_form(self, z2_pipeline):
        _, aut = z2_pipeline
        gf = rational_form(corrected_matrix(transition_matrix(aut), parent_counts(aut)))
        assert gf == RationalGF((1, 2, 1), (1, -2, 1))
        assert gf.taylor(5) == fractions(1, 4, 8, 12, 16)

    def test_determinant_agrees(self, z2_pipeline):
        _, aut = z2_pipeline
        mx = corrected_matrix(transition_matrix(aut), parent_counts(aut))
        assert rational_form_by_determinant(mx) == rational_form(mx)

    def test_text_of_monomials(self):
        assert str(RationalGF((1,), (1, -1))) == "1 / (1 - t)"
        assert str(RationalGF((1, 0, 3), (1, -2, 1))) == "(1 + 3t^2) / (1 - 2t + t^2)"


class TestValidation:
    def test_uncorrected_series_fails_oracle(self, z2):
        table = ball(z2.gens, z2.pres, 4)
        assert not validate_growth(GrowthSeries(fractions(1, 4, 12, 28, 60)), table)
        assert validate_growth(GrowthSeries(fractions(1, 4, 8, 12, 16)), table)

    def test_ball_too_small(self, z2):
        with pytest.raises(PreconditionError):
            validate_growth(GrowthSeries(fractions(1, 4, 8)), ball(z2.gens, z2.pres, 1))


class TestAnalyzeGrowth:
    def test_z2(self, z2, oracle_for):
        result = analyze_growth(oracle_for(z2), 2, 8)
        assert result.validated
        assert result.determinant_check
        assert result.closed_form == RationalGF((1, 2, 1), (1, -2, 1))
        assert result.spheres == [1, 4, 8, 12, 16, 20, 24, 28]
        doc = result.to_dict()
        assert doc["rational_form"]["text"] == "(1 + 2t + t^2) / (1 - 2t + t^2)"

    def test_weighted_line(self, line, z1_letters):
        gens = z1_letters(("a", 1, 1), ("A", -1, 1), ("b", 2, 2))
        result = analyze_growth(CayleyOracle(gens, line), 2, 8)
        assert result.validated
        assert result.closed_form == RationalGF((1, 1), (1, -1))
        # compositions of n into parts 1 and 2, plus A^n
        assert result.language.as_integers()[:5] == [1, 2, 3, 4, 6]


class TestRecordedGroups:
    def test_psl2z_matches_recorded_values(self, psl2z, golden, verified_delta):
        recorded = golden("psl2z")
        delta = verified_delta(psl2z)
        assert delta is not None
        result = analyze_growth(CayleyOracle(psl2z.gens, psl2z.pres), max(delta, 1), len(recorded["spheres"]))
        assert result.validated
        assert result.spheres == recorded["spheres"]
        assert result.corrected.as_integers() == recorded["spheres"]
        assert result.closed_form == RationalGF(tuple(recorded["numerator"]), tuple(recorded["denominator"]))
        assert str(result.closed_form) == recorded["text"]
        assert result.closed_form.taylor(len(recorded["spheres"])) == recorded["spheres"]

    def test_cannon_enlarged_matches_bfs(self, cannon_enlarged, verified_delta):
        delta = verified_delta(cannon_enlarged)
        assert delta is not None
        oracle = CayleyOracle(cannon_enlarged.gens, cannon_enlarged.pres)
        result = analyze_growth(oracle, max(delta, 1), 13)
        assert result.validated
        assert result.corrected.is_integral()
        assert result.corrected.as_integers() == ball(cannon_enlarged.gens, cannon_enlarged.pres, 12).sphere_sizes()


@pytest.fixture(scope="module", params=["z2", "cannon_enlarged", "psl2z"])
def geodesic_words(request, verified_delta):
    """(oracle, automaton, parent counts, geodesic words grouped by element) to radius 6."""
    definition = request.getfixturevalue(request.param)
    oracle = CayleyOracle(definition.gens, definition.pres, 6)
    delta = 2 if request.param == "z2" else verified_delta(definition)
    aut = build(max(delta, 1), oracle)
    by_element = {}
    layers = geodesic_layers(oracle, 6)
    for n in layers:
        for word, g in layers[n]:
            by_element.setdefault(g, []).append(word)
    return oracle, aut, parent_counts(aut), by_element


class TestParentCountInvariants:
    def test_count_depends_only_on_element(self, geodesic_words):
        oracle, aut, counts, by_element = geodesic_words
        gens, pres = oracle.gens, oracle.pres
        for g, words in by_element.items():
            seen = {counts[aut.run(word)] for word in words}
            assert len(seen) == 1
            if g == pres.identity:
                continue
            parents = sum(
                1 for b, value in enumerate(gens.values)
                if oracle.length(pres.multiply(g, pres.inverse(value))) == oracle.length(g) - gens.weights[b]
            )
            assert seen == {parents}

    def test_weights_along_geodesics_sum_to_one(self, geodesic_words):
        _, aut, counts, by_element = geodesic_words
        for words in by_element.values():
            total = Fraction(0)
            for word in words:
                weight, s = Fraction(1), aut.start
                for a in word:
                    s = aut.transitions[s][a]
                    weight /= counts[s]
                total += weight
            assert total == 1
