"""Geodesic automaton construction, minimization, validation and export."""

import re

import pytest

from src.errors import ConfigError, ResourceCapError
from src.fellow_travel import min_fft_delta
from src.geodesic_fsa import (
    DeltaBall,
    GeodesicAutomaton,
    ProfileState,
    accepts,
    automaton_from_document,
    automaton_to_document,
    build,
    cross_validate,
    equivalent,
    export_dot,
    load_automaton,
    minimize,
    save_automaton,
)
from src.groups import CayleyOracle, geodesic_layers, iter_words

Z1_DOT = """digraph geodesic_automaton {
    rankdir=LR;
    node [shape=doublecircle];
    start [shape=point];
    start -> 0;
    0 -> 1 [label="a"];
    0 -> 2 [label="A"];
    1 -> 1 [label="a"];
    2 -> 2 [label="A"];
}
"""

ONE_STATE_DOT = """digraph geodesic_automaton {
    rankdir=LR;
    node [shape=doublecircle];
    start [shape=point];
    start -> 0;
    0 -> 0 [label="a"];
}
"""


def one_state_automaton():
    """Accepts every word over the single letter a."""
    return GeodesicAutomaton(
        delta=0, k=1, alphabet=("a",), weights=(1,),
        states=[ProfileState((0,))], start=0, transitions=[[0], [1]],
    )


@pytest.fixture(scope="module")
def z1_automaton(z1):
    oracle = CayleyOracle(z1.gens, z1.pres, 12)
    return oracle, build(1, oracle)


@pytest.fixture(scope="module")
def z2_automaton(z2):
    oracle = CayleyOracle(z2.gens, z2.pres, 8)
    return oracle, build(2, oracle)


@pytest.fixture(scope="module", params=["cannon_enlarged", "psl2z"])
def verified_automaton(request, verified_delta):
    definition = request.getfixturevalue(request.param)
    oracle = CayleyOracle(definition.gens, definition.pres, 8)
    delta = verified_delta(definition)
    assert delta is not None
    return oracle, build(max(delta, 1), oracle)


class TestDeltaBall:
    def test_identity_first(self, cannon, oracle_for):
        ball = DeltaBall(oracle_for(cannon), 2)
        assert ball.elements[0] == cannon.pres.identity
        assert ball.ell[0] == 0
        assert ball.k == 1

    def test_start_profile_is_clamped_length(self, z2, oracle_for):
        ball = DeltaBall(oracle_for(z2), 2)
        start = ball.start_state()
        assert start.table == tuple(min(n, 2) for n in ball.ell)

    def test_step_fails_on_backtrack(self, z1, oracle_for):
        ball = DeltaBall(oracle_for(z1), 1)
        a, big_a = z1.gens.index_of("a"), z1.gens.index_of("A")
        after_a = ball.step(ball.start_state(), a, 1)
        assert after_a is not None
        assert ball.step(after_a, big_a, 1) is None


class TestBuild:
    def test_z1_minimized_shape(self, z1_automaton):
        _, aut = z1_automaton
        small = minimize(aut)
        assert small.live_count == 3
        assert small.transitions == [[1, 2], [1, 3], [3, 2], [3, 3]]

    def test_accepts(self, z1, z2, z1_automaton, z2_automaton):
        _, aut1 = z1_automaton
        _, aut2 = z2_automaton
        assert accepts(aut1, ())
        assert accepts(aut1, z1.gens.parse_word("a a a"))
        assert not accepts(aut1, z1.gens.parse_word("a a A"))
        assert accepts(aut2, z2.gens.parse_word("a b"))
        assert not accepts(aut2, z2.gens.parse_word("a b A"))

    def test_prefix_closed(self, cannon, oracle_for):
        aut = build(1, oracle_for(cannon))
        for word in iter_words(len(cannon.gens), 4):
            if accepts(aut, word):
                assert all(accepts(aut, word[:i]) for i in range(len(word)))

    def test_state_cap(self, z2, oracle_for):
        with pytest.raises(ResourceCapError):
            build(2, oracle_for(z2), state_cap=2)

    def test_hash_consing(self, z2_automaton):
        _, aut = z2_automaton
        assert len(set(aut.states)) == len(aut.states)


class TestMinimize:
    def test_idempotent(self, z2_automaton):
        _, aut = z2_automaton
        once = minimize(aut)
        assert minimize(once).live_count == once.live_count

    def test_preserves_language(self, z1_automaton, z2_automaton):
        for _, aut in (z1_automaton, z2_automaton):
            assert equivalent(aut, minimize(aut)) is None

    def test_delta_does_not_change_z1_language(self, z1_automaton):
        oracle, aut = z1_automaton
        wider = build(2, oracle)
        assert equivalent(minimize(aut), minimize(wider)) is None

    def test_labels_keep_states_apart(self, z1_automaton):
        _, aut = z1_automaton
        labels = list(range(aut.live_count))
        assert minimize(aut, labels=labels).live_count == aut.live_count

    def test_equivalent_finds_shortest_difference(self):
        everything = one_state_automaton()
        only_empty = GeodesicAutomaton(
            delta=0, k=1, alphabet=("a",), weights=(1,),
            states=[ProfileState((0,))], start=0, transitions=[[1], [1]],
        )
        assert equivalent(everything, only_empty) == (0,)

    def test_safe_on_larger_groups(self, verified_automaton):
        _, aut = verified_automaton
        once = minimize(aut)
        assert once.live_count <= aut.live_count
        assert equivalent(aut, once) is None
        twice = minimize(once)
        assert twice.live_count == once.live_count
        assert equivalent(once, twice) is None


class TestCrossValidate:
    def test_z1(self, z1_automaton):
        oracle, aut = z1_automaton
        report = cross_validate(minimize(aut), 12, oracle)
        assert report.agree
        assert report.disagreement is None

    def test_z2(self, z2_automaton):
        oracle, aut = z2_automaton
        assert cross_validate(minimize(aut), 8, oracle).agree

    def test_cannon_base_set_disagrees(self, cannon, oracle_for):
        oracle = oracle_for(cannon, 8)
        report = cross_validate(build(2, oracle), 8, oracle)
        assert not report.agree
        assert report.disagreement.automaton_accepts != report.disagreement.oracle_geodesic

    def test_enlarged_cannon(self, cannon_enlarged, oracle_for):
        oracle = oracle_for(cannon_enlarged, 5)
        delta = min_fft_delta(5, 4, oracle)
        assert delta is not None
        aut = build(max(delta, 1), oracle)
        assert cross_validate(aut, 5, oracle).agree
        gens = cannon_enlarged.gens
        twisted = gens.parse_word("t c^3 t c^2")
        assert oracle.evaluate(twisted) == oracle.evaluate(gens.parse_word("e^3 c^2"))
        assert not oracle.is_geodesic(twisted)
        assert not accepts(aut, twisted)
        assert accepts(aut, gens.parse_word("e^3 c^2"))
        assert not accepts(aut, gens.parse_word("t c^2 t c^2"))

    def test_verified_groups_agree_to_radius_eight(self, verified_automaton):
        oracle, aut = verified_automaton
        report = cross_validate(minimize(aut), 8, oracle)
        assert report.agree
        assert report.words_checked > 0

    def test_geodesic_words_all_accepted(self, z2_automaton):
        oracle, aut = z2_automaton
        layers = geodesic_layers(oracle, 6)
        assert all(accepts(aut, word) for n in layers for word, _ in layers[n])


class TestExport:
    def test_z1_dot(self, z1_automaton):
        _, aut = z1_automaton
        assert export_dot(minimize(aut)) == Z1_DOT

    def test_one_state_dot(self):
        assert export_dot(one_state_automaton()) == ONE_STATE_DOT

    def test_fail_state_shown_on_request(self, z1_automaton):
        _, aut = z1_automaton
        text = export_dot(minimize(aut), include_fail=True)
        assert '3 [shape=circle, label="fail"];' in text
        assert '1 -> 3 [label="A"];' in text

    def test_save_and_load(self, tmp_path, z1, z1_automaton):
        oracle, aut = z1_automaton
        path = tmp_path / "z1.json"
        save_automaton(aut, path)
        again = load_automaton(path, oracle)
        assert again.transitions == aut.transitions
        assert again.states == aut.states
        assert again.ball is not None
        assert load_automaton(path).ball is None

    def test_unknown_format(self, z1_automaton):
        _, aut = z1_automaton
        doc = automaton_to_document(aut)
        doc["version"] = 99
        with pytest.raises(ConfigError, match="Unsupported"):
            automaton_from_document(doc)


DOT_HEADER = [
    "digraph geodesic_automaton {",
    "    rankdir=LR;",
    "    node [shape=doublecircle];",
    "    start [shape=point];",
]
DOT_START = re.compile(r"^    start -> (\d+);$")
DOT_FAIL = re.compile(r'^    (\d+) \[shape=circle, label="fail"\];$')
DOT_EDGE = re.compile(r'^    (\d+) -> (\d+) \[label="([^",]+(?:,[^",]+)*)"\];$')


def parse_dot(text):
    """(start, fail or None, {(source, letter): target}) under the exported grammar."""
    lines = text.splitlines()
    assert lines[:4] == DOT_HEADER
    assert lines[-1] == "}"
    start = int(DOT_START.match(lines[4]).group(1))
    body = lines[5:-1]
    fail = None
    if body and DOT_FAIL.match(body[0]):
        fail = int(DOT_FAIL.match(body[0]).group(1))
        body = body[1:]
    edges = {}
    for line in body:
        match = DOT_EDGE.match(line)
        assert match, line
        source, target = int(match.group(1)), int(match.group(2))
        for name in match.group(3).split(","):
            assert (source, name) not in edges
            edges[(source, name)] = target
    return start, fail, edges


class TestDotGrammar:
    @pytest.mark.parametrize("include_fail", [False, True])
    def test_edges_match_transitions(self, z2_automaton, include_fail):
        _, aut = z2_automaton
        small = minimize(aut)
        start, fail, edges = parse_dot(export_dot(small, include_fail=include_fail))
        assert start == small.start
        assert fail == (small.fail if include_fail else None)
        expected = {
            (s, small.alphabet[a]): t
            for s in range(small.fail + 1 if include_fail else small.fail)
            for a, t in enumerate(small.transitions[s])
            if include_fail or t != small.fail
        }
        assert edges == expected

    def test_verified_groups_export_parses(self, verified_automaton):
        _, aut = verified_automaton
        small = minimize(aut)
        _, _, edges = parse_dot(export_dot(small))
        assert len(edges) == sum(1 for row in small.transitions[: small.fail] for t in row if t != small.fail)
