"""
Geodesic Growth Toolkit - Geodesic Automaton Module

Builds the finite state acceptor of geodesic words from the profile
construction: after reading a geodesic word w ending at g, the state
records for each x in the ball B(delta) an estimate of ℓ(g·x) − len(w).
Reading a letter shifts the profile; the word is rejected as soon as the
estimate at the identity drops below zero.

B(delta) is the ball of the undirected word metric. Profile values are
clamped to [-delta, k·delta].
"""

import heapq
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import LIMITS
from .errors import ConfigError, PreconditionError, ResourceCapError
from .groups import CayleyOracle, GroupElement, Word, undirected_ball
from .utils import setup_logger

logger = setup_logger("geodesic_fsa")

AUTOMATON_FORMAT = "geodesic-automaton"
AUTOMATON_VERSION = 1


@dataclass(frozen=True)
class ProfileState:
    """Profile values indexed by the fixed element order of B(delta)."""

    table: tuple[int, ...]


class DeltaBall:
    """
    B(delta) with every letter move precomputed.

    elements are ordered by undirected distance, then element sort key, so
    index 0 is the identity.
    """

    def __init__(self, oracle: CayleyOracle, delta: int, k: Optional[int] = None):
        if delta < 0:
            raise PreconditionError(f"delta must be >= 0, got {delta}")
        gens, pres = oracle.gens, oracle.pres
        self.delta = delta
        self.k = oracle.asym_constant(max(2 * gens.max_weight, 16)) if k is None else k
        self.bound = self.k * delta

        und = undirected_ball(gens, pres, delta, oracle.cap)
        self.elements: list[GroupElement] = sorted(
            und.entries, key=lambda g: (und.entries[g], g.sort_key())
        )
        self.index = {g: i for i, g in enumerate(self.elements)}

        oracle.ensure(max(self.bound, delta))
        self.ell = [oracle.length(g) for g in self.elements]
        if any(n is None for n in self.ell):
            raise ResourceCapError(f"Some element of B({delta}) is longer than k*delta={self.bound}")

        values = gens.values
        weights = gens.weights
        inverses = [pres.inverse(v) for v in values]
        size = len(self.elements)

        # shift[a][x]: index of ā·x, or -1 when it leaves the ball
        self.shift: list[list[int]] = []
        # preds[a][x]: (y, w(b)) with y·b̄ = ā·x, only where shift is -1
        self.preds: list[list[list[tuple[int, int]]]] = []
        for a, value in enumerate(values):
            shift_row, pred_row = [], []
            for x in self.elements:
                moved = pres.multiply(value, x)
                s = self.index.get(moved, -1)
                shift_row.append(s)
                preds = []
                if s < 0:
                    for b, inv in enumerate(inverses):
                        y = self.index.get(pres.multiply(moved, inv))
                        if y is not None:
                            preds.append((y, weights[b]))
                pred_row.append(preds)
            self.shift.append(shift_row)
            self.preds.append(pred_row)

        # out_edges[x]: (z, w(b)) with z = x·b̄ inside the ball
        self.out_edges: list[list[tuple[int, int]]] = [[] for _ in range(size)]
        for x, g in enumerate(self.elements):
            for b, value in enumerate(values):
                z = self.index.get(pres.multiply(g, value))
                if z is not None:
                    self.out_edges[x].append((z, weights[b]))

        # Candidate last edges into the current endpoint: h = b̄⁻¹
        self.parent_edges: list[tuple[Optional[int], int]] = [
            (self.index.get(inv), weights[b]) for b, inv in enumerate(inverses)
        ]

    def __len__(self) -> int:
        return len(self.elements)

    def start_state(self) -> ProfileState:
        return ProfileState(tuple(min(n, self.bound) for n in self.ell))

    def step(self, state: ProfileState, a: int, weight: int) -> Optional[ProfileState]:
        """
        Profile after reading letter a, or None for the fail state.

        psi(x) = phi(ā·x) − w(a) when ā·x is in the ball; otherwise the least
        phi(y) + w(b) − w(a) over in-ball y with y·b̄ = ā·x (k·delta if there
        is none). Values are capped by ℓ(x) and relaxed along in-ball edges
        before the identity test and clamping.
        """
        phi = state.table
        shift = self.shift[a]
        preds = self.preds[a]
        psi = []
        for x, s in enumerate(shift):
            if s >= 0:
                value = phi[s] - weight
            elif preds[x]:
                value = min(phi[y] + wb for y, wb in preds[x]) - weight
            else:
                value = self.bound
            psi.append(min(value, self.ell[x]))

        heap = [(v, x) for x, v in enumerate(psi)]
        heapq.heapify(heap)
        while heap:
            v, x = heapq.heappop(heap)
            if v > psi[x]:
                continue
            for z, w in self.out_edges[x]:
                if v + w < psi[z]:
                    psi[z] = v + w
                    heapq.heappush(heap, (v + w, z))

        if psi[0] != 0:
            return None
        lo, hi = -self.delta, self.bound
        return ProfileState(tuple(lo if v < lo else hi if v > hi else v for v in psi))

    def to_json(self) -> list:
        return [g.to_json() for g in self.elements]


@dataclass
class GeodesicAutomaton:
    """
    Complete deterministic automaton over the letters of a generating set.

    transitions has one row per state plus a final row for the fail sink;
    every state other than fail is accepting.
    """

    delta: int
    k: int
    alphabet: tuple[str, ...]
    weights: tuple[int, ...]
    states: list[ProfileState]
    start: int
    transitions: list[list[int]]
    ball: Optional[DeltaBall] = field(default=None, repr=False)

    @property
    def fail(self) -> int:
        return len(self.states)

    @property
    def live_count(self) -> int:
        return len(self.states)

    def run(self, word: Word) -> int:
        s = self.start
        for i in word:
            s = self.transitions[s][i]
            if s == self.fail:
                break
        return s

    def stats(self) -> dict:
        edges = sum(1 for row in self.transitions[: self.fail] for t in row if t != self.fail)
        return {
            "delta": self.delta,
            "k": self.k,
            "states": self.live_count,
            "live_transitions": edges,
            "alphabet": list(self.alphabet),
        }


def build(delta: int, oracle: CayleyOracle, state_cap: Optional[int] = None) -> GeodesicAutomaton:
    """
    Reachable-state closure of the profile step from the start profile.

    States with equal tables are identified. Accepted non-geodesic words
    can only exist if FFT fails at delta.

    Raises:
        ResourceCapError: more than state_cap live states
    """
    state_cap = state_cap or LIMITS["STATE_CAP"]
    gens = oracle.gens
    ball = DeltaBall(oracle, delta)
    if delta < ball.k:
        logger.warning(f"delta={delta} is below k={ball.k}; parent counts will be unavailable")
    logger.info(f"Building automaton: delta={delta}, k={ball.k}, |B(delta)|={len(ball)}")

    start = ball.start_state()
    states = [start]
    index = {start: 0}
    rows = []
    i = 0
    while i < len(states):
        row = []
        for a, weight in enumerate(gens.weights):
            nxt = ball.step(states[i], a, weight)
            if nxt is None:
                row.append(-1)
                continue
            j = index.get(nxt)
            if j is None:
                j = len(states)
                if j >= state_cap:
                    raise ResourceCapError(f"Automaton exceeds state cap of {state_cap}")
                index[nxt] = j
                states.append(nxt)
            row.append(j)
        rows.append(row)
        i += 1
        if i % 10000 == 0:
            logger.debug(f"Explored {i} states, {len(states)} discovered")

    fail = len(states)
    transitions = [[fail if t < 0 else t for t in row] for row in rows]
    transitions.append([fail] * len(gens))
    logger.info(f"Automaton built: {len(states)} live states")
    return GeodesicAutomaton(
        delta=delta,
        k=ball.k,
        alphabet=gens.names,
        weights=gens.weights,
        states=states,
        start=0,
        transitions=transitions,
        ball=ball,
    )


def accepts(aut: GeodesicAutomaton, word: Word) -> bool:
    """True iff running word from the start never reaches fail."""
    return aut.run(word) != aut.fail


def minimize(aut: GeodesicAutomaton, labels: Optional[list] = None) -> GeodesicAutomaton:
    """
    Moore partition refinement, renumbered breadth-first from the start.

    Args:
        aut: Complete deterministic automaton
        labels: Optional colour per live state; states with different
            colours are never merged

    Returns:
        Minimal equivalent automaton; each class keeps the profile of its
        lowest-numbered member; fail is the last state
    """
    fail = aut.fail
    n = fail + 1
    if labels is not None and len(labels) != fail:
        raise PreconditionError(f"Expected {fail} labels, got {len(labels)}")

    def renumber(keys):
        ids = {}
        return [ids.setdefault(key, len(ids)) for key in keys], len(ids)

    block, count = renumber(
        ("fail",) if s == fail else ("live", None if labels is None else labels[s]) for s in range(n)
    )
    while True:
        refined, new_count = renumber(
            (block[s], tuple(block[t] for t in aut.transitions[s])) for s in range(n)
        )
        block = refined
        if new_count == count:
            break
        count = new_count

    fail_block = block[fail]
    order = {block[aut.start]: 0}
    queue = [block[aut.start]]
    members = {}
    for s in range(fail):
        members.setdefault(block[s], s)
    while queue:
        b = queue.pop(0)
        rep = members[b]
        for t in aut.transitions[rep]:
            tb = block[t]
            if tb != fail_block and tb not in order:
                order[tb] = len(order)
                queue.append(tb)

    new_fail = len(order)
    reps = sorted(order, key=order.get)
    transitions = []
    for b in reps:
        row = []
        for t in aut.transitions[members[b]]:
            tb = block[t]
            row.append(new_fail if tb == fail_block else order[tb])
        transitions.append(row)
    transitions.append([new_fail] * len(aut.alphabet))

    result = GeodesicAutomaton(
        delta=aut.delta,
        k=aut.k,
        alphabet=aut.alphabet,
        weights=aut.weights,
        states=[aut.states[members[b]] for b in reps],
        start=0,
        transitions=transitions,
        ball=aut.ball,
    )
    logger.debug(f"Minimized {aut.live_count} live states to {result.live_count}")
    return result


def equivalent(first: GeodesicAutomaton, second: GeodesicAutomaton) -> Optional[Word]:
    """
    Shortlex-least word (by letter count) accepted by exactly one automaton,
    or None when the languages agree.
    """
    if first.alphabet != second.alphabet:
        raise PreconditionError("Automata are over different alphabets")
    start = (first.start, second.start)
    seen = {start}
    queue = [(start, ())]
    head = 0
    while head < len(queue):
        (p, q), word = queue[head]
        head += 1
        if (p == first.fail) != (q == second.fail):
            return word
        if p == first.fail:
            continue
        for a in range(len(first.alphabet)):
            pair = (first.transitions[p][a], second.transitions[q][a])
            if pair not in seen:
                seen.add(pair)
                queue.append((pair, word + (a,)))
    return None


@dataclass
class Disagreement:
    word: Word
    text: str
    automaton_accepts: bool
    oracle_geodesic: bool


@dataclass
class ValidationReport:
    radius: int
    agree: bool
    disagreement: Optional[Disagreement] = None
    words_checked: int = 0

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "agree": self.agree,
            "disagreement": None if self.disagreement is None else {
                "word": self.disagreement.text,
                "automaton_accepts": self.disagreement.automaton_accepts,
                "oracle_geodesic": self.disagreement.oracle_geodesic,
            },
            "words_checked": self.words_checked,
        }


def cross_validate(aut: GeodesicAutomaton, radius: int, oracle: CayleyOracle) -> ValidationReport:
    """
    Compare accepts(w) with the oracle's geodesity for every word of length
    <= radius, in shortlex order.

    Words are extended only while both sides say geodesic: once both
    reject a prefix they reject every extension.
    """
    gens = oracle.gens
    if tuple(gens.names) != tuple(aut.alphabet):
        raise PreconditionError("Automaton alphabet does not match the oracle's generating set")
    oracle.ensure(radius)

    layers = {0: [((), oracle.pres.identity, aut.start)]}
    checked = 1
    for n in range(1, radius + 1):
        layer = []
        bad = []
        for i, weight in enumerate(gens.weights):
            for word, g, s in layers.get(n - weight, ()):
                h = oracle.times(g, i)
                t = aut.transitions[s][i]
                geodesic = oracle.length(h) == n
                accepted = t != aut.fail
                checked += 1
                if geodesic and accepted:
                    layer.append((word + (i,), h, t))
                elif geodesic != accepted:
                    bad.append((word + (i,), accepted, geodesic))
        if bad:
            word, accepted, geodesic = min(bad)
            logger.info(f"Automaton disagrees with oracle on {gens.format_word(word)} (length {n})")
            return ValidationReport(
                radius=radius,
                agree=False,
                disagreement=Disagreement(word, gens.format_word(word), accepted, geodesic),
                words_checked=checked,
            )
        layer.sort(key=lambda item: item[0])
        layers[n] = layer

    logger.info(f"Automaton agrees with oracle on all {checked} words checked up to radius {radius}")
    return ValidationReport(radius=radius, agree=True, words_checked=checked)


def export_dot(aut: GeodesicAutomaton, include_fail: bool = False) -> str:
    """Graphviz text; parallel letters between two states share one edge."""
    lines = [
        "digraph geodesic_automaton {",
        "    rankdir=LR;",
        "    node [shape=doublecircle];",
        "    start [shape=point];",
        f"    start -> {aut.start};",
    ]
    if include_fail:
        lines.append(f'    {aut.fail} [shape=circle, label="fail"];')
    last = aut.fail + 1 if include_fail else aut.fail
    for s in range(last):
        grouped = {}
        for a, t in enumerate(aut.transitions[s]):
            if t == aut.fail and not include_fail:
                continue
            grouped.setdefault(t, []).append(aut.alphabet[a])
        for t, names in grouped.items():
            label = ",".join(names)
            lines.append(f'    {s} -> {t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_to_document(aut: GeodesicAutomaton) -> dict:
    return {
        "format": AUTOMATON_FORMAT,
        "version": AUTOMATON_VERSION,
        "delta": aut.delta,
        "k": aut.k,
        "alphabet": list(aut.alphabet),
        "weights": list(aut.weights),
        "start": aut.start,
        "fail": aut.fail,
        "states": [list(state.table) for state in aut.states],
        "transitions": [list(row) for row in aut.transitions],
        "ball": aut.ball.to_json() if aut.ball is not None else None,
    }


def automaton_from_document(doc: dict, oracle: Optional[CayleyOracle] = None) -> GeodesicAutomaton:
    """
    Rebuild an automaton from its JSON document.

    With an oracle the ball is recomputed (needed for parent counts) and
    checked against the stored element order.
    """
    if doc.get("format") != AUTOMATON_FORMAT or doc.get("version") != AUTOMATON_VERSION:
        raise ConfigError(
            f"Unsupported automaton document: format={doc.get('format')!r} version={doc.get('version')!r}"
        )
    states = [ProfileState(tuple(int(v) for v in table)) for table in doc["states"]]
    transitions = [[int(t) for t in row] for row in doc["transitions"]]
    if len(transitions) != len(states) + 1 or int(doc["fail"]) != len(states):
        raise ConfigError("Automaton document has inconsistent state and transition counts")

    ball = None
    if oracle is not None:
        if list(oracle.gens.names) != list(doc["alphabet"]):
            raise ConfigError("Automaton alphabet does not match the generating set")
        ball = DeltaBall(oracle, int(doc["delta"]), k=int(doc["k"]))
        if doc.get("ball") is not None and ball.to_json() != doc["ball"]:
            raise ConfigError("Stored ball does not match the recomputed B(delta)")

    return GeodesicAutomaton(
        delta=int(doc["delta"]),
        k=int(doc["k"]),
        alphabet=tuple(doc["alphabet"]),
        weights=tuple(int(w) for w in doc["weights"]),
        states=states,
        start=int(doc["start"]),
        transitions=transitions,
        ball=ball,
    )


def save_automaton(aut: GeodesicAutomaton, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(automaton_to_document(aut), f, sort_keys=True)
    logger.info(f"Saved automaton ({aut.live_count} states) to {path}")


def load_automaton(path: Path, oracle: Optional[CayleyOracle] = None) -> GeodesicAutomaton:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read automaton file {path}: {e}") from e
    return automaton_from_document(doc, oracle)
