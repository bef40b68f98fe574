"""
Geodesic Growth Toolkit - Fellow Travel Module

Synchronous and asynchronous fellow-travel predicates between words, and
the falsification-by-fellow-traveller (FFT) sweep: every non-geodesic word
must be beaten by a strictly shorter word with the same value that stays
within delta of it.

Paths are sampled at letter boundaries; a letter of weight k advances
time by k. Distances are directed: d(u(i), v(j)) = ℓ(u(i)⁻¹ v(j)).
"""

import bisect
import heapq
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .config import PROCESSING
from .errors import AbsentInverseError, PreconditionError
from .groups import (
    CayleyOracle,
    GeneratingSet,
    GroupElement,
    GroupPresentation,
    Word,
    path_points,
)
from .utils import setup_logger

logger = setup_logger("fellow_travel")

# Corridor steps per task handed to a worker process
CHUNK_SIZE = 256


@dataclass
class Counterexample:
    word: Word
    text: str
    note: str


@dataclass
class FellowTravelReport:
    """Outcome of an FFT sweep. holds is True iff counterexample is None."""

    delta: int
    radius: int
    holds: bool = True
    counterexample: Optional[Counterexample] = None
    words_checked: int = 0
    classes_checked: int = 0
    falsified: int = 0
    checked_by_length: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "radius": self.radius,
            "holds": self.holds,
            "counterexample": None if self.counterexample is None else {
                "word": self.counterexample.text,
                "note": self.counterexample.note,
            },
            "words_checked": self.words_checked,
            "classes_checked": self.classes_checked,
            "falsified": self.falsified,
            "checked_by_length": {str(k): v for k, v in sorted(self.checked_by_length.items())},
        }


def _within(oracle: CayleyOracle, x, y, delta: int) -> bool:
    return oracle.distance(x, y, delta) is not None


def async_fellow_travel(u: Word, v: Word, delta: int, oracle: CayleyOracle) -> bool:
    """
    True iff some monotone staircase from (0, 0) to (|u|, |v|) keeps every
    visited pair (i, j) within directed distance delta, d(u(i), v(j)) <= delta.
    """
    if delta < 0:
        raise PreconditionError(f"delta must be >= 0, got {delta}")
    oracle.ensure(delta)
    pu = path_points(u, oracle.gens, oracle.pres)
    pv = path_points(v, oracle.gens, oracle.pres)

    reach = [False] * len(pv)
    for i, x in enumerate(pu):
        row = [False] * len(pv)
        for j, y in enumerate(pv):
            if i == 0 and j == 0:
                entered = True
            else:
                entered = (
                    (i > 0 and reach[j])
                    or (i > 0 and j > 0 and reach[j - 1])
                    or (j > 0 and row[j - 1])
                )
            row[j] = entered and _within(oracle, x, y, delta)
        reach = row
        if not any(reach):
            return False
    return reach[-1]


def _position(points, times, t):
    return points[bisect.bisect_right(times, t) - 1]


def _cumulative_times(word: Word, gens: GeneratingSet) -> list[int]:
    times = [0]
    for i in word:
        times.append(times[-1] + gens.weights[i])
    return times


def sync_fellow_travel(u: Word, v: Word, delta: int, oracle: CayleyOracle) -> bool:
    """
    True iff d(u(t), v(t)) <= delta at every integer time t up to the longer
    word's length; an exhausted path stays at its endpoint.
    """
    if delta < 0:
        raise PreconditionError(f"delta must be >= 0, got {delta}")
    oracle.ensure(delta)
    pu = path_points(u, oracle.gens, oracle.pres)
    pv = path_points(v, oracle.gens, oracle.pres)
    tu = _cumulative_times(u, oracle.gens)
    tv = _cumulative_times(v, oracle.gens)
    for t in range(max(tu[-1], tv[-1]) + 1):
        if not _within(oracle, _position(pu, tu, t), _position(pv, tv, t), delta):
            return False
    return True


def falsify(word: Word, delta: int, oracle: CayleyOracle) -> Optional[Word]:
    """
    Find a strictly shorter word with the same value that asynchronously
    delta-fellow-travels word.

    Candidates are searched by increasing length and lexicographically
    within a length, so the answer is deterministic. A candidate prefix is
    abandoned as soon as no point of the input path is within delta of it
    along a monotone staircase, or it can no longer reach the target in
    the remaining length.

    Raises:
        PreconditionError: if word is geodesic
    """
    gens = oracle.gens
    n = gens.word_length(word)
    oracle.ensure(max(n, delta))
    target = oracle.evaluate(word)
    best = oracle.length(target)
    if best == n:
        raise PreconditionError(f"{gens.format_word(word)} is geodesic; nothing to falsify")

    points = path_points(word, gens, oracle.pres)
    last = len(points) - 1
    weights = gens.weights

    def corridor(x, reach):
        ok = set()
        for j, p in enumerate(points):
            if reach is None:
                entered = j == 0 or (j - 1) in ok
            else:
                entered = j in reach or (j - 1) in reach or (j - 1) in ok
            if entered and _within(oracle, p, x, delta):
                ok.add(j)
        return frozenset(ok)

    def search(x, spent, reach, length, prefix, dead):
        if spent == length:
            return x == target and last in reach
        key = (x, spent, reach)
        if key in dead:
            return False
        for i, w in enumerate(weights):
            remaining = length - spent - w
            if remaining < 0:
                continue
            y = oracle.times(x, i)
            if oracle.distance(y, target, remaining) is None:
                continue
            step = corridor(y, reach)
            if not step:
                continue
            prefix.append(i)
            if search(y, spent + w, step, length, prefix, dead):
                return True
            prefix.pop()
        dead.add(key)
        return False

    start = corridor(oracle.pres.identity, None)
    for length in range(best, n):
        prefix = []
        if search(oracle.pres.identity, 0, start, length, prefix, set()):
            return tuple(prefix)
    return None


class Corridor:
    """
    Where a shadowing word can sit while a word u is traced letter by letter.

    A configuration (h, d) places the shadow at u(i)·h with ℓ(h) <= delta,
    having spent d more weight than u. A state maps each h to its least d,
    closed under shadow-only moves, stored as a sorted tuple so it can key
    a dict. Two geodesic prefixes with the same value and the same state
    are interchangeable for every extension.

    Configurations with d >= slack are dropped: past that surplus the
    shadow cannot end shorter than any minimal non-geodesic extension of a
    geodesic prefix, since the rest of u loses at most one letter plus the
    asymmetry constant k.
    """

    def __init__(self, delta: int, oracle: CayleyOracle, members: Optional[list[GroupElement]] = None):
        if delta < 0:
            raise PreconditionError(f"delta must be >= 0, got {delta}")
        oracle.ensure(delta)
        pres, gens = oracle.pres, oracle.gens
        if members is None:
            entries = oracle.table.entries
            members = sorted((g for g, n in entries.items() if n <= delta), key=lambda g: (entries[g], g.sort_key()))
        self.delta = delta
        self.members = members
        self.index = {g: i for i, g in enumerate(members)}
        self.identity = self.index[pres.identity]
        self.weights = gens.weights
        self._pres = pres
        self._values = gens.values
        self._inverses = [pres.inverse(value) for value in gens.values]
        self._right = [[self.index.get(pres.multiply(h, value)) for value in gens.values] for h in members]
        self._moves = {}
        try:
            k = oracle.asym_constant(max(oracle.radius, gens.max_weight))
            self.slack = delta + gens.max_weight + k
        except AbsentInverseError:
            self.slack = None

    def __len__(self) -> int:
        return len(self.members)

    def _keeps(self, d: int) -> bool:
        return self.slack is None or d < self.slack

    def close(self, seed: dict[int, int]) -> tuple[tuple[int, int], ...]:
        best = dict(seed)
        heap = [(d, h) for h, d in best.items()]
        heapq.heapify(heap)
        while heap:
            d, h = heapq.heappop(heap)
            if d > best[h]:
                continue
            for b, target in enumerate(self._right[h]):
                if target is None:
                    continue
                nd = d + self.weights[b]
                if self._keeps(nd) and nd < best.get(target, nd + 1):
                    best[target] = nd
                    heapq.heappush(heap, (nd, target))
        return tuple(sorted(best.items()))

    def start(self) -> tuple[tuple[int, int], ...]:
        return self.close({self.identity: 0})

    def _letter_moves(self, a: int, h: int):
        """u-only move and diagonal moves (target, shadow weight) for letter a at h."""
        key = (a, h)
        moves = self._moves.get(key)
        if moves is None:
            left = self._pres.multiply(self._inverses[a], self.members[h])
            diagonal = []
            for b, value in enumerate(self._values):
                target = self.index.get(self._pres.multiply(left, value))
                if target is not None:
                    diagonal.append((target, self.weights[b]))
            moves = (self.index.get(left), diagonal)
            self._moves[key] = moves
        return moves

    def step(self, state: tuple[tuple[int, int], ...], a: int) -> tuple[tuple[int, int], ...]:
        """Advance the traced word by letter a."""
        wa = self.weights[a]
        seed: dict[int, int] = {}
        for h, d in state:
            own, diagonal = self._letter_moves(a, h)
            candidates = [] if own is None else [(own, d - wa)]
            candidates.extend((target, d - wa + wb) for target, wb in diagonal)
            for target, nd in candidates:
                if self._keeps(nd) and nd < seed.get(target, nd + 1):
                    seed[target] = nd
        return self.close(seed)

    def shadowed(self, state: tuple[tuple[int, int], ...]) -> bool:
        """True iff some shadow ends on u's endpoint having spent less weight."""
        for h, d in state:
            if h == self.identity:
                return d < 0
        return False


@dataclass
class _PrefixClass:
    """Geodesic prefixes sharing a value and a corridor state."""

    word: Word  # shortlex-least member
    count: int
    element: GroupElement
    state: tuple


_WORKER_CORRIDOR = None


def _init_worker(gens: GeneratingSet, pres: GroupPresentation, radius: int, cap: int, delta: int, members: list):
    global _WORKER_CORRIDOR
    _WORKER_CORRIDOR = Corridor(delta, CayleyOracle(gens, pres, radius, cap), members)


def _step_chunk(pairs: list[tuple[tuple, int]]) -> list[tuple]:
    """
    Advance a batch of (state, letter) pairs in a worker process.

    This function is designed to run in a separate process via ProcessPoolExecutor.
    """
    return [_WORKER_CORRIDOR.step(state, a) for state, a in pairs]


def _advance(corridor: Corridor, executor, pairs: list[tuple[tuple, int]], memo: dict):
    pending = [pair for pair in dict.fromkeys(pairs) if pair not in memo]
    if executor is None or len(pending) <= CHUNK_SIZE:
        for state, a in pending:
            memo[(state, a)] = corridor.step(state, a)
        return

    chunks = [pending[i:i + CHUNK_SIZE] for i in range(0, len(pending), CHUNK_SIZE)]
    futures = {executor.submit(_step_chunk, chunk): index for index, chunk in enumerate(chunks)}
    for future in as_completed(futures):
        chunk = chunks[futures[future]]
        for pair, state in zip(chunk, future.result()):
            memo[pair] = state


def verify_fft(
    delta: int,
    radius: int,
    oracle: CayleyOracle,
    workers: Optional[int] = None,
) -> FellowTravelReport:
    """
    Check FFT at delta for every non-geodesic word of length <= radius.

    Only minimal non-geodesic words (geodesic prefix plus one letter) are
    tested: if a minimal word is falsified by v, any extension u·s is
    falsified by v·s along the same staircase. Geodesic prefixes are swept
    by length as classes of equal (value, corridor state), so each class
    is stepped once whatever the number of words in it. The reported
    counterexample is the shortlex-least failing word, the same word
    falsify() rejects first when words are taken one at a time.

    Args:
        delta: Fellow-travel constant
        radius: Maximal word length swept
        oracle: Shared Cayley oracle
        workers: Worker processes for corridor steps (defaults to PROCESSING["WORKERS"])
    """
    if radius < 1:
        raise PreconditionError(f"radius must be >= 1, got {radius}")
    workers = workers or PROCESSING["WORKERS"]
    gens = oracle.gens
    oracle.ensure(max(radius, delta))
    corridor = Corridor(delta, oracle)
    report = FellowTravelReport(delta=delta, radius=radius)
    identity = oracle.pres.identity
    start = corridor.start()
    layers = {0: {(identity, start): _PrefixClass((), 1, identity, start)}}
    memo: dict = {}

    executor = None
    if workers > 1:
        executor = ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(gens, oracle.pres, oracle.radius, oracle.cap, delta, corridor.members),
        )

    try:
        for n in range(1, radius + 1):
            sources = [(i, list(layers.get(n - w, {}).values())) for i, w in enumerate(gens.weights)]
            _advance(corridor, executor, [(c.state, i) for i, classes in sources for c in classes], memo)

            layer: dict = {}
            checked = failed = 0
            worst: Optional[Word] = None
            for i, classes in sources:
                for c in classes:
                    g = oracle.times(c.element, i)
                    state = memo[(c.state, i)]
                    word = c.word + (i,)
                    if oracle.length(g) == n:
                        known = layer.get((g, state))
                        if known is None:
                            layer[(g, state)] = _PrefixClass(word, c.count, g, state)
                        else:
                            known.count += c.count
                            known.word = min(known.word, word)
                        continue
                    checked += c.count
                    report.classes_checked += 1
                    if not corridor.shadowed(state):
                        failed += c.count
                        worst = word if worst is None else min(worst, word)

            layers[n] = layer
            layers.pop(n - gens.max_weight, None)
            report.words_checked += checked
            report.falsified += checked - failed
            if checked:
                report.checked_by_length[n] = checked
            logger.debug(
                f"delta={delta} length {n}: {len(layer)} prefix classes, {checked} minimal non-geodesic words, "
                f"{failed} unfalsified, {len(memo)} corridor steps cached"
            )
            if worst is None:
                continue

            report.holds = False
            report.counterexample = Counterexample(
                word=worst,
                text=gens.format_word(worst),
                note=(
                    f"length {n}, geodesic length {oracle.length(oracle.evaluate(worst))}; "
                    f"no shorter word with the same value {delta}-fellow-travels it"
                ),
            )
            break
    finally:
        if executor is not None:
            executor.shutdown()

    if report.holds:
        logger.info(
            f"FFT holds at delta={delta} up to radius {radius} "
            f"({report.words_checked} minimal non-geodesic words in {report.classes_checked} classes)"
        )
    else:
        logger.info(f"FFT fails at delta={delta}: {report.counterexample.text}")
    return report


def scan_fft(
    radius: int,
    deltas: Iterable[int],
    oracle: CayleyOracle,
    workers: Optional[int] = None,
) -> list[FellowTravelReport]:
    """Run verify_fft for increasing deltas, stopping at the first that holds."""
    reports = []
    for delta in deltas:
        report = verify_fft(delta, radius, oracle, workers)
        reports.append(report)
        if report.holds:
            break
    return reports


def min_fft_delta(
    radius: int,
    delta_max: int,
    oracle: CayleyOracle,
    workers: Optional[int] = None,
) -> Optional[int]:
    """Least delta in 0..delta_max for which verify_fft holds, else None."""
    if delta_max < 0:
        raise PreconditionError(f"delta_max must be >= 0, got {delta_max}")
    reports = scan_fft(radius, range(delta_max + 1), oracle, workers)
    if reports and reports[-1].holds:
        return reports[-1].delta
    return None
