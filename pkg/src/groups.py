"""
Geodesic Growth Toolkit - Group Core

Exact group arithmetic for virtually abelian groups (Z^m extended by a
finite group F acting through integer matrices) and for integer matrix
groups, plus the brute-force Cayley-graph oracles that every other module
validates against.

All arithmetic is on Python integers; there is no floating point here.
"""

import heapq
import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Optional, Union

from sympy import Matrix

from .config import LIMITS
from .errors import (
    AbsentInverseError,
    GroupDefinitionError,
    PreconditionError,
    ResourceCapError,
)
from .utils import setup_logger

logger = setup_logger("groups")

KIND_VA = "virtually-abelian"
KIND_MATRIX = "matrix"

# A word is a tuple of letter indices into a GeneratingSet
Word = tuple[int, ...]

_POWER_TOKEN = re.compile(r"^(?P<name>[^\^]+)\^(?P<exp>\d+)$")


@dataclass(frozen=True)
class VAElement:
    """Element (v, f) of Z^m extended by F: translation vector and F-index."""

    vector: tuple[int, ...]
    f: int = 0

    def sort_key(self) -> tuple:
        return (self.f, self.vector)

    def to_json(self) -> dict:
        return {"vector": list(self.vector), "f": self.f}


@dataclass(frozen=True)
class MatElement:
    """Square integer matrix, identified with its negative when projective."""

    entries: tuple[tuple[int, ...], ...]
    projective: bool = False

    @classmethod
    def create(cls, entries, projective: bool = False) -> "MatElement":
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if projective:
            first = next((x for row in rows for x in row if x != 0), 0)
            if first < 0:
                rows = tuple(tuple(-x for x in row) for row in rows)
        return cls(rows, projective)

    def sort_key(self) -> tuple:
        return self.entries

    def to_json(self) -> dict:
        return {"matrix": [list(row) for row in self.entries]}


GroupElement = Union[VAElement, MatElement]


def _matmul(a, b):
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in zip(*b))
        for row in a
    )


def _matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


@lru_cache(maxsize=None)
def _unimodular_inverse(entries: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    m = Matrix(entries)
    det = m.det()
    if det not in (1, -1):
        raise GroupDefinitionError(f"Matrix {entries} is not invertible over the integers (det={det})")
    inv = m.adjugate() * det
    return tuple(tuple(int(inv[i, j]) for j in range(m.cols)) for i in range(m.rows))


def _identity_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class GroupPresentation:
    """
    Arithmetic data for a computable group.

    virtually-abelian: rank m, the F-action as m x m integer matrices and
    the multiplication table of F (index 0 is the identity). Elements are
    VAElement and multiply as (v, f)(w, g) = (v + f.w, fg).

    matrix: square integer matrices of the given dimension, optionally
    projective (M identified with -M).
    """

    kind: str
    rank: int = 0
    f_action: tuple = ()
    f_table: tuple = ((0,),)
    dimension: int = 0
    projective: bool = False

    @classmethod
    def free_abelian(cls, rank: int) -> "GroupPresentation":
        return cls(KIND_VA, rank=rank, f_action=(_identity_matrix(rank),), f_table=((0,),))

    @classmethod
    def matrix_group(cls, dimension: int, projective: bool = False) -> "GroupPresentation":
        return cls(KIND_MATRIX, dimension=dimension, projective=projective)

    @property
    def f_order(self) -> int:
        return len(self.f_table) if self.kind == KIND_VA else 1

    @cached_property
    def identity(self) -> GroupElement:
        if self.kind == KIND_VA:
            return VAElement((0,) * self.rank, 0)
        return MatElement.create(_identity_matrix(self.dimension), self.projective)

    @cached_property
    def _f_inverses(self) -> tuple[int, ...]:
        return tuple(row.index(0) for row in self.f_table)

    def f_inverse(self, f: int) -> int:
        return self._f_inverses[f]

    def act(self, f: int, vector: tuple[int, ...]) -> tuple[int, ...]:
        """Apply the F-action of f to a translation vector."""
        return _matvec(self.f_action[f], vector)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if self.kind == KIND_VA:
            moved = _matvec(self.f_action[g.f], h.vector)
            return VAElement(
                tuple(x + y for x, y in zip(g.vector, moved)),
                self.f_table[g.f][h.f],
            )
        return MatElement.create(_matmul(g.entries, h.entries), self.projective)

    def inverse(self, g: GroupElement) -> GroupElement:
        if self.kind == KIND_VA:
            f_inv = self._f_inverses[g.f]
            moved = _matvec(self.f_action[f_inv], g.vector)
            return VAElement(tuple(-x for x in moved), f_inv)
        return MatElement.create(_unimodular_inverse(g.entries), self.projective)

    def is_translation(self, g: GroupElement) -> bool:
        """True iff g lies in the normal subgroup Z^m."""
        return self.kind == KIND_VA and g.f == 0

    def element_from_json(self, data: dict) -> GroupElement:
        if self.kind == KIND_VA:
            vector = tuple(int(x) for x in data["vector"])
            if len(vector) != self.rank:
                raise GroupDefinitionError(f"Vector {vector} does not have rank {self.rank}")
            f = int(data.get("f", 0))
            if not 0 <= f < self.f_order:
                raise GroupDefinitionError(f"F-index {f} out of range 0..{self.f_order - 1}")
            return VAElement(vector, f)
        entries = data["matrix"]
        if len(entries) != self.dimension or any(len(row) != self.dimension for row in entries):
            raise GroupDefinitionError(f"Matrix {entries} is not {self.dimension}x{self.dimension}")
        return MatElement.create(entries, self.projective)

    def validate(self):
        """
        Check the presentation invariants.

        Raises:
            GroupDefinitionError: F-table is not a group, action matrices are
                not unimodular, or the action is not a homomorphism
        """
        if self.kind == KIND_MATRIX:
            if self.dimension < 1:
                raise GroupDefinitionError("Matrix groups need dimension >= 1")
            return
        if self.kind != KIND_VA:
            raise GroupDefinitionError(f"Unknown group kind {self.kind!r}")

        n = len(self.f_table)
        if n == 0 or len(self.f_action) != n:
            raise GroupDefinitionError(
                f"f_action has {len(self.f_action)} matrices but f_table has {n} rows"
            )
        elements = list(range(n))
        for f, row in enumerate(self.f_table):
            if sorted(row) != elements:
                raise GroupDefinitionError(f"f_table row {f} is not a permutation of 0..{n - 1}")
            if row[0] != f or self.f_table[0][f] != f:
                raise GroupDefinitionError("Index 0 of f_table must be the identity")
        for f, g, h in itertools.product(elements, repeat=3):
            table = self.f_table
            if table[table[f][g]][h] != table[f][table[g][h]]:
                raise GroupDefinitionError(f"f_table is not associative at ({f}, {g}, {h})")

        for f, mat in enumerate(self.f_action):
            if len(mat) != self.rank or any(len(row) != self.rank for row in mat):
                raise GroupDefinitionError(f"F-action matrix {f} is not {self.rank}x{self.rank}")
            if self.rank:
                _unimodular_inverse(mat)
        if self.rank and self.f_action[0] != _identity_matrix(self.rank):
            raise GroupDefinitionError("F-action of the identity must be the identity matrix")
        for f, g in itertools.product(elements, repeat=2):
            if self.rank and _matmul(self.f_action[f], self.f_action[g]) != self.f_action[self.f_table[f][g]]:
                raise GroupDefinitionError(f"F-action is not a homomorphism at ({f}, {g})")


@dataclass(frozen=True)
class Letter:
    """A named generator with its group value and positive integer weight."""

    name: str
    value: GroupElement
    weight: int = 1


@dataclass(frozen=True)
class GeneratingSet:
    """
    Ordered weighted monoid generating set.

    Letter order fixes the alphabet order used by every lexicographic
    search in the toolkit.
    """

    letters: tuple[Letter, ...]
    inverse_closed: bool = False

    def __post_init__(self):
        if not self.letters:
            raise GroupDefinitionError("A generating set needs at least one letter")
        names = [letter.name for letter in self.letters]
        if len(set(names)) != len(names):
            raise GroupDefinitionError(f"Letter names must be distinct: {names}")
        for letter in self.letters:
            if letter.weight < 1:
                raise GroupDefinitionError(f"Letter {letter.name} has non-positive weight {letter.weight}")
            if not letter.name or any(ch.isspace() for ch in letter.name) or "^" in letter.name:
                raise GroupDefinitionError(f"Letter name {letter.name!r} cannot be used in words")

    def __len__(self) -> int:
        return len(self.letters)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(letter.name for letter in self.letters)

    @cached_property
    def values(self) -> tuple[GroupElement, ...]:
        return tuple(letter.value for letter in self.letters)

    @cached_property
    def weights(self) -> tuple[int, ...]:
        return tuple(letter.weight for letter in self.letters)

    @property
    def max_weight(self) -> int:
        return max(self.weights)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GroupDefinitionError(f"Unknown letter {name!r}; alphabet is {list(self.names)}") from None

    def parse_word(self, text: str) -> Word:
        """
        Parse a whitespace separated word; "c^3" repeats a letter.

        Example:
            gens.parse_word("t c^3 t c^2")
        """
        word = []
        for token in text.split():
            match = _POWER_TOKEN.match(token)
            if match:
                word.extend([self.index_of(match["name"])] * int(match["exp"]))
            else:
                word.append(self.index_of(token))
        return tuple(word)

    def format_word(self, word: Word) -> str:
        return " ".join(self.names[i] for i in word) if word else "<empty>"

    def word_length(self, word: Word) -> int:
        weights = self.weights
        return sum(weights[i] for i in word)

    def check(self, pres: GroupPresentation):
        """
        Validate letter values against the presentation and the inverse claim.

        Raises:
            GroupDefinitionError: if inverse_closed is claimed but some
                letter's inverse is missing
        """
        if self.inverse_closed:
            values = set(self.values)
            for letter in self.letters:
                if pres.inverse(letter.value) not in values:
                    raise GroupDefinitionError(
                        f"inverse_closed claimed but the inverse of {letter.name} is not a letter value"
                    )

    def subset(self, indices) -> "GeneratingSet":
        letters = tuple(self.letters[i] for i in indices)
        return GeneratingSet(letters, inverse_closed=False)

    def translation_indices(self, pres: GroupPresentation) -> list[int]:
        """Indices of the letters evaluating into Z^m (the A_Z part)."""
        return [i for i, value in enumerate(self.values) if pres.is_translation(value)]


def evaluate(word: Word, gens: GeneratingSet, pres: GroupPresentation) -> GroupElement:
    """Canonical product of the letter values of word, left to right."""
    g = pres.identity
    values = gens.values
    for i in word:
        g = pres.multiply(g, values[i])
    return g


def path_points(word: Word, gens: GeneratingSet, pres: GroupPresentation) -> list[GroupElement]:
    """Vertices visited by word from the identity: [1, w(1), ..., w(n)]."""
    points = [pres.identity]
    values = gens.values
    for i in word:
        points.append(pres.multiply(points[-1], values[i]))
    return points


@dataclass
class LengthTable:
    """Exact geodesic lengths of every element with length <= radius."""

    radius: int
    entries: dict

    def __len__(self) -> int:
        return len(self.entries)

    def length(self, g: GroupElement) -> Optional[int]:
        return self.entries.get(g)

    def sphere_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for n in self.entries.values():
            sizes[n] += 1
        return sizes

    def restrict(self, radius: int) -> "LengthTable":
        if radius > self.radius:
            raise PreconditionError(f"Cannot restrict a radius-{self.radius} table to radius {radius}")
        return LengthTable(radius, {g: n for g, n in self.entries.items() if n <= radius})

    def elements_by_length(self) -> list[GroupElement]:
        return sorted(self.entries, key=lambda g: (self.entries[g], g.sort_key()))

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "entries": [[g.to_json(), n] for g, n in sorted(self.entries.items(), key=lambda kv: (kv[1], kv[0].sort_key()))],
        }

    @classmethod
    def from_json(cls, data: dict, pres: GroupPresentation) -> "LengthTable":
        entries = {pres.element_from_json(g): int(n) for g, n in data["entries"]}
        return cls(int(data["radius"]), entries)


def ball(
    gens: GeneratingSet,
    pres: GroupPresentation,
    radius: int,
    cap: Optional[int] = None,
    undirected: bool = False,
) -> LengthTable:
    """
    Weighted breadth-first ball of the Cayley graph.

    A letter of weight k advances length by k. With undirected=True each
    edge may also be walked backwards at the same weight, giving the ball
    of the undirected (symmetric) word metric.

    Args:
        gens: Generating set
        pres: Group arithmetic
        radius: Maximal length kept
        cap: Maximal number of entries (defaults to LIMITS["BALL_CAP"])
        undirected: Use the symmetric metric

    Returns:
        LengthTable with exactly the elements of length <= radius

    Raises:
        ResourceCapError: if the ball has more than cap entries
    """
    if radius < 0:
        raise PreconditionError(f"Ball radius must be >= 0, got {radius}")
    cap = cap or LIMITS["BALL_CAP"]

    steps = list(zip(gens.values, gens.weights))
    if undirected:
        steps += [(pres.inverse(value), weight) for value, weight in zip(gens.values, gens.weights)]

    identity = pres.identity
    done = {}
    best = {identity: 0}
    counter = itertools.count()
    heap = [(0, next(counter), identity)]

    while heap:
        dist, _, g = heapq.heappop(heap)
        if g in done:
            continue
        done[g] = dist
        if len(done) > cap:
            raise ResourceCapError(f"Ball of radius {radius} exceeds cap of {cap} entries")
        for value, weight in steps:
            nd = dist + weight
            if nd > radius:
                continue
            h = pres.multiply(g, value)
            if h in done:
                continue
            if nd < best.get(h, radius + 1):
                best[h] = nd
                heapq.heappush(heap, (nd, next(counter), h))

    return LengthTable(radius, done)


def undirected_ball(
    gens: GeneratingSet,
    pres: GroupPresentation,
    radius: int,
    cap: Optional[int] = None,
) -> LengthTable:
    """Ball of the symmetric word metric (edges walkable both ways)."""
    return ball(gens, pres, radius, cap, undirected=True)


def check_generation(
    gens: GeneratingSet,
    pres: GroupPresentation,
    infinite: bool,
    radius: Optional[int] = None,
) -> bool:
    """
    Bounded generation check.

    Generation itself is undecidable here; for a group known to be
    infinite we only warn when the outer spheres of the check ball are
    empty (the monoid generated by the letters is then finite).

    Returns:
        False if the check found evidence against generation
    """
    radius = radius or LIMITS["GENERATION_CHECK_RADIUS"]
    radius = max(radius, gens.max_weight)
    spheres = ball(gens, pres, radius).sphere_sizes()
    outer = spheres[-gens.max_weight:]
    if infinite and not any(outer):
        logger.warning(
            f"Spheres {radius - gens.max_weight + 1}..{radius} are empty although the group is infinite; "
            "the letters do not generate it as a monoid"
        )
        return False
    return True


class CayleyOracle:
    """
    Shared view of the directed Cayley graph.

    Holds one LengthTable that is regrown on demand. Every length,
    distance and geodesity query in the sweeps goes through here, so the
    table plays the role of the oracle context in every module.
    """

    def __init__(
        self,
        gens: GeneratingSet,
        pres: GroupPresentation,
        radius: int = 0,
        cap: Optional[int] = None,
        table: Optional[LengthTable] = None,
    ):
        self.gens = gens
        self.pres = pres
        self.cap = cap or LIMITS["BALL_CAP"]
        if table is not None and table.radius >= radius:
            self.table = table
        else:
            self.table = ball(gens, pres, radius, self.cap)

    @property
    def radius(self) -> int:
        return self.table.radius

    def ensure(self, radius: int):
        """Grow the table to at least the given radius."""
        if radius > self.table.radius:
            self.table = ball(self.gens, self.pres, radius, self.cap)
            logger.debug(f"Oracle ball regrown to radius {radius} ({len(self.table)} elements)")

    def length(self, g: GroupElement) -> Optional[int]:
        """ℓ(g) if it is within the current radius, else None."""
        return self.table.entries.get(g)

    def exact_length(self, g: GroupElement, cap: int) -> Optional[int]:
        self.ensure(cap)
        return self.table.entries.get(g)

    def distance(self, g: GroupElement, h: GroupElement, cap: int) -> Optional[int]:
        """Directed distance d(g, h) = ℓ(g⁻¹h) if it is <= cap, else None."""
        if cap > self.table.radius:
            self.ensure(cap)
        n = self.table.entries.get(self.pres.multiply(self.pres.inverse(g), h))
        if n is None or n > cap:
            return None
        return n

    def evaluate(self, word: Word) -> GroupElement:
        return evaluate(word, self.gens, self.pres)

    def word_length(self, word: Word) -> int:
        return self.gens.word_length(word)

    def is_geodesic(self, word: Word) -> bool:
        n = self.gens.word_length(word)
        self.ensure(n)
        return self.table.entries.get(self.evaluate(word)) == n

    def times(self, g: GroupElement, letter: int) -> GroupElement:
        return self.pres.multiply(g, self.gens.values[letter])

    def asym_constant(self, cap: int) -> int:
        """
        k = max ℓ(ā⁻¹) over letters, growing the table up to cap.

        Raises:
            AbsentInverseError: if some inverse is longer than cap
        """
        radius = min(max(self.radius, self.gens.max_weight), cap)
        while True:
            self.ensure(radius)
            lengths = [self.length(self.pres.inverse(value)) for value in self.gens.values]
            if all(n is not None for n in lengths):
                return max(lengths)
            if radius >= cap:
                missing = [self.gens.names[i] for i, n in enumerate(lengths) if n is None]
                raise AbsentInverseError(f"Inverses of {missing} have length > {cap}")
            radius = min(2 * radius, cap)


def _shared(oracle: Optional[CayleyOracle], gens: GeneratingSet, pres: GroupPresentation) -> CayleyOracle:
    if oracle is None:
        return CayleyOracle(gens, pres)
    if oracle.gens != gens or oracle.pres != pres:
        raise PreconditionError("Oracle was built over a different generating set or group")
    return oracle


def directed_distance(
    g: GroupElement,
    h: GroupElement,
    gens: GeneratingSet,
    pres: GroupPresentation,
    cap: int,
    oracle: Optional[CayleyOracle] = None,
) -> Optional[int]:
    """
    Directed word distance d(g, h), or None if it exceeds cap.

    Equals ℓ(g⁻¹h) by translation invariance. Pass oracle to reuse its
    ball across calls; it is grown to cap only when needed.
    """
    if cap < 0:
        raise PreconditionError(f"cap must be >= 0, got {cap}")
    return _shared(oracle, gens, pres).distance(g, h, cap)


def asym_constant(
    gens: GeneratingSet,
    pres: GroupPresentation,
    cap: int,
    oracle: Optional[CayleyOracle] = None,
) -> int:
    """
    k = max over letters a of ℓ(ā⁻¹).

    Raises:
        AbsentInverseError: if some inverse is not reached within cap
    """
    return _shared(oracle, gens, pres).asym_constant(cap)


def is_geodesic(
    word: Word,
    gens: GeneratingSet,
    pres: GroupPresentation,
    cap: Optional[int] = None,
    oracle: Optional[CayleyOracle] = None,
) -> bool:
    """True iff len(word) equals ℓ(eval(word)) computed by BFS."""
    n = gens.word_length(word)
    if cap is not None and n > cap:
        raise PreconditionError(f"Word length {n} exceeds cap {cap}")
    return _shared(oracle, gens, pres).is_geodesic(word)


def geodesic_layers(oracle: CayleyOracle, radius: int) -> dict[int, list[tuple[Word, GroupElement]]]:
    """
    Every geodesic word of weighted length <= radius, grouped by length.

    Each layer is sorted lexicographically, so walking layers in order is
    a shortlex enumeration.
    """
    oracle.ensure(radius)
    gens = oracle.gens
    layers = {0: [((), oracle.pres.identity)]}
    for n in range(1, radius + 1):
        layer = []
        for i, weight in enumerate(gens.weights):
            for word, g in layers.get(n - weight, ()):
                h = oracle.times(g, i)
                if oracle.length(h) == n:
                    layer.append((word + (i,), h))
        layer.sort(key=lambda item: item[0])
        layers[n] = layer
    return layers


def minimal_nongeodesic_words(
    oracle: CayleyOracle,
    length: int,
    layers: dict[int, list[tuple[Word, GroupElement]]],
) -> list[Word]:
    """
    Non-geodesic words of the given length whose proper prefixes are geodesic.

    Args:
        layers: Output of geodesic_layers covering lengths below `length`
    """
    gens = oracle.gens
    found = []
    for i, weight in enumerate(gens.weights):
        for word, g in layers.get(length - weight, ()):
            if oracle.length(oracle.times(g, i)) != length:
                found.append(word + (i,))
    found.sort()
    return found


def geodesic_word(oracle: CayleyOracle, target: GroupElement, letters: Optional[list[int]] = None) -> Word:
    """
    Lexicographically least geodesic word for target.

    Args:
        letters: Restrict to these letter indices (the oracle must then be
            built over the same restricted set for lengths to match)

    Raises:
        PreconditionError: if target is outside the oracle's ball
    """
    n = oracle.length(target)
    if n is None:
        raise PreconditionError("Target element is outside the oracle ball")
    letters = list(range(len(oracle.gens))) if letters is None else letters
    weights = oracle.gens.weights
    word = []
    g = oracle.pres.identity
    remaining = n
    while remaining > 0:
        for i in letters:
            h = oracle.times(g, i)
            rest = oracle.distance(h, target, remaining - weights[i]) if remaining >= weights[i] else None
            if rest is not None and rest == remaining - weights[i]:
                word.append(i)
                g = h
                remaining = rest
                break
        else:
            raise PreconditionError("No geodesic continuation found; oracle ball too small")
    return tuple(word)


def iter_words(alphabet_size: int, max_letters: int) -> Iterator[Word]:
    """All words with at most max_letters letters, in shortlex order."""
    for n in range(max_letters + 1):
        yield from itertools.product(range(alphabet_size), repeat=n)
