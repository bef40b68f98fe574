"""
Geodesic Growth Toolkit - Translation Polytopes Module

Virtually abelian machinery over Z^m extended by a finite group F:
translation lengths, the unit ball C(A) of the translation length,
good generating sets, hemisphere criteria for ray sets, and cone
languages assembled from a triangulation of the sphere of rays.

All computations are exact (Fraction / sympy Rational).
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from sympy import Matrix, Rational

from .config import LIMITS
from .errors import (
    ConeLanguageError,
    InfeasibleError,
    PolytopeError,
    PreconditionError,
    ResourceCapError,
    SurjectivityError,
)
from .exact_lp import feasible_point, solve_lp
from .groups import (
    KIND_VA,
    CayleyOracle,
    GeneratingSet,
    GroupPresentation,
    Letter,
    VAElement,
    Word,
    evaluate,
    geodesic_word,
)
from .utils import setup_logger

logger = setup_logger("polytopes")

Vector = tuple[Fraction, ...]


def _require_va(pres: GroupPresentation):
    if pres.kind != KIND_VA:
        raise PreconditionError("This operation needs a virtually abelian group")


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(int(x.p), int(x.q))


def _dot(u, v) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True, order=True)
class Ray:
    """Primitive integer direction."""

    direction: tuple[int, ...]

    @classmethod
    def of(cls, vector: Sequence) -> "Ray":
        values = [Fraction(x) for x in vector]
        scale = math.lcm(*(v.denominator for v in values)) if values else 1
        ints = [int(v * scale) for v in values]
        g = math.gcd(*ints) if ints else 0
        if g == 0:
            raise PolytopeError("The zero vector does not define a ray")
        return cls(tuple(x // g for x in ints))

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.direction) + ")"


@dataclass(frozen=True)
class Polytope:
    """
    Full-dimensional convex polytope in R^m.

    facets are (normal, offset) pairs with primitive integer normals and
    the inequality normal·x <= offset.
    """

    dimension: int
    vertices: tuple[Vector, ...]
    facets: tuple[tuple[tuple[int, ...], Fraction], ...]

    def contains(self, point: Sequence) -> bool:
        return all(_dot(n, point) <= b for n, b in self.facets)

    def interior(self, point: Sequence) -> bool:
        return all(_dot(n, point) < b for n, b in self.facets)

    def gauge(self, point: Sequence) -> Fraction:
        """Least s >= 0 with point in s·P (origin must be interior)."""
        if not self.interior([0] * self.dimension):
            raise PolytopeError("Gauge needs the origin in the interior")
        return max([Fraction(0)] + [_dot(n, point) / b for n, b in self.facets])

    def scaled(self, factor) -> "Polytope":
        factor = Fraction(factor)
        return Polytope(
            self.dimension,
            tuple(tuple(x * factor for x in v) for v in self.vertices),
            tuple((n, b * factor) for n, b in self.facets),
        )

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def integer_points(self) -> list[tuple[int, ...]]:
        lo = [math.floor(min(v[i] for v in self.vertices)) for i in range(self.dimension)]
        hi = [math.ceil(max(v[i] for v in self.vertices)) for i in range(self.dimension)]
        return [
            p for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
            if self.contains(p)
        ]

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "vertices": [[str(x) for x in v] for v in self.vertices],
            "facets": [{"normal": list(n), "offset": str(b)} for n, b in self.facets],
        }


def _primitive_normal(values) -> tuple[int, ...]:
    fractions = [_to_fraction(x) for x in values]
    scale = math.lcm(*(f.denominator for f in fractions))
    ints = [int(f * scale) for f in fractions]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def convex_hull(points: Sequence[Sequence], dimension: int) -> Polytope:
    """
    Exact hull by brute-force facet enumeration over point subsets.

    Raises:
        PolytopeError: fewer than dimension+1 affinely independent points
    """
    pts = sorted({tuple(Fraction(x) for x in p) for p in points})
    if any(len(p) != dimension for p in pts):
        raise PolytopeError(f"Points must have {dimension} coordinates")
    if len(pts) < dimension + 1:
        raise PolytopeError("Hull is not full-dimensional")

    if dimension == 1:
        lo, hi = pts[0][0], pts[-1][0]
        return Polytope(1, ((lo,), (hi,)), (((1,), hi), ((-1,), -lo)))

    base = pts[0]
    spread = Matrix([[Rational(x - y) for x, y in zip(p, base)] for p in pts[1:]])
    if spread.rank() < dimension:
        raise PolytopeError("Hull is not full-dimensional")

    facets: dict[tuple[int, ...], Fraction] = {}
    for combo in itertools.combinations(range(len(pts)), dimension):
        anchor = pts[combo[0]]
        rows = Matrix([[Rational(x - y) for x, y in zip(pts[i], anchor)] for i in combo[1:]])
        null = rows.nullspace()
        if len(null) != 1:
            continue
        normal = _primitive_normal(list(null[0]))
        offset = _dot(normal, anchor)
        values = [_dot(normal, p) for p in pts]
        # Keyed by the outward normal
        if all(v <= offset for v in values):
            facets.setdefault(normal, offset)
        elif all(v >= offset for v in values):
            facets.setdefault(tuple(-x for x in normal), -offset)

    vertices = []
    for p in pts:
        tight = [n for n, b in facets.items() if _dot(n, p) == b]
        if tight and Matrix(tight).rank() == dimension:
            vertices.append(p)
    return Polytope(dimension, tuple(vertices), tuple(sorted(facets.items())))


def expanded_abelian_letters(gens: GeneratingSet, pres: GroupPresentation) -> list[tuple[tuple[int, ...], int]]:
    """
    Weighted vectors whose hull scaled by inverse weight is C(A).

    Letters evaluating into Z^m, values of words of length <= |F| that
    return to Z^m through letters outside it (weight = word length), and
    the F-orbits of all of these. For free abelian groups this is just the
    letter set.
    """
    _require_va(pres)
    best: dict[tuple[int, ...], int] = {}

    def add(vector, weight):
        if any(vector) and weight < best.get(vector, weight + 1):
            best[vector] = weight

    for value, weight in zip(gens.values, gens.weights):
        if value.f == 0:
            add(value.vector, weight)

    outside = {i for i, value in enumerate(gens.values) if value.f != 0}
    if outside and pres.f_order > 1:
        budget = LIMITS["EXPANSION_WORD_CAP"]
        for length in range(2, pres.f_order + 1):
            if len(gens) ** length > budget:
                raise ResourceCapError(
                    f"Expanding words of length {length} over {len(gens)} letters exceeds {budget}"
                )
            for word in itertools.product(range(len(gens)), repeat=length):
                if not outside.intersection(word):
                    continue
                g = evaluate(word, gens, pres)
                if g.f == 0:
                    add(g.vector, gens.word_length(word))

    for vector, weight in list(best.items()):
        for f in range(pres.f_order):
            add(pres.act(f, vector), weight)
    return sorted(best.items())


def translation_length(vector: Sequence[int], gens: GeneratingSet, pres: GroupPresentation) -> Fraction:
    """
    tau(v) = min sum λ_i·w_i subject to sum λ_i·a_i = v, λ >= 0.

    Raises:
        InfeasibleError: v is not in the positive span of the letters
    """
    _require_va(pres)
    if not any(vector):
        return Fraction(0)
    letters = expanded_abelian_letters(gens, pres)
    if not letters:
        raise InfeasibleError("No letters evaluate into Z^m")
    a_eq = [[vec[k] for vec, _ in letters] for k in range(pres.rank)]
    try:
        result = solve_lp([w for _, w in letters], a_eq, list(vector))
    except InfeasibleError:
        raise InfeasibleError(f"{tuple(vector)} is not in the positive span of the letters") from None
    return result.value


def translation_polytope(gens: GeneratingSet, pres: GroupPresentation) -> Polytope:
    """
    C(A) = {v : tau(v) <= 1}, the hull of the weighted letter vectors.

    Raises:
        PolytopeError: hull not full-dimensional or origin not interior
    """
    letters = expanded_abelian_letters(gens, pres)
    points = [tuple(Fraction(x, w) for x in vec) for vec, w in letters]
    polytope = convex_hull(points, pres.rank)
    if not polytope.interior([0] * pres.rank):
        raise PolytopeError("The origin is not interior to C(A); the letters do not span positively")
    return polytope


def gauge_exceptions(gens: GeneratingSet, pres: GroupPresentation, box: int) -> list[tuple[int, ...]]:
    """Integer v in [-box, box]^m where tau(v) <= 1 and v ∈ C(A) disagree."""
    polytope = translation_polytope(gens, pres)
    bad = []
    for v in itertools.product(range(-box, box + 1), repeat=pres.rank):
        if (translation_length(v, gens, pres) <= 1) != polytope.contains(v):
            bad.append(v)
    if bad:
        logger.warning(f"Gauge identity fails at {len(bad)} points, first {bad[0]}")
    return bad


@dataclass
class TranslationSample:
    vector: tuple[int, ...]
    tau: Fraction
    lengths: dict[int, int]

    def deviation(self, n: int) -> Fraction:
        """ℓ(n·v)/n − tau(v); never negative."""
        return Fraction(self.lengths[n], n) - self.tau

    def to_dict(self) -> dict:
        return {
            "vector": list(self.vector),
            "tau": str(self.tau),
            "lengths": {str(n): length for n, length in sorted(self.lengths.items())},
            "max_scaled_deviation": str(max((self.deviation(n) * n for n in self.lengths), default=0)),
        }


def translation_samples(
    vectors: Sequence[Sequence[int]],
    gens: GeneratingSet,
    pres: GroupPresentation,
    multiples: Sequence[int] = (4, 8, 12, 16, 20),
    oracle: Optional[CayleyOracle] = None,
) -> list[TranslationSample]:
    """
    ℓ(n·v) from the oracle next to tau(v) for each sample vector.

    Since ℓ(n·v) >= n·tau(v), the ball is grown from ceil(n·tau(v))
    until n·v appears.
    """
    oracle = oracle or CayleyOracle(gens, pres)
    samples = []
    for v in vectors:
        v = tuple(int(x) for x in v)
        tau = translation_length(v, gens, pres)
        lengths = {}
        for n in multiples:
            g = VAElement(tuple(n * x for x in v), 0)
            radius = max(1, math.ceil(n * tau))
            while oracle.exact_length(g, radius) is None:
                radius += max(2, radius // 2)
            lengths[n] = oracle.length(g)
        samples.append(TranslationSample(v, tau, lengths))
    return samples


def boundary_rays(polytope: Polytope) -> list[Ray]:
    """Rays through the vertices of the polytope."""
    return sorted({Ray.of(v) for v in polytope.vertices})


def is_f_invariant(polytope: Polytope, pres: GroupPresentation) -> bool:
    vertices = polytope.vertex_set()
    for f in range(pres.f_order):
        for v in polytope.vertices:
            moved = tuple(_dot(row, v) for row in pres.f_action[f])
            if moved not in vertices:
                return False
    return True


@dataclass
class GoodSet:
    gens: GeneratingSet
    scale: int
    polytope: Polytope
    added: int
    mandated: int


def _mandated_vectors(base: GeneratingSet, pres: GroupPresentation) -> list[tuple[tuple[int, ...], int]]:
    """(vector, divisor) pairs that N·Q must contain as vector/divisor."""
    mandated = set()
    for vector, weight in expanded_abelian_letters(base, pres):
        mandated.add((vector, weight))

    outside = [i for i, value in enumerate(base.values) if value.f != 0]
    by_f = {}
    for i in outside:
        by_f.setdefault(base.values[i].f, i)

    for length in range(1, 4):
        for word in itertools.product(outside, repeat=length):
            g = evaluate(word, base, pres)
            if g.f == 0:
                n_w = g.vector
            else:
                b = by_f.get(g.f)
                if b is None:
                    raise PreconditionError(
                        f"No letter has F-part {g.f}; add one so the letters surject onto F"
                    )
                n_w = pres.multiply(g, pres.inverse(base.values[b])).vector
            if any(n_w):
                mandated.add((n_w, 1))

    for i, j in itertools.product(outside, repeat=2):
        if base.values[i].f == base.values[j].f:
            diff = pres.multiply(base.values[i], pres.inverse(base.values[j])).vector
            if any(diff):
                mandated.add((diff, 1))
    return sorted(mandated)


def good_generating_set(
    base: GeneratingSet,
    q: Polytope,
    pres: GroupPresentation,
    symmetric: bool = False,
    scale_cap: Optional[int] = None,
) -> GoodSet:
    """
    Enlarge base by the integer points of N·Q for the least N that makes
    N·Q integral and contains every required translation.

    Raises:
        PolytopeError: Q not F-invariant, origin not interior, or Q != -Q
            when a symmetric result is requested
        ResourceCapError: no N up to the scale cap works
    """
    _require_va(pres)
    scale_cap = scale_cap or LIMITS["SCALE_CAP"]
    if q.dimension != pres.rank:
        raise PolytopeError(f"Q has dimension {q.dimension}, group rank is {pres.rank}")
    if not q.interior([0] * q.dimension):
        raise PolytopeError("Q must contain the origin in its interior")
    if not is_f_invariant(q, pres):
        raise PolytopeError("Q is not invariant under the F-action")
    centrally_symmetric = q.vertex_set() == frozenset(tuple(-x for x in v) for v in q.vertices)
    if symmetric:
        if not centrally_symmetric:
            raise PolytopeError("Symmetric output needs Q = -Q")
        if not base.inverse_closed:
            raise PreconditionError("Symmetric output needs an inverse-closed base set")

    mandated = _mandated_vectors(base, pres)
    for n in range(1, scale_cap + 1):
        if any((x * n).denominator != 1 for v in q.vertices for x in v):
            continue
        if all(q.contains(tuple(Fraction(x, d * n) for x in vec)) for vec, d in mandated):
            scale = n
            break
    else:
        raise ResourceCapError(f"No scale N <= {scale_cap} puts the required translations in N·Q")

    nq = q.scaled(scale)
    present = {letter.value.vector for letter in base.letters if letter.value.f == 0 and letter.weight == 1}
    names = set(base.names)
    added = []
    for point in nq.integer_points():
        if not any(point) or point in present:
            continue
        name = "v(" + ",".join(str(x) for x in point) + ")"
        if name in names:
            raise PreconditionError(f"Letter name {name} already used")
        added.append(Letter(name, VAElement(point, 0), 1))

    gens = GeneratingSet(base.letters + tuple(added), inverse_closed=base.inverse_closed and centrally_symmetric)
    logger.info(f"Good generating set: N={scale}, {len(added)} letters added, {len(gens)} total")
    return GoodSet(gens=gens, scale=scale, polytope=nq, added=len(added), mandated=len(mandated))


def is_good(gens: GeneratingSet, pres: GroupPresentation, radius: int) -> bool:
    """
    A_Z is F-invariant and every Z^m element in the radius ball has a
    geodesic using only A_Z letters.
    """
    _require_va(pres)
    z_idx = gens.translation_indices(pres)
    values = {gens.values[i].vector for i in z_idx}
    for f in range(pres.f_order):
        if any(pres.act(f, v) not in values for v in values):
            return False
    if not z_idx:
        return False
    full = CayleyOracle(gens, pres, radius)
    restricted = CayleyOracle(gens.subset(z_idx), pres, radius)
    for g, n in full.table.entries.items():
        if g.f == 0 and restricted.length(g) != n:
            return False
    return True


@dataclass
class AbelianFFTBound:
    k: int
    minimal: list[tuple[int, ...]]
    frontier_closed: bool
    cap: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "minimal": [list(m) for m in self.minimal],
            "frontier_closed": self.frontier_closed,
            "cap": self.cap,
        }


def _exponent_vectors(weights: Sequence[int], cap: int):
    def rec(i, budget):
        if i == len(weights):
            yield ()
            return
        for e in range(budget // weights[i] + 1):
            for rest in rec(i + 1, budget - e * weights[i]):
                yield (e,) + rest
    yield from rec(0, cap)


def abelian_fft_bound(gens: GeneratingSet, pres: GroupPresentation, cap: int) -> AbelianFFTBound:
    """
    Minimal non-geodesic exponent vectors of monomial words a1^n1 ... ar^nr.

    Non-geodesic vectors form an up-set, so its minimal elements are found
    by sweeping vectors in order of weighted length. k is the largest
    weighted length among them; the frontier counts as closed when no
    minimal element lies within one letter of the cap.
    """
    _require_va(pres)
    if pres.f_order != 1:
        raise PreconditionError("abelian_fft_bound needs a free abelian group")
    oracle = CayleyOracle(gens, pres, cap)
    weights = gens.weights
    vectors = sorted(
        _exponent_vectors(weights, cap),
        key=lambda n: (sum(e * w for e, w in zip(n, weights)), n),
    )

    nongeodesic = set()
    minimal = []
    for n in vectors:
        length = sum(e * w for e, w in zip(n, weights))
        total = [0] * pres.rank
        for e, value in zip(n, gens.values):
            for k in range(pres.rank):
                total[k] += e * value.vector[k]
        if oracle.length(VAElement(tuple(total), 0)) == length:
            continue
        nongeodesic.add(n)
        below = (n[:i] + (n[i] - 1,) + n[i + 1:] for i in range(len(n)) if n[i] > 0)
        if not any(m in nongeodesic for m in below):
            minimal.append(n)

    lengths = [sum(e * w for e, w in zip(m, weights)) for m in minimal]
    k = max(lengths, default=0)
    closed = all(length <= cap - gens.max_weight for length in lengths)
    if not closed:
        logger.warning(f"Minimal element search touches the cap {cap}; k={k} may be too small")
    return AbelianFFTBound(k=k, minimal=minimal, frontier_closed=closed, cap=cap)


def hemisphere_check(rays: Sequence[Ray]) -> bool:
    """
    True iff the rays lie in a closed hemisphere: some nonzero u has
    u·s >= 0 for every direction s.

    Decided as: not contained iff the directions span R^m and admit a
    strictly positive linear dependency (origin interior to their hull).
    """
    if not rays:
        raise PreconditionError("hemisphere_check needs at least one ray")
    dirs = [r.direction for r in rays]
    m = len(dirs[0])
    if Matrix(dirs).rank() < m:
        return True
    # λ_i = 1 + μ_i, μ >= 0: sum μ_i s_i = -sum s_i
    a_eq = [[s[k] for s in dirs] for k in range(m)]
    b_eq = [-sum(s[k] for s in dirs) for k in range(m)]
    return feasible_point(a_eq, b_eq, len(dirs)) is None


def symmetric_hemisphere_check(rays: Sequence[Ray]) -> bool:
    """hemisphere_check on S ∩ -S; the empty set lies in every hemisphere."""
    present = set(rays)
    paired = sorted(r for r in present if Ray(tuple(-x for x in r.direction)) in present)
    if not paired:
        return True
    return hemisphere_check(paired)


def f_invariant_core(rays: Sequence[Ray], pres: GroupPresentation) -> list[Ray]:
    """Largest subset of rays mapped into itself by every element of F."""
    _require_va(pres)
    current = set(rays)
    while True:
        keep = {
            r for r in current
            if all(Ray.of(pres.act(f, r.direction)) in current for f in range(pres.f_order))
        }
        if keep == current:
            return sorted(current)
        current = keep


def _cone_coefficients(vectors: Sequence[Sequence[int]], point: Sequence[int]) -> Optional[list[Fraction]]:
    """Coefficients c with sum c_i v_i = point, if the system is solvable."""
    columns = Matrix([[Rational(v[k]) for v in vectors] for k in range(len(point))])
    try:
        solution, params = columns.gauss_jordan_solve(Matrix([Rational(x) for x in point]))
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return [_to_fraction(x) for x in solution]


@dataclass(frozen=True)
class Triangulation:
    """Rays on the sphere and the ordered simplices spanning their cones."""

    rank: int
    rays: tuple[Ray, ...]
    simplices: tuple[tuple[int, ...], ...]
    ordered: bool = True

    def validate(self):
        """
        Raises:
            PolytopeError: bad ray dimension, index, simplex size, or
                linearly dependent simplex rays
        """
        for r in self.rays:
            if len(r.direction) != self.rank:
                raise PolytopeError(f"Ray {r} does not have rank {self.rank}")
        for simplex in self.simplices:
            if not simplex or len(simplex) > self.rank:
                raise PolytopeError(f"Simplex {simplex} must have 1..{self.rank} rays")
            if any(not 0 <= i < len(self.rays) for i in simplex):
                raise PolytopeError(f"Simplex {simplex} refers to a missing ray")
            if Matrix([self.rays[i].direction for i in simplex]).rank() != len(simplex):
                raise PolytopeError(f"Simplex {simplex} has linearly dependent rays")

    def covers(self, point: Sequence[int]) -> bool:
        for simplex in self.simplices:
            coefficients = _cone_coefficients([self.rays[i].direction for i in simplex], point)
            if coefficients is not None and all(c >= 0 for c in coefficients):
                return True
        return False

    def check_cover(self, radius: int) -> list[tuple[int, ...]]:
        """Nonzero integer points of the box [-radius, radius]^m in no cone."""
        return [
            p for p in itertools.product(range(-radius, radius + 1), repeat=self.rank)
            if any(p) and not self.covers(p)
        ]

    def is_f_invariant(self, pres: GroupPresentation) -> bool:
        rays = set(self.rays)
        return all(
            Ray.of(pres.act(f, r.direction)) in rays
            for f in range(pres.f_order) for r in self.rays
        )


@dataclass
class ConeLanguage:
    """
    Words w_v per triangulation ray, the product scheme per simplex and
    coset words X; the language is the union over simplices of
    w_v1^n1 ... w_vk^nk followed by a word of X.
    """

    scale: int
    rays: tuple[Ray, ...]
    points: list[tuple[int, ...]]
    words: list[Word]
    simplices: tuple[tuple[int, ...], ...]
    lattice_index: int
    coset_words: list[Word]
    surjective: bool = False
    checked_radius: int = 0
    elements_checked: int = 0
    cone_words_geodesic: bool = True
    max_slack: int = 0
    words_enumerated: int = 0
    missing_boundary_rays: list[Ray] = field(default_factory=list)

    def to_dict(self, gens: GeneratingSet) -> dict:
        return {
            "scale": self.scale,
            "rays": [list(r.direction) for r in self.rays],
            "points": [list(p) for p in self.points],
            "words": [gens.format_word(w) for w in self.words],
            "simplices": [list(s) for s in self.simplices],
            "lattice_index": self.lattice_index,
            "coset_words": [gens.format_word(w) for w in self.coset_words],
            "surjective": self.surjective,
            "checked_radius": self.checked_radius,
            "elements_checked": self.elements_checked,
            "cone_words_geodesic": self.cone_words_geodesic,
            "max_slack": self.max_slack,
            "words_enumerated": self.words_enumerated,
            "missing_boundary_rays": [list(r.direction) for r in self.missing_boundary_rays],
        }


def _ray_points(tri: Triangulation, taus: list[Fraction], scale: int) -> Optional[list[tuple[int, ...]]]:
    points = []
    for ray, tau in zip(tri.rays, taus):
        p = [Fraction(scale) * x / tau for x in ray.direction]
        if any(x.denominator != 1 for x in p):
            return None
        points.append(tuple(int(x) for x in p))
    return points


def _coset_key(g: VAElement, index: int) -> tuple:
    return (tuple(x % index for x in g.vector), g.f)


def cone_language(
    tri: Triangulation,
    gens: GeneratingSet,
    pres: GroupPresentation,
    scale: Optional[int] = None,
    check_radius: Optional[int] = None,
    oracle: Optional[CayleyOracle] = None,
) -> ConeLanguage:
    """
    Assemble the cone language of a triangulation and check it on a ball.

    Each ray r gets the point p = (N / tau(r))·r on the boundary of N·C(A)
    and the lexicographically least geodesic word for p over the letters
    in Z^m, which must have length exactly N. With scale=None the least
    N up to the scale cap is used.

    Raises:
        ConeLanguageError: no N gives geodesic representatives, or the
            triangulation has no full simplex
        SurjectivityError: some element of the check ball is missed
    """
    _require_va(pres)
    if tri.rank != pres.rank:
        raise ConeLanguageError(f"Triangulation rank {tri.rank} does not match group rank {pres.rank}")
    z_idx = gens.translation_indices(pres)
    if not z_idx:
        raise ConeLanguageError("No letters evaluate into Z^m")

    oracle = oracle or CayleyOracle(gens, pres)
    polytope = translation_polytope(gens, pres)
    missing = [r for r in boundary_rays(polytope) if r not in set(tri.rays)]
    if missing:
        logger.warning(f"Triangulation misses vertex rays of C(A): {[str(r) for r in missing]}")

    taus = [translation_length(r.direction, gens, pres) for r in tri.rays]
    zgens = gens.subset(z_idx)
    candidates = [scale] if scale else range(1, LIMITS["SCALE_CAP"] + 1)

    chosen = None
    for n in candidates:
        points = _ray_points(tri, taus, n)
        if points is None:
            continue
        oracle.ensure(n)
        z_oracle = CayleyOracle(zgens, pres, n, oracle.cap)
        elements = [VAElement(p, 0) for p in points]
        if all(z_oracle.length(g) == n and oracle.length(g) == n for g in elements):
            words = [tuple(z_idx[i] for i in geodesic_word(z_oracle, g)) for g in elements]
            chosen = (n, points, words)
            break
    if chosen is None:
        limit = scale if scale else LIMITS["SCALE_CAP"]
        raise ConeLanguageError(f"No geodesic representatives on the rays for N <= {limit}; N too small")
    n, points, words = chosen
    logger.info(f"Cone words at N={n}: " + ", ".join(gens.format_word(w) for w in words))

    index = 1
    for simplex in tri.simplices:
        if len(simplex) == pres.rank:
            det = Matrix([points[i] for i in simplex]).det()
            index = math.lcm(index, abs(int(det)))
    if not any(len(s) == pres.rank for s in tri.simplices):
        raise ConeLanguageError("Triangulation has no simplex of full rank")

    # Coset words: lexicographically least geodesic of a shortest element per coset
    cosets = index ** pres.rank * pres.f_order
    found: dict[tuple, tuple[int, Word]] = {}
    radius = max(1, oracle.radius)
    while True:
        oracle.ensure(radius)
        for g, length in oracle.table.entries.items():
            key = _coset_key(g, index)
            current = found.get(key)
            if current is not None and current[0] < length:
                continue
            word = geodesic_word(oracle, g)
            if current is None or (length, word) < current:
                found[key] = (length, word)
        if len(found) == cosets:
            break
        if radius >= 256:
            raise ConeLanguageError(f"Only {len(found)} of {cosets} cosets reached by radius {radius}")
        radius *= 2
    coset_words = [found[key][1] for key in sorted(found)]

    language = ConeLanguage(
        scale=n,
        rays=tri.rays,
        points=points,
        words=words,
        simplices=tri.simplices,
        lattice_index=index,
        coset_words=coset_words,
        missing_boundary_rays=missing,
    )

    check_radius = check_radius or max(2 * n, 6)
    _check_surjective(language, tri, oracle, check_radius)
    _measure_slack(language, oracle, check_radius)
    return language


def _check_surjective(language: ConeLanguage, tri: Triangulation, oracle: CayleyOracle, radius: int):
    pres = oracle.pres
    oracle.ensure(radius)
    by_key = {}
    for word in language.coset_words:
        g = oracle.evaluate(word)
        by_key[_coset_key(g, language.lattice_index)] = g

    checked = 0
    for g, length in sorted(oracle.table.entries.items(), key=lambda kv: (kv[1], kv[0].sort_key())):
        if length > radius:
            continue
        checked += 1
        x = by_key[_coset_key(g, language.lattice_index)]
        h = pres.multiply(g, pres.inverse(x))
        hit = False
        for simplex in language.simplices:
            coefficients = _cone_coefficients([language.points[i] for i in simplex], h.vector)
            if coefficients is not None and all(c >= 0 and c.denominator == 1 for c in coefficients):
                hit = True
                break
        if not hit:
            raise SurjectivityError(
                f"Element {g.to_json()} of length {length} is not the value of any cone-language word"
            )
    language.surjective = True
    language.checked_radius = radius
    language.elements_checked = checked
    logger.info(f"Cone language reaches all {checked} elements of the radius-{radius} ball")


def _measure_slack(language: ConeLanguage, oracle: CayleyOracle, radius: int):
    gens = oracle.gens
    n = language.scale
    enumerated = 0
    for simplex in language.simplices:
        for exponents in itertools.product(range(radius // n + 1), repeat=len(simplex)):
            if sum(exponents) * n > radius:
                continue
            body = tuple(
                letter
                for i, e in zip(simplex, exponents)
                for letter in language.words[i] * e
            )
            for x in language.coset_words:
                word = body + x
                length = gens.word_length(word)
                if length > radius:
                    continue
                enumerated += 1
                slack = length - oracle.length(oracle.evaluate(word))
                language.max_slack = max(language.max_slack, slack)
                if not x and slack:
                    language.cone_words_geodesic = False
    language.words_enumerated = enumerated
