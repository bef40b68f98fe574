"""
Geodesic Growth Toolkit - Growth Module

Growth series and closed-form rational growth functions read off the
geodesic automaton.

The transition matrix counts letters between live states; weighted
letters go to separate layers so that M(t) = sum_w t^w M_w. Dividing each
column by the parent count of its target state turns the count of
geodesic words into the count of group elements.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

from sympy import Matrix, Poly, Rational, Symbol, cancel, eye, factor, fraction

from .config import LIMITS, PROCESSING
from .errors import PreconditionError, RecurrenceNotFoundError, ValidationDisagreement
from .geodesic_fsa import DeltaBall, GeodesicAutomaton, ProfileState, build, minimize
from .groups import CayleyOracle, LengthTable
from .utils import setup_logger

logger = setup_logger("growth")

T = Symbol("t")


@dataclass
class TransitionMatrix:
    """
    Sparse exact transition matrix over live states.

    layers[w][(i, j)] is the (possibly corrected) number of weight-w
    letters taking state i to state j.
    """

    size: int
    layers: dict[int, dict[tuple[int, int], Fraction]]
    v1: list[Fraction]
    v2: list[Fraction]
    corrected: bool = False

    @property
    def max_weight(self) -> int:
        return max(self.layers, default=1)

    def dense(self, weight: Optional[int] = None) -> list[list[Fraction]]:
        """Dense matrix of one weight layer, or of all layers summed."""
        rows = [[Fraction(0)] * self.size for _ in range(self.size)]
        for w, entries in self.layers.items():
            if weight is not None and w != weight:
                continue
            for (i, j), value in entries.items():
                rows[i][j] += value
        return rows

    def row_sums(self) -> list[Fraction]:
        return [sum(row) for row in self.dense()]

    def adjacency(self) -> dict[int, list[list[tuple[int, Fraction]]]]:
        out = {}
        for w, entries in self.layers.items():
            rows = [[] for _ in range(self.size)]
            for (i, j), value in sorted(entries.items()):
                rows[i].append((j, value))
            out[w] = rows
        return out

    def polynomial_matrix(self) -> Matrix:
        """Sympy matrix sum_w t^w M_w."""
        m = Matrix.zeros(self.size, self.size)
        for w, entries in self.layers.items():
            for (i, j), value in entries.items():
                m[i, j] += Rational(value.numerator, value.denominator) * T**w
        return m


@dataclass
class GrowthSeries:
    coefficients: list[Fraction]

    def __len__(self) -> int:
        return len(self.coefficients)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def as_integers(self) -> list[int]:
        if not self.is_integral():
            raise ValidationDisagreement(f"Series has non-integer coefficients: {self.coefficients}")
        return [int(c) for c in self.coefficients]


def _poly_text(coefficients) -> str:
    terms = []
    for power, c in enumerate(coefficients):
        if c == 0:
            continue
        magnitude = abs(c)
        if power == 0:
            body = f"{magnitude}"
        else:
            var = "t" if power == 1 else f"t^{power}"
            body = var if magnitude == 1 else f"{magnitude}{var}"
        if not terms:
            terms.append(body if c > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(terms) if terms else "0"


@dataclass(frozen=True)
class RationalGF:
    """
    numerator / denominator with ascending integer coefficients, coprime,
    denominator(0) = 1.
    """

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    def taylor(self, n_terms: int) -> list[Fraction]:
        q0 = Fraction(self.denominator[0])
        out = []
        for n in range(n_terms):
            value = Fraction(self.numerator[n]) if n < len(self.numerator) else Fraction(0)
            for j in range(1, min(n, len(self.denominator) - 1) + 1):
                value -= self.denominator[j] * out[n - j]
            out.append(value / q0)
        return out

    def to_sympy(self):
        num = sum(c * T**i for i, c in enumerate(self.numerator))
        den = sum(c * T**i for i, c in enumerate(self.denominator))
        return num / den

    def factored(self) -> str:
        return str(factor(self.to_sympy()))

    def __str__(self) -> str:
        num = _poly_text(self.numerator)
        den = _poly_text(self.denominator)
        if sum(1 for c in self.numerator if c) > 1:
            num = f"({num})"
        if sum(1 for c in self.denominator if c) > 1:
            den = f"({den})"
        return f"{num} / {den}"

    def to_dict(self) -> dict:
        return {
            "numerator": list(self.numerator),
            "denominator": list(self.denominator),
            "text": str(self),
        }


def transition_matrix(aut: GeodesicAutomaton) -> TransitionMatrix:
    """Letter counts between live states; transitions into fail are dropped."""
    layers: dict[int, dict[tuple[int, int], Fraction]] = {}
    fail = aut.fail
    for i in range(fail):
        for a, j in enumerate(aut.transitions[i]):
            if j == fail:
                continue
            entries = layers.setdefault(aut.weights[a], {})
            entries[(i, j)] = entries.get((i, j), Fraction(0)) + 1
    v1 = [Fraction(1) if i == aut.start else Fraction(0) for i in range(fail)]
    v2 = [Fraction(1)] * fail
    return TransitionMatrix(size=fail, layers=layers, v1=v1, v2=v2)


def parent_count(state: ProfileState, ball: DeltaBall) -> int:
    """
    Number of last edges into the current endpoint that lie on geodesics:
    letters b with profile value -w(b) at h = b̄⁻¹.

    Raises:
        PreconditionError: if delta < k, or some b̄⁻¹ lies outside the ball
    """
    if ball.delta < ball.k:
        raise PreconditionError(f"Parent counts need delta >= k (delta={ball.delta}, k={ball.k})")
    count = 0
    for h, weight in ball.parent_edges:
        if h is None:
            raise PreconditionError(f"A letter of weight {weight} has its inverse edge outside B({ball.delta})")
        if state.table[h] == -weight:
            count += 1
    return count


def parent_counts(aut: GeodesicAutomaton) -> list[int]:
    """Parent count per live state; the start state is assigned 1."""
    if aut.ball is None:
        raise PreconditionError("Automaton has no ball attached; rebuild it or load it with an oracle")
    counts = []
    for i, state in enumerate(aut.states):
        if i == aut.start:
            counts.append(1)
            continue
        p = parent_count(state, aut.ball)
        if p < 1:
            raise ValidationDisagreement(f"State {i} has no geodesic parent edge; delta={aut.delta} is too small")
        counts.append(p)
    return counts


def corrected_matrix(mx: TransitionMatrix, counts: list[int]) -> TransitionMatrix:
    """Divide every column j by the parent count of state j."""
    if len(counts) != mx.size or any(p < 1 for p in counts):
        raise PreconditionError("Parent counts must be positive, one per live state")
    layers = {
        w: {(i, j): value / counts[j] for (i, j), value in entries.items()}
        for w, entries in mx.layers.items()
    }
    return TransitionMatrix(size=mx.size, layers=layers, v1=list(mx.v1), v2=list(mx.v2), corrected=True)


def series(mx: TransitionMatrix, n_terms: int) -> GrowthSeries:
    """c_n = v1 · [t^n](I - M(t))^-1 · v2 by iterated exact vector products."""
    if n_terms < 1:
        raise PreconditionError(f"n_terms must be >= 1, got {n_terms}")
    adjacency = mx.adjacency()
    vectors: list[dict[int, Fraction]] = []
    coefficients = []
    for n in range(n_terms):
        if n == 0:
            current = {i: v for i, v in enumerate(mx.v1) if v}
        else:
            current = {}
            for w, rows in adjacency.items():
                if n - w < 0:
                    continue
                for i, value in vectors[n - w].items():
                    for j, entry in rows[i]:
                        current[j] = current.get(j, Fraction(0)) + value * entry
            current = {j: v for j, v in current.items() if v}
        vectors.append(current)
        coefficients.append(sum((v * mx.v2[j] for j, v in current.items()), Fraction(0)))
    return GrowthSeries(coefficients)


def berlekamp_massey(sequence: list[Fraction]) -> tuple[list[Fraction], int]:
    """
    Shortest linear recurrence over the rationals.

    Returns:
        (C, L) with C[0] = 1 and sum_j C[j]·s[n-j] = 0 for all L <= n < len
    """
    c = [Fraction(1)]
    b = [Fraction(1)]
    length = 0
    shift = 1
    last = Fraction(1)
    for n, s in enumerate(sequence):
        d = s + sum((c[i] * sequence[n - i] for i in range(1, min(length, len(c) - 1) + 1)), Fraction(0))
        if d == 0:
            shift += 1
            continue
        previous = list(c)
        coef = d / last
        if len(c) < len(b) + shift:
            c.extend([Fraction(0)] * (len(b) + shift - len(c)))
        for i, bi in enumerate(b):
            c[i + shift] -= coef * bi
        if 2 * length <= n:
            length = n + 1 - length
            b = previous
            last = d
            shift = 1
        else:
            shift += 1
    c = (c + [Fraction(0)] * (length + 1))[: length + 1]
    return c, length


def _normalize(numerator: list[Fraction], denominator: list[Fraction]) -> RationalGF:
    num = Poly(list(reversed([Rational(x.numerator, x.denominator) for x in numerator])) or [0], T)
    den = Poly(list(reversed([Rational(x.numerator, x.denominator) for x in denominator])), T)
    g = num.gcd(den)
    if g.degree() > 0:
        num = num.quo(g)
        den = den.quo(g)
    q0 = den.eval(0)
    num = Poly(num.as_expr() / q0, T)
    den = Poly(den.as_expr() / q0, T)

    num_coeffs = [Fraction(int(x.p), int(x.q)) for x in reversed(num.all_coeffs())]
    den_coeffs = [Fraction(int(x.p), int(x.q)) for x in reversed(den.all_coeffs())]
    scale = lcm(*(x.denominator for x in num_coeffs + den_coeffs))
    if scale != 1:
        logger.warning(f"Closed form needed denominator scaling by {scale}")
    while len(num_coeffs) > 1 and num_coeffs[-1] == 0:
        num_coeffs.pop()
    return RationalGF(
        tuple(int(x * scale) for x in num_coeffs),
        tuple(int(x * scale) for x in den_coeffs),
    )


def rational_form(mx: TransitionMatrix, series_guard: Optional[int] = None) -> RationalGF:
    """
    Exact generating function of the series of mx.

    The recurrence order is at most size·max_weight; the minimal
    recurrence is found on twice that many terms and checked against
    series_guard further terms.

    Raises:
        RecurrenceNotFoundError: guard terms contradict the recurrence
    """
    order_bound = max(1, mx.size * mx.max_weight)
    if series_guard is None:
        series_guard = PROCESSING["SERIES_GUARD_FACTOR"] * order_bound
    fit_terms = 2 * order_bound
    s = series(mx, fit_terms + series_guard).coefficients

    c, length = berlekamp_massey(s[:fit_terms])
    numerator = []
    for i in range(length):
        numerator.append(sum((c[j] * s[i - j] for j in range(0, min(i, length) + 1)), Fraction(0)))

    gf = _normalize(numerator or [Fraction(0)], c)
    expansion = gf.taylor(len(s))
    if expansion != s:
        bad = next(i for i, (x, y) in enumerate(zip(expansion, s)) if x != y)
        raise RecurrenceNotFoundError(
            f"Recurrence of order {length} disagrees with the series at term {bad}"
        )
    logger.debug(f"Rational form {gf} (recurrence order {length}, {len(s)} terms checked)")
    return gf


def rational_form_by_determinant(mx: TransitionMatrix) -> RationalGF:
    """
    v1 (I - M(t))^-1 v2 by Cramer's rule with fraction-free determinants.

    Raises:
        PreconditionError: matrix larger than LIMITS["DETERMINANT_MAX_DIM"]
    """
    if mx.size > LIMITS["DETERMINANT_MAX_DIM"]:
        raise PreconditionError(
            f"{mx.size} states exceeds the determinant limit of {LIMITS['DETERMINANT_MAX_DIM']}"
        )
    a = eye(mx.size) - mx.polynomial_matrix()
    start = mx.v1.index(Fraction(1))
    replaced = a.copy()
    for i, v in enumerate(mx.v2):
        replaced[i, start] = Rational(v.numerator, v.denominator)
    det = a.det(method="bareiss")
    num, den = fraction(cancel(replaced.det(method="bareiss") / det))

    def coeffs(expr):
        poly = Poly(expr, T)
        return [Fraction(int(x.p), int(x.q)) for x in reversed(poly.all_coeffs())]

    return _normalize(coeffs(num), coeffs(den))


def validate_growth(growth: GrowthSeries, table: LengthTable) -> bool:
    """True iff c_n equals the sphere size |{g : ℓ(g) = n}| for every term."""
    if table.radius < len(growth) - 1:
        raise PreconditionError(f"Ball radius {table.radius} is too small for {len(growth)} terms")
    spheres = table.sphere_sizes()
    return all(growth.coefficients[n] == spheres[n] for n in range(len(growth)))


@dataclass
class GrowthResult:
    delta: int
    states: int
    minimized_states: int
    parent_counts: list[int]
    corrected: GrowthSeries
    language: GrowthSeries
    closed_form: RationalGF
    validated: bool
    spheres: list[int]
    determinant_check: Optional[bool] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "states": self.states,
            "minimized_states": self.minimized_states,
            "series": [str(c) for c in self.corrected.coefficients],
            "language_series": [str(c) for c in self.language.coefficients],
            "spheres": self.spheres,
            "rational_form": self.closed_form.to_dict(),
            "validated": self.validated,
            "determinant_check": self.determinant_check,
            "notes": self.notes,
        }


def analyze_growth(
    oracle: CayleyOracle,
    delta: int,
    n_terms: int,
    aut: Optional[GeodesicAutomaton] = None,
) -> GrowthResult:
    """
    Full pipeline: automaton, parent counts, minimization that keeps
    parent counts apart, corrected series, closed form and oracle check.
    """
    aut = aut or build(delta, oracle)
    counts = parent_counts(aut)
    small = minimize(aut, labels=counts)
    small_counts = parent_counts(small)

    mx = transition_matrix(small)
    corrected = corrected_matrix(mx, small_counts)
    growth = series(corrected, n_terms)
    language = series(mx, n_terms)
    gf = rational_form(corrected)

    oracle.ensure(n_terms - 1)
    table = oracle.table.restrict(n_terms - 1)
    validated = validate_growth(growth, table)
    result = GrowthResult(
        delta=delta,
        states=aut.live_count,
        minimized_states=small.live_count,
        parent_counts=small_counts,
        corrected=growth,
        language=language,
        closed_form=gf,
        validated=validated,
        spheres=table.sphere_sizes(),
    )
    if not growth.is_integral():
        result.notes.append("corrected series has non-integer coefficients")

    if corrected.size <= LIMITS["DETERMINANT_MAX_DIM"]:
        result.determinant_check = rational_form_by_determinant(corrected) == gf
        if not result.determinant_check:
            result.notes.append("determinant closed form differs from the recurrence closed form")
    else:
        result.notes.append(f"determinant cross-check skipped for {corrected.size} states")

    logger.info(
        f"Growth at delta={delta}: {small.live_count} states, closed form {gf}, "
        f"{'validated' if validated else 'NOT validated'} against {n_terms} sphere sizes"
    )
    return result
