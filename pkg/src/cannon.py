"""
Geodesic Growth Toolkit - Cannon Example

Oracle evidence that the geodesic language of Z^2 extended by Z/2 with
letters a, c (= a^2), d (= ab), t and their inverses is not regular:
the prefixes t c^n are pairwise separated by the suffixes t c^m.
"""

from dataclasses import dataclass, field

from .errors import PreconditionError
from .groups import CayleyOracle
from .utils import setup_logger

logger = setup_logger("cannon")

EXPLANATION = (
    "Here t c^n t c^m evaluates to (2m, 2n) and is geodesic exactly when m < n; "
    "for m >= n the shorter word d^(2n) c^(m-n) reaches the same element. "
    "Each row gives a suffix s = t c^m with t c^n s geodesic and t c^m s not, so "
    "no two prefixes t c^n share a right-residual in the geodesic language. "
    "A finite automaton accepting exactly the geodesics would need a distinct state "
    "for every n, so no such automaton exists."
)


@dataclass
class NerodeWitness:
    m: int
    n: int
    suffix: str
    longer_prefix_geodesic: bool
    shorter_prefix_geodesic: bool

    @property
    def separated(self) -> bool:
        return self.longer_prefix_geodesic and not self.shorter_prefix_geodesic

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "suffix": self.suffix,
            "geodesic_after_longer_prefix": self.longer_prefix_geodesic,
            "geodesic_after_shorter_prefix": self.shorter_prefix_geodesic,
            "separated": self.separated,
        }


@dataclass
class NerodeTable:
    n_max: int
    witnesses: list[NerodeWitness] = field(default_factory=list)

    @property
    def separated(self) -> int:
        return sum(1 for w in self.witnesses if w.separated)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "pairs": len(self.witnesses),
            "separated": self.separated,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def nerode_separation(n_max: int, oracle: CayleyOracle) -> NerodeTable:
    """
    Witness table for 1 <= m < n <= n_max.

    Raises:
        PreconditionError: the alphabet has no letters named t and c
        ResourceCapError: the oracle ball for words of length 2·n_max + 2
            exceeds its cap
    """
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    gens = oracle.gens
    if "t" not in gens.names or "c" not in gens.names:
        raise PreconditionError("nerode_separation needs the letters t and c of the Cannon group")

    oracle.ensure(2 * n_max + 2)
    table = NerodeTable(n_max)
    for n in range(2, n_max + 1):
        for m in range(1, n):
            suffix = f"t c^{m}"
            longer = oracle.is_geodesic(gens.parse_word(f"t c^{n} {suffix}"))
            shorter = oracle.is_geodesic(gens.parse_word(f"t c^{m} {suffix}"))
            table.witnesses.append(NerodeWitness(m, n, suffix, longer, shorter))
            if not (longer and not shorter):
                logger.warning(f"Pair (m={m}, n={n}) is not separated by {suffix}")

    logger.info(f"Separated {table.separated} of {len(table.witnesses)} prefix pairs up to n={n_max}")
    return table
