"""Non-regularity witnesses for the Cannon group."""

import pytest

from src.cannon import nerode_separation
from src.errors import PreconditionError


def test_all_pairs_separated(cannon, oracle_for):
    table = nerode_separation(5, oracle_for(cannon))
    assert len(table.witnesses) == 10
    assert table.separated == 10
    doc = table.to_dict()
    assert doc["pairs"] == doc["separated"] == 10


def test_smallest_table(cannon, oracle_for):
    table = nerode_separation(2, oracle_for(cannon))
    (witness,) = table.witnesses
    assert (witness.m, witness.n) == (1, 2)
    assert witness.suffix == "t c^1"
    assert witness.longer_prefix_geodesic
    assert not witness.shorter_prefix_geodesic


def test_needs_cannon_letters(z2, oracle_for):
    with pytest.raises(PreconditionError, match="letters t and c"):
        nerode_separation(3, oracle_for(z2))


def test_n_max_positive(cannon, oracle_for):
    with pytest.raises(PreconditionError):
        nerode_separation(0, oracle_for(cannon))
