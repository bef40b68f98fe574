"""Shared fixtures: bundled groups and their Cayley oracles."""

import json
import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.fellow_travel import min_fft_delta
from src.group_files import load_group
from src.groups import CayleyOracle, GeneratingSet, GroupPresentation, Letter, VAElement


GOLDEN_DIR = Path(__file__).parent / "golden"


def _definition(name):
    return load_group(name, check=False)


@pytest.fixture(scope="session")
def z1():
    return _definition("z1")


@pytest.fixture(scope="session")
def z2():
    return _definition("z2")


@pytest.fixture(scope="session")
def z3():
    return _definition("z3")


@pytest.fixture(scope="session")
def cannon():
    return _definition("cannon")


@pytest.fixture(scope="session")
def cannon_enlarged():
    return _definition("cannon_enlarged")


@pytest.fixture(scope="session")
def psl2z():
    return _definition("psl2z")


@pytest.fixture
def oracle_for():
    """Fresh oracle over a loaded definition: oracle_for(definition, radius)."""

    def make(definition, radius=0):
        return CayleyOracle(definition.gens, definition.pres, radius)

    return make


@pytest.fixture(scope="session")
def line():
    """Z^1 presentation."""
    return GroupPresentation.free_abelian(1)


@pytest.fixture
def z1_letters():
    """GeneratingSet over Z^1 from (name, step, weight) triples."""

    def make(*specs):
        return GeneratingSet(tuple(Letter(name, VAElement((step,), 0), weight) for name, step, weight in specs))

    return make


@pytest.fixture
def z2_letters():
    """GeneratingSet over Z^2 from (name, (x, y), weight) triples."""

    def make(*specs):
        return GeneratingSet(tuple(Letter(name, VAElement(tuple(v), 0), weight) for name, v, weight in specs))

    return make


@pytest.fixture(scope="session")
def golden():
    """Recorded reference values: golden(name) reads tests/golden/<name>.json."""

    def read(name):
        return json.loads((GOLDEN_DIR / f"{name}.json").read_text(encoding="utf-8"))

    return read


@pytest.fixture(scope="session")
def verified_delta():
    """Least delta <= 6 for which FFT is verified to radius 8, computed once per group."""
    found = {}

    def lookup(definition):
        if definition.name not in found:
            oracle = CayleyOracle(definition.gens, definition.pres)
            found[definition.name] = min_fft_delta(8, 6, oracle)
        return found[definition.name]

    return lookup
