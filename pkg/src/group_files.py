"""
Geodesic Growth Toolkit - Data Files Module

Loads group definitions, triangulations and polytope point sets from JSON
files. Bundled files live under src/data/; any other path can be passed
directly.

Group file schema:
    {
      "name": "cannon",
      "kind": "virtually-abelian",          # or "matrix"
      "rank": 2,
      "f_action": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
      "f_table": [[0, 1], [1, 0]],
      "generators": [{"name": "a", "vector": [1, 0], "f": 0, "weight": 1}, ...],
      "inverse_closed": true,
      "infinite": true
    }
Matrix groups replace rank/f_action/f_table by "dimension" and
"projective", and generators carry "matrix" instead of "vector"/"f".
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .config import DATA_DIR, PATHS
from .errors import ConfigError, GroupDefinitionError
from .groups import (
    KIND_MATRIX,
    KIND_VA,
    GeneratingSet,
    GroupPresentation,
    Letter,
    check_generation,
)
from .utils import setup_logger

logger = setup_logger("group_files")


@dataclass
class GroupDefinition:
    """A presentation plus generating set, as read from a group file."""

    name: str
    pres: GroupPresentation
    gens: GeneratingSet
    infinite: bool = True
    document: dict = field(default_factory=dict)
    source: Optional[str] = None


def _resolve(name_or_path: str, subdir: str, search_dir: Optional[Path] = None) -> Path:
    candidate = Path(name_or_path)
    if candidate.is_file():
        return candidate

    stem = candidate.name
    for suffix in (".tri", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    dirs = [search_dir] if search_dir else []
    dirs.append(DATA_DIR / subdir)
    for directory in dirs:
        for path in (directory / stem, directory / f"{stem}.json"):
            if path.is_file():
                return path
    raise ConfigError(f"File not found: {name_or_path} (searched {', '.join(str(d) for d in dirs)})")


def _read_json(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}") from e


def _int_matrix(data, what: str) -> tuple[tuple[int, ...], ...]:
    try:
        return tuple(tuple(int(x) for x in row) for row in data)
    except (TypeError, ValueError) as e:
        raise GroupDefinitionError(f"{what} is not an integer matrix: {data}") from e


def presentation_from_document(doc: dict) -> GroupPresentation:
    kind = doc.get("kind", KIND_VA)
    if kind == KIND_VA:
        rank = int(doc.get("rank", 0))
        identity = [[1 if i == j else 0 for j in range(rank)] for i in range(rank)]
        f_action = tuple(
            _int_matrix(mat, f"f_action[{i}]")
            for i, mat in enumerate(doc.get("f_action", [identity]))
        )
        f_table = _int_matrix(doc.get("f_table", [[0]]), "f_table")
        pres = GroupPresentation(KIND_VA, rank=rank, f_action=f_action, f_table=f_table)
    elif kind == KIND_MATRIX:
        pres = GroupPresentation.matrix_group(int(doc.get("dimension", 0)), bool(doc.get("projective", False)))
    else:
        raise GroupDefinitionError(f"Unknown group kind {kind!r}")
    pres.validate()
    return pres


def generating_set_from_document(doc: dict, pres: GroupPresentation) -> GeneratingSet:
    letters = []
    for entry in doc.get("generators", []):
        if "name" not in entry:
            raise GroupDefinitionError(f"Generator without a name: {entry}")
        value = pres.element_from_json(entry)
        letters.append(Letter(str(entry["name"]), value, int(entry.get("weight", 1))))
    gens = GeneratingSet(tuple(letters), inverse_closed=bool(doc.get("inverse_closed", False)))
    gens.check(pres)
    return gens


def definition_from_document(doc: dict, source: Optional[str] = None) -> GroupDefinition:
    """Build and validate a GroupDefinition from a parsed group document."""
    pres = presentation_from_document(doc)
    gens = generating_set_from_document(doc, pres)
    return GroupDefinition(
        name=str(doc.get("name", "unnamed")),
        pres=pres,
        gens=gens,
        infinite=bool(doc.get("infinite", True)),
        document=doc,
        source=source,
    )


def definition_to_document(name: str, pres: GroupPresentation, gens: GeneratingSet, infinite: bool = True) -> dict:
    """Inverse of definition_from_document (used to emit derived generating sets)."""
    doc = {"name": name, "kind": pres.kind}
    if pres.kind == KIND_VA:
        doc.update({
            "rank": pres.rank,
            "f_action": [[list(row) for row in mat] for mat in pres.f_action],
            "f_table": [list(row) for row in pres.f_table],
        })
    else:
        doc.update({"dimension": pres.dimension, "projective": pres.projective})
    doc["generators"] = [
        {"name": letter.name, **letter.value.to_json(), "weight": letter.weight}
        for letter in gens.letters
    ]
    doc["inverse_closed"] = gens.inverse_closed
    doc["infinite"] = infinite
    return doc


def load_group(name_or_path: str, check: bool = True) -> GroupDefinition:
    """
    Load a group definition by bundled name ("z2", "cannon") or file path.

    Args:
        name_or_path: Bundled name or path to a JSON group file
        check: Run the bounded generation check

    Raises:
        ConfigError: file missing or unreadable (message names the path)
        GroupDefinitionError: schema or invariant violation
    """
    path = _resolve(name_or_path, "groups", PATHS["GROUPS_DIR"])
    doc = _read_json(path)
    definition = definition_from_document(doc, source=str(path))
    logger.debug(
        f"Loaded group {definition.name} from {path}: {len(definition.gens)} letters, kind {definition.pres.kind}"
    )
    if check:
        check_generation(definition.gens, definition.pres, definition.infinite)
    return definition


def load_triangulation(name_or_path: str):
    """
    Load a triangulation file: {"rank", "rays", "simplices", "ordered"}.

    Returns:
        polytopes.Triangulation
    """
    from .polytopes import Ray, Triangulation

    path = _resolve(name_or_path, "triangulations")
    doc = _read_json(path)
    try:
        rank = int(doc["rank"])
        rays = tuple(Ray.of(r) for r in doc["rays"])
        simplices = tuple(tuple(int(i) for i in s) for s in doc["simplices"])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed triangulation file {path}: {e}") from e
    tri = Triangulation(rank, rays, simplices, ordered=bool(doc.get("ordered", True)))
    tri.validate()
    return tri


def load_points(name_or_path: str) -> list[tuple[Fraction, ...]]:
    """
    Load a polytope point file: {"rank", "points"}; entries may be "p/q" strings.
    """
    path = _resolve(name_or_path, "polytopes")
    doc = _read_json(path)
    try:
        rank = int(doc["rank"])
        points = [tuple(Fraction(x) for x in p) for p in doc["points"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed polytope file {path}: {e}") from e
    if any(len(p) != rank for p in points):
        raise ConfigError(f"Polytope file {path} has points of the wrong rank")
    return points
