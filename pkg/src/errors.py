"""
Geodesic Growth Toolkit - Errors

Every library failure derives from GeoGrowthError. The class attribute
exit_code is the process status the CLI returns for it.
"""


class GeoGrowthError(Exception):
    """Base class for toolkit failures."""

    exit_code = 1


class ConfigError(GeoGrowthError):
    """Bad or missing configuration input (group files, flags, data files)."""

    exit_code = 2


class GroupDefinitionError(ConfigError):
    """A group definition file or generating set violates its invariants."""


class ResourceCapError(GeoGrowthError):
    """A ball, automaton or search exceeded its configured cap."""

    exit_code = 3


class ValidationDisagreement(GeoGrowthError):
    """An automaton or series disagrees with the brute-force oracle."""

    exit_code = 4


class PreconditionError(GeoGrowthError, ValueError):
    """An operation was called outside its precondition."""


class AbsentInverseError(GeoGrowthError):
    """Some letter inverse is not expressible within the search cap."""


class RecurrenceNotFoundError(GeoGrowthError):
    """Guard terms contradict the detected linear recurrence."""


class LinearProgramError(GeoGrowthError):
    """Base class for exact LP failures."""


class InfeasibleError(LinearProgramError):
    """The linear program has no feasible point."""


class UnboundedError(LinearProgramError):
    """The linear program objective is unbounded below."""


class PolytopeError(GeoGrowthError):
    """Degenerate, non-invariant or otherwise unusable polytope."""


class ConeLanguageError(GeoGrowthError):
    """A cone language could not be assembled from the triangulation."""


class SurjectivityError(ConeLanguageError):
    """The assembled cone language misses some element of the checked ball."""

    exit_code = 4
