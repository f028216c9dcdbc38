"""Exception hierarchy shared by all pastekit modules.

Every rejection raised by the library is a subclass of KernelError, so callers
can catch one type at the boundary (the CLI maps them to exit code 1, except
ParseError which is a usage-level failure and maps to 2).
"""


class KernelError(Exception):
    """Base class for every error pastekit raises on invalid input."""


# -- data layer ---------------------------------------------------------------

class MalformedData(KernelError):
    """Face data is structurally broken: unsorted, duplicated, overlapping."""


class NotGraded(KernelError):
    """A face position points outside the stratum one dimension below."""


class OutOfRange(KernelError):
    """An element reference does not exist in the ambient poset."""


class EmptySubset(KernelError):
    """An operation that needs a nonempty subset received an empty one."""


# -- maps ---------------------------------------------------------------------

class NotAMap(KernelError):
    """A mapping violates boundary compatibility at some element."""


class SourceTargetMismatch(KernelError):
    """Composition attempted between maps that do not share the middle object."""


class NotInclusion(KernelError):
    """A pushout leg is not total and injective."""


class SourceMismatch(KernelError):
    """The two legs of a span do not share their source."""


class LoopEdge(KernelError):
    """A digraph edge with equal endpoints cannot be oriented."""


# -- shapes -------------------------------------------------------------------

class NotTraversable(KernelError):
    """The traversal got stuck: the input is not a molecule."""


class NotRound(KernelError):
    """A constructor needed a round input and did not get one."""


class DimensionMismatch(KernelError):
    """Two shapes that must share a dimension do not."""


class BoundaryMismatch(KernelError):
    """Boundaries that must agree (up to canonical form) do not."""


class DimensionError(KernelError):
    """A dimension index is out of the valid range for the operation."""


class Unsupported(KernelError):
    """The operation is outside the supported fragment (units, unitors)."""


# -- diagrams -----------------------------------------------------------------

class ShapeMismatch(KernelError):
    """A diagram operation received a diagram of the wrong shape."""


class TypeMismatch(KernelError):
    """Input/output diagrams do not form a well-typed declaration."""


class AmbientMismatch(KernelError):
    """Diagrams from different diagram sets cannot be combined."""


class DuplicateName(KernelError):
    """A generator name was declared twice."""


class MissingAssignment(KernelError):
    """A morphism does not assign a value to every generator."""


# -- surface syntax -----------------------------------------------------------

class ParseError(KernelError):
    """Source text (DSL script or JSON file) could not be parsed."""


class UnknownName(KernelError):
    """A name was used before being declared."""


class DimensionTooHigh(KernelError):
    """String-diagram rendering only covers dimension 2 and below."""
